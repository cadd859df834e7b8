"""Offline learning of the best formation per opponent cluster.

Each round plays ``games_per_round`` games for every formation still
involved in an undecided comparison, folds the results into its Beta
posterior and re-runs the pairwise comparisons. Learning stops once no pair
is undecided or a formation exhausts its game budget.
"""
import csv
import json
import zlib
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from .bayes import BetaPosterior, HdiInterval, credible_interval
from .clustering import ClusterSet
from .comparator import (
    DEFAULT_DRAWS,
    DEFAULT_GRID,
    MONTE_CARLO,
    ComparisonOutcome,
    RopeInterval,
    decide,
    difference_hdi,
    rank,
    tie_break,
)
from .errors import MissingEnvironment, SchemaError, UnknownArm
from .field_grid import TeamDistribution
from .sim_env import Environment, RoundRobinEnv, SyntheticEnv

DB_VERSION = 1
FULLY = "fully"
BUDGET_EXHAUSTED = "budget-exhausted"

Outcome = ComparisonOutcome


@dataclass(frozen=True)
class LearningConfig:
    games_per_round: int = 10
    max_games_per_formation: int = 200
    prior: BetaPosterior = BetaPosterior(2.0, 2.0)
    rope: RopeInterval = RopeInterval()
    hdi_mass: float = 0.95
    method: str = MONTE_CARLO
    draws: int = DEFAULT_DRAWS
    grid: int = DEFAULT_GRID
    seed: int = 0

    def __post_init__(self):
        if self.games_per_round < 1:
            raise ValueError("games_per_round must be >= 1")
        if self.max_games_per_formation < self.games_per_round:
            raise ValueError("max_games_per_formation must be >= games_per_round")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["prior"] = [self.prior.alpha, self.prior.beta]
        d["rope"] = [self.rope.w, self.rope.z]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "LearningConfig":
        d = dict(d)
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise SchemaError(f"unknown fields {sorted(unknown)}", "config")
        try:
            if "prior" in d:
                d["prior"] = BetaPosterior(*map(float, d["prior"]))
            if "rope" in d:
                d["rope"] = RopeInterval(*map(float, d["rope"]))
            return cls(**d)
        except (TypeError, ValueError) as exc:
            raise SchemaError(str(exc), "config") from exc


@dataclass
class ContextResult:
    formations: List[str]
    posteriors: List[BetaPosterior]
    outcomes: List[List[Optional[ComparisonOutcome]]]
    ranking: List[int]
    games: List[int]
    kicks: List[int]
    rounds: int
    resolved: str
    trace: List[dict] = field(default_factory=list)
    comparisons: List[dict] = field(default_factory=list)

    @property
    def chosen(self) -> int:
        return self.ranking[0]

    @property
    def chosen_formation(self) -> str:
        return self.formations[self.chosen]

    @property
    def games_used(self) -> int:
        return int(sum(self.games))

    def ratio(self) -> float:
        if len(self.ranking) < 2:
            return 1.0
        runner = self.posteriors[self.ranking[1]].mean
        return self.posteriors[self.chosen].mean / runner


def _comparison_seed(base: int, context: str, rnd: int, i: int, j: int) -> int:
    ss = np.random.SeedSequence([base, zlib.crc32(context.encode("utf-8")), rnd, i, j])
    return int(ss.generate_state(1)[0])


def _trace_rows(rnd, formations, posts, mass):
    rows = []
    for f, p in zip(formations, posts):
        iv = credible_interval(p, mass)
        rows.append(
            {"round": rnd, "formation_id": f, "alpha": p.alpha, "beta": p.beta,
             "mean": p.mean, "variance": p.variance, "hdi_lo": iv.lo, "hdi_hi": iv.hi}
        )
    return rows


def learn_context(
    env: Environment,
    context: str,
    formations: Sequence[str],
    cfg: LearningConfig,
    record: bool = True,
) -> ContextResult:
    """Sequentially learn which formation is best in ``context``.

    ``record=False`` skips the per-round posterior trace and comparison log.
    """
    formations = list(formations)
    if not formations:
        raise ValueError("need at least one formation")
    F = len(formations)
    posts = [cfg.prior] * F
    games = [0] * F
    kicks = [0] * F
    outcomes: List[List[Optional[ComparisonOutcome]]] = [[None] * F for _ in range(F)]
    for i in range(F):
        for j in range(i + 1, F):
            outcomes[i][j] = Outcome.UNDECIDED
    trace = _trace_rows(0, formations, posts, cfg.hdi_mass) if record else []
    comparisons = []
    rnd = 0
    resolved = FULLY
    while F > 1:
        active = [
            f for f in range(F)
            if any(outcomes[min(f, g)][max(f, g)] is Outcome.UNDECIDED for g in range(F) if g != f)
        ]
        if not active:
            break
        if any(games[f] >= cfg.max_games_per_formation for f in active):
            resolved = BUDGET_EXHAUSTED
            break
        rnd += 1
        for f in active:
            p = posts[f]
            todo = min(cfg.games_per_round, cfg.max_games_per_formation - games[f])
            a, b = p.alpha, p.beta
            for _ in range(todo):
                obs = env.run(context, formations[f])
                a += obs.k
                b += obs.n - obs.k
                kicks[f] += obs.n
            posts[f] = BetaPosterior(a, b)
            games[f] += todo
        touched = set(active)
        for i in range(F):
            for j in range(i + 1, F):
                if i not in touched and j not in touched:
                    continue
                seed = _comparison_seed(cfg.seed, context, rnd, i, j)
                est = difference_hdi(posts[i], posts[j], cfg.hdi_mass, cfg.method, cfg.draws, seed, cfg.grid)
                o = decide(est, cfg.rope)
                outcomes[i][j] = o
                if record:
                    comparisons.append(
                        {"round": rnd, "i": formations[i], "j": formations[j],
                         "hdi_lo": est.hdi.lo, "hdi_hi": est.hdi.hi, "outcome": o.value}
                    )
        if record:
            trace.extend(_trace_rows(rnd, formations, posts, cfg.hdi_mass))
    settled = [row[:] for row in outcomes]
    for i in range(F):
        for j in range(i + 1, F):
            if settled[i][j] in (Outcome.EQUAL, Outcome.UNDECIDED):
                win = tie_break(posts[i], posts[j])
                settled[i][j] = Outcome.FIRST_BETTER if win == 0 else Outcome.SECOND_BETTER
    order, _ = rank(posts, settled)
    return ContextResult(formations, posts, outcomes, order, games, kicks, rnd, resolved, trace, comparisons)


@dataclass
class AssociationRecord:
    cluster_id: int
    medoid: TeamDistribution
    formation: str
    alpha: float
    beta: float
    hdi: HdiInterval
    ratio: float
    games_used: int
    resolved: str

    def to_dict(self) -> dict:
        return {
            "id": self.cluster_id,
            "medoid": self.medoid.to_dict(),
            "formation": self.formation,
            "alpha": self.alpha,
            "beta": self.beta,
            "hdi": [self.hdi.lo, self.hdi.hi],
            "ratio": self.ratio,
            "games_used": self.games_used,
            "resolved": self.resolved,
        }


@dataclass
class AssociationDB:
    config: dict
    records: List[AssociationRecord]
    created: Optional[str] = None
    results: Dict[int, ContextResult] = field(default_factory=dict, repr=False, compare=False)

    def record(self, cluster_id: int) -> AssociationRecord:
        for r in self.records:
            if r.cluster_id == cluster_id:
                return r
        raise KeyError(cluster_id)

    def to_dict(self) -> dict:
        doc = {"version": DB_VERSION, "config": self.config}
        if self.created is not None:
            doc["created"] = self.created
        doc["clusters"] = [r.to_dict() for r in self.records]
        return doc

    def __eq__(self, other):
        if not isinstance(other, AssociationDB):
            return NotImplemented
        return self.to_dict() == other.to_dict()


def cluster_context(cluster_id: int) -> str:
    return f"cluster-{cluster_id}"


def cluster_environment(env: SyntheticEnv, cs: ClusterSet, formations: Sequence[str]) -> Environment:
    """Give each cluster an environment, preferring explicit cluster arms.

    Clusters without ``cluster-<id>`` arms play their member teams in turn.
    """
    members = {}
    for c in cs.clusters:
        ctx = cluster_context(c.id)
        if all(env.has_arm(ctx, f) for f in formations):
            members[ctx] = [ctx]
            continue
        teams = [cs.team_ids[m] for m in c.members if all(env.has_arm(cs.team_ids[m], f) for f in formations)]
        if not teams:
            raise MissingEnvironment(f"no arms for cluster {c.id} or any of its members")
        members[ctx] = teams
    return RoundRobinEnv(env, members)


def learn_all(
    cs: ClusterSet,
    env: Environment,
    formations: Sequence[str],
    cfg: LearningConfig,
    distributions: Sequence[TeamDistribution],
    extra_config: dict = None,
    created: Optional[str] = None,
) -> AssociationDB:
    """One ``learn_context`` per cluster, run against ``cluster-<id>`` contexts."""
    records = []
    results = {}
    for c in cs.clusters:
        try:
            res = learn_context(env, cluster_context(c.id), formations, cfg)
        except UnknownArm as exc:
            raise MissingEnvironment(str(exc)) from exc
        results[c.id] = res
        p = res.posteriors[res.chosen]
        records.append(
            AssociationRecord(
                c.id, distributions[c.medoid], res.chosen_formation, p.alpha, p.beta,
                credible_interval(p, cfg.hdi_mass), res.ratio(), res.games_used, res.resolved,
            )
        )
    config = {"learning": cfg.to_dict(), "formations": list(formations)}
    if extra_config:
        config.update(extra_config)
    return AssociationDB(config, records, created, results)


def per_team_audit(
    env: Environment,
    cs: ClusterSet,
    db: AssociationDB,
    formations: Sequence[str],
    cfg: LearningConfig,
) -> List[dict]:
    """Learn against every team alone; report teams whose best formation
    differs from their cluster's association."""
    rows = []
    for c in cs.clusters:
        selected = db.record(c.id).formation
        for m in c.members:
            team = cs.team_ids[m]
            res = learn_context(env, team, formations, cfg)
            best = res.chosen_formation
            if best == selected:
                continue
            sel_idx = res.formations.index(selected)
            sel_post = res.posteriors[sel_idx]
            best_post = res.posteriors[res.chosen]
            sel_iv = credible_interval(sel_post, cfg.hdi_mass)
            best_iv = credible_interval(best_post, cfg.hdi_mass)
            rows.append(
                {
                    "team": team,
                    "cluster": c.id,
                    "selected": selected,
                    "selected_hdi": [sel_iv.lo, sel_iv.hi],
                    "best": best,
                    "best_hdi": [best_iv.lo, best_iv.hi],
                    "ratio": best_post.mean / sel_post.mean,
                }
            )
    return rows


def save_db(db: AssociationDB, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(db.to_dict(), fh, indent=2)
        fh.write("\n")


def _field(d, key, path, kind=None):
    if not isinstance(d, dict) or key not in d:
        raise SchemaError(f"missing field {key!r}", path)
    v = d[key]
    if kind is not None and not isinstance(v, kind):
        raise SchemaError(f"field {key!r} has wrong type {type(v).__name__}", f"{path}.{key}" if path else key)
    return v


def db_from_dict(doc: dict) -> AssociationDB:
    _field(doc, "version", "", int)
    config = _field(doc, "config", "", dict)
    clusters = _field(doc, "clusters", "", list)
    num = (int, float)
    records = []
    for i, c in enumerate(clusters):
        path = f"clusters[{i}]"
        medoid = _field(c, "medoid", path, dict)
        hdi = _field(c, "hdi", path, list)
        if len(hdi) != 2:
            raise SchemaError("hdi must be [lo, hi]", f"{path}.hdi")
        mass = config.get("learning", {}).get("hdi_mass", 0.95)
        records.append(
            AssociationRecord(
                cluster_id=_field(c, "id", path, int),
                medoid=TeamDistribution.from_dict(medoid, f"{path}.medoid"),
                formation=str(_field(c, "formation", path)),
                alpha=_field(c, "alpha", path, num),
                beta=_field(c, "beta", path, num),
                hdi=HdiInterval(hdi[0], hdi[1], mass),
                ratio=_field(c, "ratio", path, num),
                games_used=_field(c, "games_used", path, int),
                resolved=_field(c, "resolved", path, str),
            )
        )
    return AssociationDB(config, records, doc.get("created"))


def load_db(path) -> AssociationDB:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(str(exc)) from exc
    return db_from_dict(doc)


TRACE_FIELDS = ["round", "formation_id", "alpha", "beta", "mean", "variance", "hdi_lo", "hdi_hi"]


def write_trace(path, rows: Sequence[dict]):
    """Posterior trace CSV; a leading ``context`` column is kept when present."""
    fields = (["context"] if rows and "context" in rows[0] else []) + TRACE_FIELDS
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)


def write_comparisons(path, rows: Sequence[dict]):
    with open(path, "w", encoding="utf-8") as fh:
        for r in rows:
            fh.write(json.dumps(r) + "\n")
