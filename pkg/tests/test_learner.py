import json

import numpy as np
import pytest

from formsel.bayes import BetaPosterior
from formsel.clustering import Cluster, ClusterSet
from formsel.comparator import ComparisonOutcome as O
from formsel.errors import MissingEnvironment, SchemaError
from formsel.field_grid import TeamDistribution
from formsel.fixture import FORMATIONS, OVERRIDES, build_arms
from formsel.learner import (
    BUDGET_EXHAUSTED,
    FULLY,
    AssociationDB,
    LearningConfig,
    cluster_environment,
    db_from_dict,
    learn_all,
    learn_context,
    load_db,
    per_team_audit,
    save_db,
    write_comparisons,
    write_trace,
)
from formsel.sim_env import ArmSpec, EnvConfig, SyntheticEnv

FAST = LearningConfig(draws=20_000)


def arms_env(thetas, seed, context="c", kicks=(33, 41)):
    arms = [ArmSpec(context, str(i), t) for i, t in enumerate(thetas)]
    return SyntheticEnv(arms, EnvConfig(kicks, seed))


def run(thetas, seed, cfg=FAST, **kw):
    return learn_context(arms_env(thetas, seed), "c", [str(i) for i in range(len(thetas))], cfg, **kw)


class TestConfig:
    def test_round_trip(self):
        cfg = LearningConfig(games_per_round=60, max_games_per_formation=600, seed=3)
        assert LearningConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg

    def test_unknown_field(self):
        with pytest.raises(SchemaError):
            LearningConfig.from_dict({"budget": 3})

    def test_invalid(self):
        with pytest.raises(ValueError):
            LearningConfig(games_per_round=0)
        with pytest.raises(ValueError):
            LearningConfig(games_per_round=20, max_games_per_formation=10)
        with pytest.raises(SchemaError):
            LearningConfig.from_dict({"games_per_round": 0})


class TestLearnContext:
    def test_single_formation(self):
        res = run([0.4], 0)
        assert res.chosen == 0 and res.games_used == 0 and res.rounds == 0 and res.ratio() == 1.0

    def test_clear_winner(self):
        wins = resolved = 0
        for seed in range(100):
            res = run([0.2, 0.5], seed)
            wins += res.chosen == 1
            resolved += res.resolved == FULLY
        assert wins >= 95 and resolved >= 95

    def test_bookkeeping(self):
        res = run([0.22, 0.55, 0.49], 4, LearningConfig(games_per_round=7, max_games_per_formation=100, draws=20_000))
        prior = FAST.prior
        for p, kicks in zip(res.posteriors, res.kicks):
            assert (p.alpha - prior.alpha) + (p.beta - prior.beta) == kicks

    def test_close_pair_needs_more_rounds(self):
        close, clear = [], []
        for seed in range(20):
            res = run([0.22, 0.55, 0.49], seed)
            assert res.chosen_formation == "1"
            first = {}
            for c in res.comparisons:
                if c["outcome"] != O.UNDECIDED.value:
                    first.setdefault((c["i"], c["j"]), c["round"])
            assert first[("1", "2")] >= max(first[("0", "1")], first[("0", "2")])
            close.append(first[("1", "2")])
            clear.append(max(first[("0", "1")], first[("0", "2")]))
        assert np.mean(close) > np.mean(clear)

    def test_resolved_formations_stop_playing(self):
        res = run([0.05, 0.50, 0.52], 1, LearningConfig(games_per_round=10, max_games_per_formation=400, draws=20_000))
        assert res.games[0] < res.games[1] == res.games[2]

    def test_partial_last_round(self):
        res = run([0.5, 0.5], 0, LearningConfig(games_per_round=30, max_games_per_formation=100, draws=20_000))
        assert res.games == [100, 100]
        assert res.rounds == 4

    def test_identical_arms_tie_break(self):
        res = run([0.3, 0.3, 0.3], 2, LearningConfig(games_per_round=10, max_games_per_formation=60, draws=20_000))
        assert res.resolved == BUDGET_EXHAUSTED
        assert res.ratio() == pytest.approx(1.0, abs=0.1)
        # settled by lowest variance among equally played arms
        variances = [p.variance for p in res.posteriors]
        assert abs(res.posteriors[res.chosen].variance - min(variances)) < 1e-4

    def test_monotone_stopping(self):
        rng = np.random.default_rng(0)
        ok = 0
        for seed in range(100):
            lo = rng.uniform(0.05, 0.5)
            res = run([lo, lo + 0.2, lo + 0.4], seed)
            ok += res.resolved == FULLY and res.chosen == 2
        assert ok >= 99

    def test_coverage(self):
        rng = np.random.default_rng(1)
        covered = 0
        for seed in range(200):
            thetas = rng.uniform(0.1, 0.8, 2)
            res = run(list(thetas), seed)
            covered += res.posteriors[res.chosen].hdi().contains(thetas[res.chosen])
        assert covered >= 180

    def test_deterministic(self):
        a, b = run([0.3, 0.35], 8), run([0.3, 0.35], 8)
        assert a.posteriors == b.posteriors and a.comparisons == b.comparisons

    def test_trace_and_log(self, tmp_path):
        res = run([0.2, 0.5], 3)
        assert len(res.trace) == 2 * (res.rounds + 1)
        assert res.trace[0] == {
            "round": 0, "formation_id": "0", "alpha": 2.0, "beta": 2.0, "mean": 0.5, "variance": 0.05,
            "hdi_lo": res.trace[0]["hdi_lo"], "hdi_hi": res.trace[0]["hdi_hi"],
        }
        assert {c["outcome"] for c in res.comparisons} <= {o.value for o in O}
        write_trace(tmp_path / "t.csv", res.trace)
        head = (tmp_path / "t.csv").read_text().splitlines()[0]
        assert head == "round,formation_id,alpha,beta,mean,variance,hdi_lo,hdi_hi"
        write_comparisons(tmp_path / "c.jsonl", res.comparisons)
        lines = (tmp_path / "c.jsonl").read_text().splitlines()
        assert [json.loads(x) for x in lines] == res.comparisons
        assert not run([0.2, 0.5], 3, record=False).trace


def two_cluster_set():
    ids = ["a1", "a2", "b1"]
    return ClusterSet([Cluster(0, [0, 1], 0), Cluster(1, [2], 2)], 1.0, "average", ids)


DISTS = [TeamDistribution(t, m) for t, m in (("a1", [11] + [0] * 18), ("a2", [10, 1] + [0] * 17), ("b1", [0] * 18 + [11]))]


class TestLearnAll:
    def test_explicit_cluster_arms(self):
        arms = [ArmSpec("cluster-0", "X", 0.2), ArmSpec("cluster-0", "Y", 0.6),
                ArmSpec("cluster-1", "X", 0.7), ArmSpec("cluster-1", "Y", 0.1)]
        cs = two_cluster_set()
        env = cluster_environment(SyntheticEnv(arms, EnvConfig(seed=1)), cs, ["X", "Y"])
        db = learn_all(cs, env, ["X", "Y"], FAST, DISTS)
        assert [r.formation for r in db.records] == ["Y", "X"]
        assert all(r.resolved == FULLY for r in db.records)
        assert db.records[1].medoid == DISTS[2]
        r = db.records[0]
        res = db.results[0]
        assert r.ratio == pytest.approx(res.posteriors[1].mean / res.posteriors[0].mean)
        assert r.games_used == sum(res.games)

    def test_missing_environment(self):
        cs = two_cluster_set()
        with pytest.raises(MissingEnvironment):
            cluster_environment(SyntheticEnv([ArmSpec("a1", "X", 0.5)]), cs, ["X"])

    def test_fixture(self, fixture_db):
        assert [r.formation for r in fixture_db.records] == ["F2", "F3", "F1"]
        assert all(r.resolved == FULLY for r in fixture_db.records)
        assert all(r.ratio > 1 for r in fixture_db.records)


class TestAudit:
    def test_fixture_flags_overrides(self, fixture_db, fixture_clusters):
        cfg = LearningConfig(games_per_round=60, max_games_per_formation=600, draws=20_000, seed=7)
        rows = per_team_audit(SyntheticEnv(build_arms(), EnvConfig((33, 41), 8)), fixture_clusters, fixture_db, FORMATIONS, cfg)
        assert sorted(r["team"] for r in rows) == sorted(OVERRIDES)
        z = next(r for r in rows if r["team"] == "zonal-07")
        assert (z["selected"], z["best"]) == ("F3", "F2")
        assert z["ratio"] == pytest.approx(0.245 / 0.08, abs=0.5)
        assert z["best_hdi"][0] > z["selected_hdi"][1]


class TestDbFiles:
    def test_round_trip(self, tmp_path, fixture_db):
        p = tmp_path / "db.json"
        save_db(fixture_db, p)
        back = load_db(p)
        assert back == fixture_db
        q = tmp_path / "db2.json"
        save_db(back, q)
        assert p.read_bytes() == q.read_bytes()

    def test_byte_deterministic(self, tmp_path, fixture_clusters, fixture_distributions):
        cfg = LearningConfig(games_per_round=60, max_games_per_formation=600, draws=20_000, seed=7)
        paths = []
        for k in range(2):
            env = cluster_environment(SyntheticEnv(build_arms(), EnvConfig((33, 41), 7)), fixture_clusters, FORMATIONS)
            db = learn_all(fixture_clusters, env, FORMATIONS, cfg, fixture_distributions)
            paths.append(tmp_path / f"{k}.json")
            save_db(db, paths[-1])
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_empty(self):
        db = db_from_dict({"version": 1, "config": {}, "clusters": []})
        assert db == AssociationDB({}, [])

    def test_missing_medoid(self, fixture_db):
        doc = fixture_db.to_dict()
        del doc["clusters"][1]["medoid"]
        with pytest.raises(SchemaError) as exc:
            db_from_dict(doc)
        assert exc.value.path == "clusters[1]"

    def test_wrong_type(self, fixture_db):
        doc = fixture_db.to_dict()
        doc["clusters"][0]["alpha"] = "x"
        with pytest.raises(SchemaError) as exc:
            db_from_dict(doc)
        assert exc.value.path == "clusters[0].alpha"

    def test_bad_json(self, tmp_path):
        p = tmp_path / "db.json"
        p.write_text("{")
        with pytest.raises(SchemaError):
            load_db(p)
