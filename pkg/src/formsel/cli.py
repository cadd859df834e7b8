"""Command-line entry point: ingest -> cluster -> learn -> validate -> select/serve.

Exit codes: 0 success, 1 usage error, 2 data/schema error, 3 runtime error.
"""
import argparse
import json
import logging
import sys
from dataclasses import replace
from datetime import datetime, timezone

from . import __version__
from .clustering import LINKAGES, ClusterSet, agglomerate, cut, save_report
from .emd import distance_matrix, ground_costs
from .errors import DataError, FormselError, SchemaError
from .field_grid import GridSpec, TeamDistribution, load_distributions, parse_snapshots, save_distributions, team_distributions
from .learner import LearningConfig, cluster_environment, learn_all, load_db, per_team_audit, save_db, write_comparisons, write_trace
from .selector import Selector, serve
from .sim_env import EnvConfig, SyntheticEnv, load_arms
from .validation import DEFAULT_BINS, VALIDATION_CONFIG, emit_report, validate

log = logging.getLogger("formsel")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _read_json(path):
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: {exc}") from exc


def _write_json(path, doc):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def cmd_ingest(args):
    grid = GridSpec.from_dict(_read_json(args.grid)) if args.grid else GridSpec()
    snaps = parse_snapshots(args.snapshots)
    ds = team_distributions(snaps, grid)
    save_distributions(args.out, ds, grid, {"snapshots": len(snaps), "source": str(args.snapshots)})
    log.info("wrote %d team distributions to %s", len(ds), args.out)


def cmd_cluster(args):
    ds, grid = load_distributions(args.distributions)
    dm = distance_matrix(ds, ground_costs(grid))
    cs = cut(agglomerate(dm, args.linkage), args.threshold)
    matrix_out = args.matrix_out or f"{args.out.removesuffix('.json')}.distances.csv"
    dm.to_csv(matrix_out)
    save_report(args.out, cs, {"grid": grid.to_dict(), "distributions": [d.to_dict() for d in ds]})
    log.info("%d clusters at threshold %g; matrix in %s", len(cs.clusters), args.threshold, matrix_out)


def _load_cluster_report(path):
    doc = _read_json(path)
    if "distributions" not in doc:
        raise SchemaError("cluster report lacks embedded distributions", "distributions")
    ds = [TeamDistribution.from_dict(d, f"distributions[{i}]") for i, d in enumerate(doc["distributions"])]
    cs = ClusterSet.from_report(doc, [d.team_id for d in ds])
    return cs, ds, GridSpec.from_dict(doc.get("grid", {}))


def _learning_config(args):
    raw = _read_json(args.config) if args.config else {}
    if not isinstance(raw, dict):
        raise SchemaError("config must be a JSON object", "config")
    env_keys = {"corner_kicks"}
    learn_raw = {k: v for k, v in raw.items() if k not in env_keys}
    for flag, key in (("seed", "seed"), ("games_per_round", "games_per_round"),
                      ("max_games", "max_games_per_formation"), ("draws", "draws"), ("method", "method")):
        v = getattr(args, flag, None)
        if v is not None:
            learn_raw[key] = v
    cfg = LearningConfig.from_dict(learn_raw)
    kicks = raw.get("corner_kicks", [33, 41])
    try:
        env_cfg = EnvConfig(kicks if isinstance(kicks, int) else tuple(kicks), cfg.seed)
    except (TypeError, ValueError) as exc:
        raise SchemaError(str(exc), "config.corner_kicks") from exc
    return cfg, env_cfg


def cmd_learn(args):
    cs, ds, grid = _load_cluster_report(args.clusters)
    arms = load_arms(args.arms)
    formations = list(dict.fromkeys(a.formation for a in arms))
    cfg, env_cfg = _learning_config(args)
    base = SyntheticEnv(arms, env_cfg)
    env = cluster_environment(base, cs, formations)
    created = datetime.now(timezone.utc).isoformat(timespec="seconds") if args.timestamp else None
    extra = {"grid": grid.to_dict(), "corner_kicks": list(env_cfg.kick_range), "seed": cfg.seed,
             "threshold": cs.threshold, "linkage": cs.linkage}
    db = learn_all(cs, env, formations, cfg, ds, extra, created)
    save_db(db, args.out)
    stem = args.out.removesuffix(".json")
    if args.trace_out or args.comparisons_out:
        trace, comps = [], []
        for cid, res in db.results.items():
            trace.extend({"context": f"cluster-{cid}", **r} for r in res.trace)
            comps.extend({"context": f"cluster-{cid}", **r} for r in res.comparisons)
        if args.trace_out:
            write_trace(args.trace_out, trace)
        if args.comparisons_out:
            write_comparisons(args.comparisons_out, comps)
    if args.audit:
        team_env = SyntheticEnv(arms, replace(env_cfg, seed=env_cfg.seed + 1))
        rows = per_team_audit(team_env, cs, db, formations, cfg)
        audit_out = args.audit_out or f"{stem}.audit.json"
        _write_json(audit_out, {"seed": cfg.seed, "discrepancies": rows})
        log.info("audit flagged %d team(s); report in %s", len(rows), audit_out)
    for r in db.records:
        log.info("cluster %d -> %s (ratio %.3f, %s)", r.cluster_id, r.formation, r.ratio, r.resolved)


def cmd_validate(args):
    overrides = {}
    if args.max_blocks is not None:
        overrides["max_games_per_formation"] = args.max_blocks
    if args.draws is not None:
        overrides["draws"] = args.draws
    if args.method is not None:
        overrides["method"] = args.method
    cfg = replace(VALIDATION_CONFIG, **overrides)
    seeds = list(range(args.seed, args.seed + args.seeds))
    report = validate(args.block_size, seeds, cfg, DEFAULT_BINS, args.pairs_per_bin)
    meta = {"seeds": seeds, "config": cfg.to_dict(), "pairs_per_bin": args.pairs_per_bin}
    for p in emit_report(report, args.out_dir, meta):
        log.info("wrote %s", p)


def _selector(path):
    return Selector(load_db(path))


def cmd_select(args):
    sel = _selector(args.db)
    with open(args.input, encoding="utf-8") as fh:
        reply = sel.handle_line(fh.read())
    print(reply)
    if json.loads(reply).get("error"):
        raise DataError(reply)


def cmd_serve(args):
    db = load_db(args.db)
    serve(db, args.host, args.port)


def cmd_fixture(args):
    from .fixture import write_fixture

    for kind, p in write_fixture(args.out_dir).items():
        log.info("%s: %s", kind, p)


def build_parser():
    p = _Parser(prog="formsel", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("ingest", help="snapshots CSV -> per-team distributions")
    s.add_argument("--snapshots", required=True)
    s.add_argument("--grid")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("cluster", help="distributions -> cluster report + distance matrix")
    s.add_argument("--distributions", required=True)
    s.add_argument("--linkage", choices=LINKAGES, default="average")
    s.add_argument("--threshold", type=float, required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--matrix-out")
    s.set_defaults(func=cmd_cluster)

    s = sub.add_parser("learn", help="learn cluster -> formation associations on synthetic arms")
    s.add_argument("--clusters", required=True)
    s.add_argument("--arms", required=True)
    s.add_argument("--config")
    s.add_argument("--out", required=True)
    s.add_argument("--seed", type=int)
    s.add_argument("--games-per-round", type=int)
    s.add_argument("--max-games", type=int)
    s.add_argument("--draws", type=int)
    s.add_argument("--method", choices=["monte-carlo", "hdi-grid"])
    s.add_argument("--audit", action="store_true")
    s.add_argument("--audit-out")
    s.add_argument("--trace-out")
    s.add_argument("--comparisons-out")
    s.add_argument("--timestamp", action="store_true", help="record creation time (breaks byte determinism)")
    s.set_defaults(func=cmd_learn)

    s = sub.add_parser("validate", help="synthetic ranking-accuracy harness")
    s.add_argument("--block-size", type=int, choices=[20, 60], required=True)
    s.add_argument("--seeds", type=int, default=10)
    s.add_argument("--seed", type=int, default=0, help="first seed")
    s.add_argument("--pairs-per-bin", type=int, default=10)
    s.add_argument("--max-blocks", type=int)
    s.add_argument("--draws", type=int)
    s.add_argument("--method", choices=["monte-carlo", "hdi-grid"])
    s.add_argument("--out-dir", required=True)
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("select", help="classify one opponent and print its formation")
    s.add_argument("--db", required=True)
    s.add_argument("--input", required=True)
    s.set_defaults(func=cmd_select)

    s = sub.add_parser("serve", help="serve selections as newline-delimited JSON over TCP")
    s.add_argument("--db", required=True)
    s.add_argument("--port", type=int, default=7654)
    s.add_argument("--host", default="127.0.0.1")
    s.set_defaults(func=cmd_serve)

    s = sub.add_parser("fixture", help="write the bundled synthetic fixture")
    s.add_argument("--out-dir", required=True)
    s.set_defaults(func=cmd_fixture)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"formsel: error: {exc}", file=sys.stderr)
        return 1
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        args.func(args)
    except (DataError, ValueError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"formsel: data error: {exc}", file=sys.stderr)
        return 2
    except (FormselError, OSError) as exc:
        print(f"formsel: runtime error: {exc}", file=sys.stderr)
        return 3
    except KeyboardInterrupt:
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
