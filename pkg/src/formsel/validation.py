"""Synthetic check of the sequential two-arm comparison.

Pairs of success probabilities are drawn in bins of their difference; each
pair is learnt from fixed-size binomial blocks and the final ordering is
compared with the known truth.
"""
import csv
import json
import os
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .comparator import ComparisonOutcome
from .errors import InfeasibleBin
from .learner import LearningConfig, learn_context
from .sim_env import VALIDATION_CONTEXT, make_validation_env

THETA_MIN = 0.05
THETA_MAX = 0.90
THETA2_LIMIT = 0.95

# equal zone on the ROPE half-width, then 0.01-wide bins up to 0.105
DEFAULT_BINS: List[Tuple[float, float]] = [(0.0, 0.015)] + [
    (round(0.015 + 0.01 * i, 3), round(0.025 + 0.01 * i, 3)) for i in range(9)
]

# one block per round; budget counted in blocks
VALIDATION_CONFIG = LearningConfig(games_per_round=1, max_games_per_formation=100, draws=20_000)


@dataclass(frozen=True)
class PairSample:
    theta1: float
    theta2: float
    bin: int

    @property
    def delta(self) -> float:
        return abs(self.theta1 - self.theta2)


@dataclass
class PairResult:
    pair: PairSample
    index: int
    outcome: ComparisonOutcome
    chosen: int
    samples: int
    blocks: int
    resolved: str
    correct: bool


@dataclass
class ValidationReport:
    block_size: int
    bins: List[Tuple[float, float]]
    results: List[PairResult] = field(default_factory=list)
    seeds: List[int] = field(default_factory=list)

    def in_bin(self, b: int) -> List[PairResult]:
        return [r for r in self.results if r.pair.bin == b]

    def rate(self, b: int) -> Optional[float]:
        rs = self.in_bin(b)
        return sum(r.correct for r in rs) / len(rs) if rs else None

    def rates(self) -> List[Optional[float]]:
        return [self.rate(b) for b in range(len(self.bins))]

    def pooled(self, bins: Sequence[int]) -> List[PairResult]:
        keep = set(bins)
        return [r for r in self.results if r.pair.bin in keep]


def generate_pairs(
    bins: Sequence[Tuple[float, float]] = DEFAULT_BINS,
    pairs_per_bin: int = 10,
    seed: int = 0,
) -> List[PairSample]:
    rng = np.random.default_rng(seed)
    ordered = sorted(bins)
    for (lo1, hi1), (lo2, _) in zip(ordered, ordered[1:]):
        if lo2 < hi1:
            raise InfeasibleBin(f"bins [{lo1}, {hi1}) and [{lo2}, ...) overlap")
    out = []
    for b, (lo, hi) in enumerate(bins):
        if lo < 0 or hi <= lo or hi > 1 or THETA_MIN + lo >= THETA2_LIMIT:
            raise InfeasibleBin(f"bin [{lo}, {hi}) cannot hold a pair in the sampling range")
        for _ in range(pairs_per_bin):
            while True:
                t1 = rng.uniform(THETA_MIN, THETA_MAX)
                d = rng.uniform(lo, hi)
                t2 = t1 + d
                if t2 < THETA2_LIMIT:
                    break
            if rng.random() < 0.5:
                t1, t2 = t2, t1
            out.append(PairSample(float(t1), float(t2), b))
    return out


def _pair_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def run_pair(
    pair: PairSample,
    block_size: int,
    cfg: LearningConfig,
    seed: int,
    equal_zone: bool,
    index: int = 0,
) -> PairResult:
    env = make_validation_env([pair.theta1, pair.theta2], block_size, seed)
    res = learn_context(env, VALIDATION_CONTEXT, ["0", "1"], replace(cfg, seed=seed), record=False)
    outcome = res.outcomes[0][1]
    if equal_zone:
        correct = outcome is ComparisonOutcome.EQUAL
    else:
        truth = 0 if pair.theta1 > pair.theta2 else 1
        correct = res.chosen == truth
    return PairResult(pair, index, outcome, res.chosen, res.kicks[0], res.games[0], res.resolved, correct)


def run_validation(
    pairs: Sequence[PairSample],
    block_size: int,
    cfg: LearningConfig = VALIDATION_CONFIG,
    seed: int = 0,
    bins: Sequence[Tuple[float, float]] = DEFAULT_BINS,
    report: Optional[ValidationReport] = None,
) -> ValidationReport:
    """Run every pair; a bin lying inside the ROPE counts Equal as correct."""
    if report is None:
        report = ValidationReport(block_size, list(bins))
    report.seeds.append(seed)
    base = len(report.results)
    for k, pair in enumerate(pairs):
        lo, hi = bins[pair.bin]
        equal_zone = hi <= cfg.rope.z + 1e-12
        report.results.append(
            run_pair(pair, block_size, cfg, _pair_seed(seed, k), equal_zone, base + k)
        )
    return report


def validate(
    block_size: int,
    seeds: Sequence[int],
    cfg: LearningConfig = VALIDATION_CONFIG,
    bins: Sequence[Tuple[float, float]] = DEFAULT_BINS,
    pairs_per_bin: int = 10,
) -> ValidationReport:
    report = ValidationReport(block_size, list(bins))
    for s in seeds:
        pairs = generate_pairs(bins, pairs_per_bin, s)
        run_validation(pairs, block_size, cfg, s, bins, report)
    return report


def _fmt(v):
    return "" if v is None else repr(float(v))


def emit_report(report: ValidationReport, out_dir, meta: dict = None) -> List[str]:
    """Write rates.csv, samples.csv and summary.json into ``out_dir``."""
    os.makedirs(out_dir, exist_ok=True)
    rates_path = os.path.join(out_dir, "rates.csv")
    samples_path = os.path.join(out_dir, "samples.csv")
    summary_path = os.path.join(out_dir, "summary.json")
    with open(rates_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["bin", "bin_lo", "bin_hi", "count", "rate"])
        for b, (lo, hi) in enumerate(report.bins):
            w.writerow([b, lo, hi, len(report.in_bin(b)), _fmt(report.rate(b))])
    with open(samples_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["bin", "pair", "theta1", "theta2", "samples", "blocks", "correct", "outcome", "resolved"])
        for r in report.results:
            w.writerow([
                r.pair.bin, r.index, repr(r.pair.theta1), repr(r.pair.theta2), r.samples,
                r.blocks, int(r.correct), r.outcome.value, r.resolved,
            ])
    summary = {
        "block_size": report.block_size,
        "seeds": list(report.seeds),
        "pairs": len(report.results),
        "bins": [
            {
                "bin": b,
                "range": [lo, hi],
                "count": len(report.in_bin(b)),
                "rate": report.rate(b),
                "median_samples": (
                    float(np.median([r.samples for r in report.in_bin(b)])) if report.in_bin(b) else None
                ),
            }
            for b, (lo, hi) in enumerate(report.bins)
        ],
    }
    if meta:
        summary["meta"] = meta
    with open(summary_path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    return [rates_path, samples_path, summary_path]
