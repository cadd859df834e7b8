"""Pairwise comparison of formation posteriors via the HDI of p1 - p2.

The decision uses a region of practical equivalence (ROPE) ``[w, z]``
around zero: an HDI inside it means the formations are equal, an HDI
entirely at or above zero means the first is better, at or below zero the
second, otherwise more games are needed.
"""
import enum
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .bayes import BetaPosterior, HdiInterval, credible_interval
from .errors import InsufficientDraws
from .kernels.intervals import narrowest_weighted, narrowest_window

MONTE_CARLO = "monte-carlo"
HDI_GRID = "hdi-grid"
METHODS = (MONTE_CARLO, HDI_GRID)
MIN_DRAWS = 10_000
DEFAULT_DRAWS = 200_000
DEFAULT_GRID = 512


class ComparisonOutcome(enum.Enum):
    FIRST_BETTER = "FirstBetter"
    SECOND_BETTER = "SecondBetter"
    EQUAL = "Equal"
    UNDECIDED = "Undecided"

    def swapped(self) -> "ComparisonOutcome":
        if self is ComparisonOutcome.FIRST_BETTER:
            return ComparisonOutcome.SECOND_BETTER
        if self is ComparisonOutcome.SECOND_BETTER:
            return ComparisonOutcome.FIRST_BETTER
        return self


@dataclass(frozen=True)
class RopeInterval:
    w: float = -0.015
    z: float = 0.015

    def __post_init__(self):
        if not self.w < 0 < self.z:
            raise ValueError(f"ROPE must straddle zero, got [{self.w}, {self.z}]")


@dataclass(frozen=True)
class DiffEstimate:
    hdi: HdiInterval
    method: str
    sample_count: int
    seed: int


def difference_hdi(
    p1: BetaPosterior,
    p2: BetaPosterior,
    mass: float = 0.95,
    method: str = MONTE_CARLO,
    draws: int = DEFAULT_DRAWS,
    seed: int = 0,
    grid: int = DEFAULT_GRID,
) -> DiffEstimate:
    """HDI of the distribution of p1 - p2 for independent posteriors.

    ``monte-carlo`` samples both posteriors; ``hdi-grid`` discretises each
    posterior over its own HDI with ``grid`` points weighted by density and
    takes the narrowest interval of the weighted difference grid.
    """
    if method == MONTE_CARLO:
        if draws < MIN_DRAWS:
            raise InsufficientDraws(f"need at least {MIN_DRAWS} draws, got {draws}")
        rng = np.random.default_rng(seed)
        x1 = rng.beta(p1.alpha, p1.beta, draws)
        x2 = rng.beta(p2.alpha, p2.beta, draws)
        diff = np.sort(x1 - x2)
        count = math.ceil(mass * draws)
        i = narrowest_window(diff, count)
        return DiffEstimate(HdiInterval(float(diff[i]), float(diff[i + count - 1]), mass), method, draws, seed)
    if method == HDI_GRID:
        if grid < 2:
            raise InsufficientDraws(f"grid needs at least 2 points, got {grid}")
        v1, w1 = _discretise(p1, mass, grid)
        v2, w2 = _discretise(p2, mass, grid)
        values = (v1[:, None] - v2[None, :]).ravel()
        weights = (w1[:, None] * w2[None, :]).ravel()
        order = np.argsort(values, kind="stable")
        lo, hi, _ = narrowest_weighted(values[order], weights[order], mass)
        return DiffEstimate(HdiInterval(float(lo), float(hi), mass), method, grid, seed)
    raise ValueError(f"unknown method {method!r}; choose from {METHODS}")


def _discretise(p: BetaPosterior, mass: float, grid: int):
    iv = credible_interval(p, mass)
    xs = np.linspace(iv.lo, iv.hi, grid)
    a, b = p.alpha, p.beta
    with np.errstate(divide="ignore"):
        logw = (a - 1) * np.log(xs) + (b - 1) * np.log1p(-xs)
    w = np.exp(logw - logw.max())
    return xs, w / w.sum()


def decide(diff: DiffEstimate, rope: RopeInterval = RopeInterval()) -> ComparisonOutcome:
    lo, hi = diff.hdi.lo, diff.hdi.hi
    if rope.w <= lo and hi <= rope.z:
        return ComparisonOutcome.EQUAL
    if lo >= 0.0:
        return ComparisonOutcome.FIRST_BETTER
    if hi <= 0.0:
        return ComparisonOutcome.SECOND_BETTER
    return ComparisonOutcome.UNDECIDED


def tie_break(p1: BetaPosterior, p2: BetaPosterior) -> int:
    """0 if the first posterior wins, 1 for the second.

    Lower variance wins; equal variance falls back to the higher mean, and a
    full tie keeps the first.
    """
    if p1.variance != p2.variance:
        return 0 if p1.variance < p2.variance else 1
    if p1.mean != p2.mean:
        return 0 if p1.mean > p2.mean else 1
    return 0


def rank(
    posteriors: Sequence[BetaPosterior],
    outcomes: Sequence[Sequence[Optional[ComparisonOutcome]]],
) -> Tuple[List[int], np.ndarray]:
    """Order formations by pairwise wins, then mean, then lower variance.

    ``outcomes[i][j]`` compares i (first) with j (second); only the upper
    triangle is read. Equal counts half a win for each side.
    """
    k = len(posteriors)
    wins = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            o = outcomes[i][j]
            if o is ComparisonOutcome.FIRST_BETTER:
                wins[i, j] = 1.0
            elif o is ComparisonOutcome.SECOND_BETTER:
                wins[j, i] = 1.0
            elif o is ComparisonOutcome.EQUAL:
                wins[i, j] = wins[j, i] = 0.5
    score = wins.sum(axis=1)
    order = sorted(range(k), key=lambda i: (-score[i], -posteriors[i].mean, posteriors[i].variance, i))
    return order, wins
