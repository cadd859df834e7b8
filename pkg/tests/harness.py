"""Shared, cached experiment runs used by the acceptance suite and the
statistical validation checks."""
import time
from functools import lru_cache

from formsel.validation import VALIDATION_CONFIG, validate

VALIDATION_SEEDS = tuple(range(10))


@lru_cache(maxsize=None)
def validation_report(block_size: int):
    """(report, seconds) for 10 bins x 10 pairs x 10 seeds."""
    t0 = time.perf_counter()
    report = validate(block_size, VALIDATION_SEEDS, VALIDATION_CONFIG)
    return report, time.perf_counter() - t0


def adjacent_inversions(values):
    return sum(b < a for a, b in zip(values, values[1:]))
