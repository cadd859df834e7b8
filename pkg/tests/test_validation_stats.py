"""Statistical invariants of the validation harness over 10 seeds.

Reuses the cached 10 bins x 10 pairs x 10 seeds reports from the acceptance
suite, so running both costs one experiment per block size.
"""
import numpy as np
import pytest
from scipy import stats

from formsel.validation import DEFAULT_BINS

from .harness import adjacent_inversions, validation_report

pytestmark = pytest.mark.slow


@pytest.mark.parametrize("block_size", [20, 60])
def test_rate_monotone_one_inversion(block_size):
    rep, _ = validation_report(block_size)
    assert adjacent_inversions(rep.rates()) <= 1


@pytest.mark.parametrize("block_size", [20, 60])
def test_samples_decrease_with_gap(block_size):
    rep, _ = validation_report(block_size)
    bins = [b for b, (lo, _) in enumerate(DEFAULT_BINS) if lo >= 0.03 - 1e-12]
    medians = [np.median([r.samples for r in rep.in_bin(b)]) for b in bins]
    # decreasing trend across bins (Kendall's tau, one-sided), end to end
    tau = stats.kendalltau(bins, medians, alternative="less")
    assert tau.pvalue < 0.05
    assert medians[-1] < medians[0]


@pytest.mark.parametrize("block_size", [20, 60])
def test_bookkeeping(block_size):
    rep, _ = validation_report(block_size)
    assert len(rep.results) == 1000
    assert [len(rep.in_bin(b)) for b in range(10)] == [100] * 10
    assert all(r.samples == r.blocks * block_size for r in rep.results)
