import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special, stats

from formsel.bayes import (
    DEFAULT_PRIOR,
    BetaPosterior,
    GameObservation,
    credible_interval,
    equal_tailed,
    evaluate,
    hdi,
    summary,
    update,
)
from formsel.errors import DomainError, InvalidObservation, NotUnimodal
from formsel.kernels.betafn import beta_pdf_array

from .oracles.quadrature import quadrature_posterior


def bisect(f, lo, hi, tol=1e-15):
    flo = f(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if (f(mid) > 0) == (flo > 0):
            lo, flo = mid, f(mid)
        else:
            hi = mid
    return 0.5 * (lo + hi)


class TestUpdate:
    def test_typical_game(self):
        assert update(DEFAULT_PRIOR, GameObservation(37, 10)) == BetaPosterior(12, 29)

    def test_empty_game(self):
        assert update(DEFAULT_PRIOR, GameObservation(0, 0)) == DEFAULT_PRIOR

    def test_batches(self):
        p = DEFAULT_PRIOR.update(GameObservation(20, 5)).update(GameObservation(17, 5))
        assert p == update(DEFAULT_PRIOR, GameObservation(37, 10))

    def test_invalid(self):
        with pytest.raises(InvalidObservation):
            GameObservation(3, 4)
        with pytest.raises(InvalidObservation):
            GameObservation(-1, 0)

    @given(st.lists(st.tuples(st.integers(0, 50), st.integers(0, 50)).map(lambda t: (max(t), min(t))), max_size=8))
    def test_associative_and_bounded(self, games):
        p = DEFAULT_PRIOR
        for n, k in games:
            p = p.update(GameObservation(n, k))
        total = GameObservation(sum(n for n, _ in games), sum(k for _, k in games))
        assert p == DEFAULT_PRIOR.update(total)
        assert p.alpha >= 2 and p.beta >= 2

    def test_conjugacy_oracle(self):
        rng = np.random.default_rng(21)
        for _ in range(20):
            a, b = rng.uniform(1, 10, 2)
            n = int(rng.integers(0, 13))
            k = int(rng.integers(0, n + 1))
            x, ref = quadrature_posterior(a, b, n, k)
            post = update(BetaPosterior(a, b), GameObservation(n, k))
            assert np.abs(beta_pdf_array(post.alpha, post.beta, x) - ref).max() < 1e-8


class TestSummary:
    def test_prior(self):
        assert summary(DEFAULT_PRIOR) == (0.5, 0.05)

    def test_posterior_mean(self):
        assert BetaPosterior(12, 29).mean == pytest.approx(12 / 41, abs=1e-15)

    def test_concentration(self):
        assert BetaPosterior(20, 20).variance < BetaPosterior(2, 2).variance


class TestEvaluate:
    def test_polynomial_cdf(self):
        for x in np.linspace(0, 1, 41):
            assert evaluate(DEFAULT_PRIOR, x)[1] == pytest.approx(3 * x**2 - 2 * x**3, abs=1e-14)

    def test_pdf_midpoint(self):
        assert DEFAULT_PRIOR.pdf(0.5) == pytest.approx(1.5, abs=1e-14)

    def test_bounds(self):
        assert DEFAULT_PRIOR.cdf(0.0) == 0.0
        assert DEFAULT_PRIOR.cdf(1.0) == 1.0

    def test_domain(self):
        with pytest.raises(DomainError):
            evaluate(DEFAULT_PRIOR, 1.5)
        with pytest.raises(DomainError):
            DEFAULT_PRIOR.quantile(-0.1)

    def test_cdf_against_scipy(self):
        rng = np.random.default_rng(1)
        for _ in range(300):
            a, b = np.exp(rng.uniform(np.log(0.5), np.log(2000), 2))
            x = rng.uniform()
            assert BetaPosterior(a, b).cdf(x) == pytest.approx(special.betainc(a, b, x), abs=1e-10)

    @pytest.mark.parametrize("ab", [(2, 2), (12, 29), (1.5, 400), (300, 3), (450, 480)])
    def test_quantile_round_trip(self, ab):
        p = BetaPosterior(*ab)
        for t in np.arange(0.001, 1.0, 0.001):
            assert abs(p.cdf(p.quantile(t)) - t) <= 1e-8


class TestHdi:
    def test_symmetric_prior_matches_root(self):
        iv = hdi(DEFAULT_PRIOR, 0.95)
        lo = bisect(lambda x: 3 * x**2 - 2 * x**3 - 0.025, 0.0, 0.5)
        assert iv.lo == pytest.approx(lo, abs=1e-3)
        assert iv.hi == pytest.approx(1 - lo, abs=1e-3)
        assert iv.lo == pytest.approx(0.094, abs=1e-3) and iv.hi == pytest.approx(0.906, abs=1e-3)

    @pytest.mark.parametrize("a", [1.5, 2, 7.3, 50, 480])
    @pytest.mark.parametrize("mass", [0.5, 0.9, 0.95])
    def test_symmetric(self, a, mass):
        iv = hdi(BetaPosterior(a, a), mass)
        assert iv.lo + iv.hi == pytest.approx(1.0, abs=1e-8)

    def test_narrows_with_data(self):
        assert hdi(BetaPosterior(120, 290)).width < hdi(BetaPosterior(12, 29)).width

    def test_not_unimodal(self):
        with pytest.raises(NotUnimodal):
            hdi(BetaPosterior(1.0, 5.0))
        iv = credible_interval(BetaPosterior(0.5, 5.0))
        assert iv.equal_tailed and iv == equal_tailed(BetaPosterior(0.5, 5.0))

    def test_mass_domain(self):
        with pytest.raises(DomainError):
            hdi(DEFAULT_PRIOR, 1.0)

    @settings(max_examples=60, deadline=None)
    @given(st.floats(2, 500), st.floats(2, 500), st.sampled_from([0.8, 0.9, 0.95, 0.99]))
    def test_properties(self, a, b, mass):
        iv = hdi(BetaPosterior(a, b), mass)
        assert 0 <= iv.lo <= iv.hi <= 1
        assert special.betainc(a, b, iv.hi) - special.betainc(a, b, iv.lo) == pytest.approx(mass, abs=1e-6)
        d_lo, d_hi = stats.beta.pdf([iv.lo, iv.hi], a, b)
        assert d_lo == pytest.approx(d_hi, rel=1e-5)
        et = stats.beta.ppf([(1 - mass) / 2, (1 + mass) / 2], a, b)
        assert iv.width <= et[1] - et[0] + 1e-8

    def test_width_is_optimal(self):
        # brute-force scan of the tail parameter around the optimum
        for a, b in [(12, 29), (3, 40), (200, 7)]:
            iv = hdi(BetaPosterior(a, b))
            ts = np.linspace(0, 0.05, 20001)
            widths = stats.beta.ppf(ts + 0.95, a, b) - stats.beta.ppf(ts, a, b)
            assert iv.width <= widths.min() + 1e-8
