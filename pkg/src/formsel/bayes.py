"""Beta-Binomial posteriors over a formation's corner-kick success rate.

With a Beta(a, b) prior and k successes out of n kicks the posterior is
Beta(a + k, b + n - k), so the evidence integral never has to be evaluated.
"""
from dataclasses import dataclass
from typing import Tuple

from .errors import DomainError, InvalidObservation, NotUnimodal
from .kernels import betafn


@dataclass(frozen=True)
class GameObservation:
    n: int
    k: int

    def __post_init__(self):
        if self.n < 0 or self.k < 0 or self.k > self.n:
            raise InvalidObservation(f"need 0 <= k <= n, got n={self.n}, k={self.k}")


@dataclass(frozen=True)
class HdiInterval:
    lo: float
    hi: float
    mass: float
    equal_tailed: bool = False

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi


@dataclass(frozen=True)
class BetaPosterior:
    alpha: float = 2.0
    beta: float = 2.0

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise ValueError(f"Beta parameters must be positive, got ({self.alpha}, {self.beta})")

    def update(self, obs: GameObservation) -> "BetaPosterior":
        return update(self, obs)

    @property
    def mean(self) -> float:
        return self.alpha / (self.alpha + self.beta)

    @property
    def variance(self) -> float:
        s = self.alpha + self.beta
        return self.alpha * self.beta / (s * s * (s + 1.0))

    def pdf(self, x: float) -> float:
        return evaluate(self, x)[0]

    def cdf(self, x: float) -> float:
        return evaluate(self, x)[1]

    def quantile(self, p: float) -> float:
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"probability {p} outside [0, 1]")
        return betafn.beta_ppf(float(p), float(self.alpha), float(self.beta))

    def hdi(self, mass: float = 0.95) -> HdiInterval:
        return hdi(self, mass)


DEFAULT_PRIOR = BetaPosterior(2.0, 2.0)


def update(prior: BetaPosterior, obs: GameObservation) -> BetaPosterior:
    if obs.k > obs.n or obs.k < 0:
        raise InvalidObservation(f"need 0 <= k <= n, got n={obs.n}, k={obs.k}")
    return BetaPosterior(prior.alpha + obs.k, prior.beta + obs.n - obs.k)


def summary(p: BetaPosterior) -> Tuple[float, float]:
    return p.mean, p.variance


def evaluate(p: BetaPosterior, x: float) -> Tuple[float, float]:
    """(pdf, cdf) at ``x``."""
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x={x} outside [0, 1]")
    a, b = float(p.alpha), float(p.beta)
    return betafn.beta_pdf(float(x), a, b), betafn.betainc(a, b, float(x))


def equal_tailed(p: BetaPosterior, mass: float = 0.95) -> HdiInterval:
    tail = (1.0 - mass) / 2.0
    return HdiInterval(p.quantile(tail), p.quantile(1.0 - tail), mass, equal_tailed=True)


def hdi(p: BetaPosterior, mass: float = 0.95) -> HdiInterval:
    if not 0.0 < mass < 1.0:
        raise DomainError(f"mass {mass} outside (0, 1)")
    if p.alpha <= 1.0 or p.beta <= 1.0:
        raise NotUnimodal(f"Beta({p.alpha}, {p.beta}) has no interior mode")
    lo, hi, _ = betafn.beta_hdi(float(p.alpha), float(p.beta), float(mass))
    return HdiInterval(lo, hi, mass)


def credible_interval(p: BetaPosterior, mass: float = 0.95) -> HdiInterval:
    """HDI when unimodal, else the equal-tailed interval (flagged)."""
    try:
        return hdi(p, mass)
    except NotUnimodal:
        return equal_tailed(p, mass)
