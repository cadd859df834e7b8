"""Scalar Beta-distribution kernels: density, regularized incomplete beta,
quantile and highest-density interval search.

The incomplete beta uses the modified Lentz evaluation of the classical
continued fraction, switching to the symmetric form on the far side of the
mean so the fraction always converges quickly.
"""
import math

import numpy as np

from .._jit import njit

_FPMIN = 1e-300
_EPS = 1e-16
_MAX_CF_ITER = 20000
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@njit
def log_beta_fn(a, b):
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


@njit
def beta_logpdf(x, a, b):
    if x <= 0.0:
        if a < 1.0:
            return math.inf
        if a == 1.0:
            return -log_beta_fn(a, b)
        return -math.inf
    if x >= 1.0:
        if b < 1.0:
            return math.inf
        if b == 1.0:
            return -log_beta_fn(a, b)
        return -math.inf
    return (a - 1.0) * math.log(x) + (b - 1.0) * math.log1p(-x) - log_beta_fn(a, b)


@njit
def beta_pdf(x, a, b):
    return math.exp(beta_logpdf(x, a, b))


@njit
def _betacf(a, b, x):
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_CF_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h


@njit
def betainc(a, b, x):
    """Regularized incomplete beta I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    log_front = a * math.log(x) + b * math.log1p(-x) - log_beta_fn(a, b)
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(log_front) * _betacf(a, b, x) / a
    return 1.0 - math.exp(log_front) * _betacf(b, a, 1.0 - x) / b


@njit
def _split(lo, hi):
    # geometric midpoint across decades, arithmetic otherwise
    if lo > 0.0 and hi > 4.0 * lo:
        return math.sqrt(lo * hi)
    return 0.5 * (lo + hi)


@njit
def beta_ppf(p, a, b):
    """Quantile of Beta(a, b): safeguarded Newton on the CDF."""
    if p <= 0.0:
        return 0.0
    if p >= 1.0:
        return 1.0
    lo = 0.0
    hi = 1.0
    lbeta = log_beta_fn(a, b)
    mean = a / (a + b)
    # leading-order tail expansions I_x ~ x^a / (a B) and 1 - I_x ~ (1-x)^b / (b B)
    x_left = math.exp((math.log(p) + math.log(a) + lbeta) / a)
    x_right = 1.0 - math.exp((math.log1p(-p) + math.log(b) + lbeta) / b)
    if x_left < mean:
        x = x_left
    elif x_right > mean:
        x = x_right
    else:
        x = mean
    if not (0.0 < x < 1.0):
        x = mean
    for _ in range(400):
        f = betainc(a, b, x) - p
        if f == 0.0:
            return x
        if f < 0.0:
            lo = x
        else:
            hi = x
        dens = beta_pdf(x, a, b)
        step_ok = False
        x_new = x
        if dens > 0.0 and math.isfinite(dens):
            x_new = x - f / dens
            step_ok = lo < x_new < hi
        if not step_ok:
            x_new = _split(lo, hi)
        if abs(x_new - x) <= 1e-16 * max(x, 1e-300) or hi - lo <= 1e-17 * max(hi, 1e-300):
            return x_new
        x = x_new
    return x


@njit
def hdi_width_at(t, mass, a, b):
    return beta_ppf(t + mass, a, b) - beta_ppf(t, a, b)


@njit
def _density_gap(t, mass, a, b):
    # log pdf(lo) - log pdf(hi); increasing in t, zero at the narrowest window
    return beta_logpdf(beta_ppf(t, a, b), a, b) - beta_logpdf(beta_ppf(t + mass, a, b), a, b)


@njit
def beta_hdi(a, b, mass):
    """Narrowest interval of Beta(a, b) holding ``mass``; requires a, b > 1.

    Golden-section search on the lower-tail probability, then a bisection
    polish on the equal-density condition inside the final bracket.
    Returns (lo, hi, t).
    """
    left = 0.0
    right = 1.0 - mass
    x1 = right - _INV_PHI * (right - left)
    x2 = left + _INV_PHI * (right - left)
    f1 = hdi_width_at(x1, mass, a, b)
    f2 = hdi_width_at(x2, mass, a, b)
    for _ in range(200):
        if right - left < 1e-7 * (1.0 - mass):
            break
        if f1 < f2:
            right = x2
            x2 = x1
            f2 = f1
            x1 = right - _INV_PHI * (right - left)
            f1 = hdi_width_at(x1, mass, a, b)
        else:
            left = x1
            x1 = x2
            f1 = f2
            x2 = left + _INV_PHI * (right - left)
            f2 = hdi_width_at(x2, mass, a, b)
    # widen slightly so the root is bracketed despite the golden tolerance
    pad = right - left
    left = max(1e-300, left - pad)
    right = min(1.0 - mass, right + pad)
    g_left = _density_gap(left, mass, a, b)
    g_right = _density_gap(right, mass, a, b)
    if g_left < 0.0 < g_right:
        for _ in range(400):
            mid = _split(left, right)
            if mid <= left or mid >= right:
                break
            g = _density_gap(mid, mass, a, b)
            if g < 0.0:
                left = mid
            elif g > 0.0:
                right = mid
            else:
                left = mid
                right = mid
                break
    t = 0.5 * (left + right)
    return beta_ppf(t, a, b), beta_ppf(t + mass, a, b), t


@njit
def betainc_array(a, b, xs):
    out = np.empty(xs.shape[0])
    for i in range(xs.shape[0]):
        out[i] = betainc(a, b, xs[i])
    return out


@njit
def beta_pdf_array(a, b, xs):
    out = np.empty(xs.shape[0])
    for i in range(xs.shape[0]):
        out[i] = beta_pdf(xs[i], a, b)
    return out
