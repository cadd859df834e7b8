"""Narrowest-interval searches over empirical distributions."""
import numpy as np

from .._jit import njit


@njit
def narrowest_window(sorted_values, count):
    """Start index of the narrowest run of ``count`` consecutive sorted values."""
    n = sorted_values.shape[0]
    best = np.inf
    best_i = 0
    for i in range(n - count + 1):
        w = sorted_values[i + count - 1] - sorted_values[i]
        if w < best:
            best = w
            best_i = i
    return best_i


@njit
def narrowest_weighted(sorted_values, weights, mass):
    """Narrowest [v[i], v[j]] whose cumulative weight reaches ``mass``.

    ``weights`` must be normalised and aligned with ``sorted_values``.
    Two-pointer sweep; returns (lo, hi, covered).
    """
    n = sorted_values.shape[0]
    best = np.inf
    best_lo = sorted_values[0]
    best_hi = sorted_values[n - 1]
    best_cov = 1.0
    j = 0
    acc = 0.0
    for i in range(n):
        while j < n and acc < mass:
            acc += weights[j]
            j += 1
        if acc < mass:
            break
        w = sorted_values[j - 1] - sorted_values[i]
        if w < best:
            best = w
            best_lo = sorted_values[i]
            best_hi = sorted_values[j - 1]
            best_cov = acc
        acc -= weights[i]
    return best_lo, best_hi, best_cov
