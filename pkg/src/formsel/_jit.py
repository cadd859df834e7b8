"""Optional numba acceleration.

Set ``FORMSEL_DISABLE_NUMBA=1`` (or run without numba installed) to execute the
kernels as plain Python/numpy. Both paths compute the same values.
"""
import os

_DISABLED = os.environ.get("FORMSEL_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    if _DISABLED:
        raise ImportError
    import numba

    HAS_NUMBA = True
except ImportError:
    numba = None
    HAS_NUMBA = False


def njit(*args, **kwargs):
    """``numba.njit`` when enabled, identity decorator otherwise."""
    kwargs.setdefault("cache", True)
    if HAS_NUMBA:
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]):
        return args[0]

    def wrap(fn):
        return fn

    return wrap


def python_impl(fn):
    """Return the uncompiled function behind a kernel (itself when not jitted)."""
    return getattr(fn, "py_func", fn)
