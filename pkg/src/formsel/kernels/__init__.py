"""Compiled numeric kernels (numba when available, plain Python otherwise)."""
