"""Hot numeric kernels with numba-compiled and pure-numpy implementations.

The numba path is used when it is importable and the environment variable
``CMAINJ_NUMBA`` is not set to ``0``/``false``/``off``.  Both
implementations are exported with ``_np``/``_nb`` suffixes so the test
suite can check agreement and ``benchmarks/bench_kernels.py`` can time
them against each other; the unsuffixed names are the selected backend.
"""

from __future__ import annotations

import os

import numpy as np

_flag = os.environ.get("CMAINJ_NUMBA", "1").strip().lower()
_want_numba = _flag not in ("0", "false", "off")

try:
    from numba import njit

    _have_numba = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _have_numba = False

NUMBA_ENABLED = _want_numba and _have_numba


def backend() -> str:
    return "numba" if NUMBA_ENABLED else "numpy"


# ---------------------------------------------------------------- numpy path


def sphere_batch_np(x: np.ndarray) -> np.ndarray:
    return np.einsum("ij,ij->i", x, x)


def rosenbrock_batch_np(x: np.ndarray) -> np.ndarray:
    head = x[:, :-1]
    d = x[:, 1:] - head * head
    return np.sum(100.0 * d * d + (1.0 - head) ** 2, axis=1)


def rastrigin_batch_np(x: np.ndarray) -> np.ndarray:
    return 10.0 * x.shape[1] + np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x), axis=1)


def weighted_outer_np(y: np.ndarray, w: np.ndarray) -> np.ndarray:
    """sum_i w[i] * outer(y[i], y[i]) for y of shape (mu, n)."""
    return (y.T * w) @ y


def mahalanobis_norms_np(invroot: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Row-wise ||invroot @ y_i|| for y of shape (m, n); invroot symmetric."""
    t = y @ invroot
    return np.sqrt(np.einsum("ij,ij->i", t, t))


# ---------------------------------------------------------------- numba path

if NUMBA_ENABLED:

    @njit(cache=True)
    def sphere_batch_nb(x):
        m, n = x.shape
        out = np.empty(m)
        for i in range(m):
            s = 0.0
            for j in range(n):
                s += x[i, j] * x[i, j]
            out[i] = s
        return out

    @njit(cache=True)
    def rosenbrock_batch_nb(x):
        m, n = x.shape
        out = np.empty(m)
        for i in range(m):
            s = 0.0
            for j in range(n - 1):
                d = x[i, j + 1] - x[i, j] * x[i, j]
                e = 1.0 - x[i, j]
                s += 100.0 * d * d + e * e
            out[i] = s
        return out

    @njit(cache=True)
    def rastrigin_batch_nb(x):
        m, n = x.shape
        out = np.empty(m)
        for i in range(m):
            s = 10.0 * n
            for j in range(n):
                s += x[i, j] * x[i, j] - 10.0 * np.cos(2.0 * np.pi * x[i, j])
            out[i] = s
        return out

    @njit(cache=True)
    def weighted_outer_nb(y, w):
        mu, n = y.shape
        out = np.zeros((n, n))
        for i in range(mu):
            wi = w[i]
            for a in range(n):
                va = wi * y[i, a]
                for b in range(n):
                    out[a, b] += va * y[i, b]
        return out

    @njit(cache=True)
    def mahalanobis_norms_nb(invroot, y):
        m, n = y.shape
        out = np.empty(m)
        for i in range(m):
            s = 0.0
            for a in range(n):
                t = 0.0
                for b in range(n):
                    t += invroot[a, b] * y[i, b]
                s += t * t
            out[i] = np.sqrt(s)
        return out

    sphere_batch = sphere_batch_nb
    rosenbrock_batch = rosenbrock_batch_nb
    rastrigin_batch = rastrigin_batch_nb
    weighted_outer = weighted_outer_nb
    mahalanobis_norms = mahalanobis_norms_nb
else:
    sphere_batch = sphere_batch_np
    rosenbrock_batch = rosenbrock_batch_np
    rastrigin_batch = rastrigin_batch_np
    weighted_outer = weighted_outer_np
    mahalanobis_norms = mahalanobis_norms_np
