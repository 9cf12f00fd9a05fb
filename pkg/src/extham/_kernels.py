"""Hot numeric kernels: weighted 5-point stencil and row-wise antitonic regression.

Every kernel exists twice: a numba ``@njit`` version (``*_jit``) and a pure
numpy version (``*_np``) with identical floating-point semantics. The module
selects the active implementation at import time:

* numba is used when importable, unless ``EXTHAM_DISABLE_NUMBA`` is set to
  ``1``/``true``/``yes`` in the environment;
* otherwise the numpy path is used.

Both paths are kept importable so tests and ``benchmarks/bench_kernels.py``
can compare them directly. The numpy stencil is written so that each node
evaluates the same operation tree as the scalar loop, which makes the two
paths bitwise identical (asserted in the test suite).
"""

from __future__ import annotations

import os

import numpy as np

_DISABLE = os.environ.get("EXTHAM_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    njit = None
    _HAVE_NUMBA = False

NUMBA_ENABLED = _HAVE_NUMBA and not _DISABLE


# ---------------------------------------------------------------------------
# stiffness application
#
# (K u)_{ij} accumulates the negative flux divergence of the weighted
# gradient, so that u.K u equals the discrete Dirichlet energy
# sum_faces weight * (difference)^2. Rows at i = 0 and i = I-1 are left at
# zero: those are radial boundary rows whose equations are not part of the
# stiffness form. Angular end rows use the no-flux closure (symmetry of
# invariant profiles across theta = 0 and pi/2).
# ---------------------------------------------------------------------------


def apply_stiffness_np(u, fr, g, gf, h2, out):
    """out[i,j] = G_j * (radial flux div) + H2_i * (angular flux div), interior i."""
    out[0, :] = 0.0
    out[-1, :] = 0.0
    fru = fr[:, None] * (u[1:, :] - u[:-1, :])
    out[1:-1, :] = g[None, :] * (fru[:-1, :] - fru[1:, :])
    gfu = gf[None, :] * (u[:, 1:] - u[:, :-1])
    out[1:-1, 0] += h2[1:-1] * (-gfu[1:-1, 0])
    out[1:-1, -1] += h2[1:-1] * gfu[1:-1, -1]
    out[1:-1, 1:-1] += h2[1:-1, None] * (gfu[1:-1, :-1] - gfu[1:-1, 1:])
    return out


def _apply_stiffness_loop(u, fr, g, gf, h2, out):
    ni, nj = u.shape
    for j in range(nj):
        out[0, j] = 0.0
        out[ni - 1, j] = 0.0
    for i in range(1, ni - 1):
        for j in range(nj):
            rad = fr[i - 1] * (u[i, j] - u[i - 1, j]) - fr[i] * (u[i + 1, j] - u[i, j])
            if j == 0:
                ang = -(gf[0] * (u[i, 1] - u[i, 0]))
            elif j == nj - 1:
                ang = gf[nj - 2] * (u[i, nj - 1] - u[i, nj - 2])
            else:
                ang = gf[j - 1] * (u[i, j] - u[i, j - 1]) - gf[j] * (u[i, j + 1] - u[i, j])
            out[i, j] = g[j] * rad + h2[i] * ang
    return out


# The loop version above is the reference semantics; the vectorized numpy
# version computes node-for-node the same expressions. The numba kernel jits
# the loop.
if _HAVE_NUMBA:
    apply_stiffness_jit = njit(cache=True, fastmath=False)(_apply_stiffness_loop)
else:  # pragma: no cover
    apply_stiffness_jit = _apply_stiffness_loop


# ---------------------------------------------------------------------------
# weighted antitonic regression (pool adjacent violators), one row
#
# Solves min sum_j w_j (x_j - y_j)^2 over nonincreasing x. Weights must be
# strictly positive.
# ---------------------------------------------------------------------------


def _pava_antitonic_loop(y, w, vals, wts, lens, out):
    n = y.shape[0]
    top = 0
    for j in range(n):
        v = y[j]
        ww = w[j]
        ln = 1
        while top > 0 and vals[top - 1] < v:
            v = (v * ww + vals[top - 1] * wts[top - 1]) / (ww + wts[top - 1])
            ww = ww + wts[top - 1]
            ln = ln + lens[top - 1]
            top -= 1
        vals[top] = v
        wts[top] = ww
        lens[top] = ln
        top += 1
    k = 0
    for b in range(top):
        for _ in range(lens[b]):
            out[k] = vals[b]
            k += 1
    return out


if _HAVE_NUMBA:
    _pava_antitonic_jit = njit(cache=True, fastmath=False)(_pava_antitonic_loop)
else:  # pragma: no cover
    _pava_antitonic_jit = _pava_antitonic_loop


def pava_antitonic_np(y, w):
    """Pure-python/numpy PAVA for one row; same block algebra as the kernel."""
    n = y.shape[0]
    vals = np.empty(n)
    wts = np.empty(n)
    lens = np.empty(n, dtype=np.int64)
    out = np.empty(n)
    return _pava_antitonic_loop(y, w, vals, wts, lens, out)


def pava_antitonic_jit(y, w):
    n = y.shape[0]
    vals = np.empty(n)
    wts = np.empty(n)
    lens = np.empty(n, dtype=np.int64)
    out = np.empty(n)
    return _pava_antitonic_jit(y, w, vals, wts, lens, out)


def antitonic_rows_np(u, w):
    """Row-by-row weighted nonincreasing regression of a 2-D field."""
    out = np.empty_like(u)
    for i in range(u.shape[0]):
        out[i, :] = pava_antitonic_np(u[i, :], w)
    return out


def _antitonic_rows_loop(u, w, out):
    ni, nj = u.shape
    vals = np.empty(nj)
    wts = np.empty(nj)
    lens = np.empty(nj, dtype=np.int64)
    row = np.empty(nj)
    for i in range(ni):
        _pava_antitonic_loop(u[i, :], w, vals, wts, lens, row)
        for j in range(nj):
            out[i, j] = row[j]
    return out


if _HAVE_NUMBA:
    @njit(cache=True, fastmath=False)
    def antitonic_rows_jit(u, w):  # pragma: no cover - exercised via dispatch
        ni, nj = u.shape
        out = np.empty_like(u)
        vals = np.empty(nj)
        wts = np.empty(nj)
        lens = np.empty(nj, dtype=np.int64)
        row = np.empty(nj)
        for i in range(ni):
            _pava_antitonic_jit(u[i, :], w, vals, wts, lens, row)
            for j in range(nj):
                out[i, j] = row[j]

        return out
else:  # pragma: no cover
    def antitonic_rows_jit(u, w):
        out = np.empty_like(u)
        return _antitonic_rows_loop(u, w, out)


# active implementations
if NUMBA_ENABLED:
    def apply_stiffness(u, fr, g, gf, h2, out):
        return apply_stiffness_jit(u, fr, g, gf, h2, out)

    antitonic_rows = antitonic_rows_jit
else:  # pragma: no cover - depends on environment
    apply_stiffness = apply_stiffness_np
    antitonic_rows = antitonic_rows_np
