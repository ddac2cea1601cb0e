"""Compiled inner loops for Dirichlet-sum evaluation on uniform t-grids.

Every kernel exploits the same structure: on a uniform grid t_k = t0 + k*d
the phase factors n^{-i t_k} form geometric progressions in k, so a block
of grid values costs one complex multiply-add per (term, point) instead of
a transcendental call.  Phase drift of the recurrence is bounded by
(block length) * eps, so blocks are re-anchored with exact exponentials
every BLOCK points and results are bit-reproducible for a fixed block
size, independent of how blocks are distributed over worker threads.
"""

import numpy as np
from numba import njit

BLOCK = 32768  # grid points per anchored block; fixed, never tuned per run


@njit(cache=True, nogil=True)
def geom_sums(c0, ratio, K):
    """out[k] = sum_n c0[n] * ratio[n]**k for k = 0..K-1.

    c0 carries coefficient * anchor phase; ratio the per-step phase.
    """
    N = c0.shape[0]
    out = np.empty(K, dtype=np.complex128)
    cur = c0.copy()
    for k in range(K):
        s = 0.0 + 0.0j
        for n in range(N):
            s += cur[n]
            cur[n] *= ratio[n]
        out[k] = s
    return out


@njit(cache=True, nogil=True)
def geom_sums_powers(c0, ratio, K, ell):
    """out[k] = (sum_n c0[n]*ratio[n]**k)**ell, for high-moment integrands."""
    N = c0.shape[0]
    out = np.empty(K, dtype=np.float64)
    cur = c0.copy()
    for k in range(K):
        s = 0.0 + 0.0j
        for n in range(N):
            s += cur[n]
            cur[n] *= ratio[n]
        a = s.real * s.real + s.imag * s.imag
        out[k] = a**ell
    return out


@njit(cache=True, nogil=True)
def lerp_table(x, table, x0, inv_h):
    """Linear interpolation of a uniform table at points x."""
    out = np.empty(x.shape[0])
    last = table.shape[0] - 2
    for i in range(x.shape[0]):
        u = (x[i] - x0) * inv_h
        j = int(u)
        if j < 0:
            j = 0
        elif j > last:
            j = last
        f = u - j
        out[i] = table[j] * (1.0 - f) + table[j + 1] * f
    return out
