"""Numba backend: the hot per-sample kernels, parallel over fixed blocks.

Mirrors ``_mc_numpy`` exactly: same random stream, same block layout, same
accumulation structure.  Results are bitwise independent of the thread
count because each block writes only its own output slots and the final
reduction happens outside the kernel on a fixed tree.
"""

from __future__ import annotations

import warnings

import numpy as np

warnings.filterwarnings("ignore", message=".*TBB.*")  # old TBB probe is harmless

from numba import njit, prange

from ._mc_numpy import BLOCK

_GOLD = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_U53 = 2.0**-53
_U54 = 2.0**-54
_TWO_PI = 6.283185307179586476925287


@njit(cache=True, inline="always")
def _mix(z):
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


@njit(cache=True, inline="always")
def _gauss(base, t):
    u1 = _mix(base + (np.uint64(2) * np.uint64(t) + np.uint64(1)) * _GOLD)
    u2 = _mix(base + (np.uint64(2) * np.uint64(t) + np.uint64(2)) * _GOLD)
    f1 = (u1 >> np.uint64(11)) * _U53 + _U54
    f2 = (u2 >> np.uint64(11)) * _U53
    return np.sqrt(-2.0 * np.log(f1)) * np.cos(_TWO_PI * f2)


@njit(cache=True)
def _ortho_sample(base, N, special):
    a = np.empty((N, N), dtype=np.float64)
    for i in range(N):
        for j in range(N):
            a[i, j] = _gauss(base, i * N + j)
    q, r = np.linalg.qr(a)
    for j in range(N):
        if r[j, j] < 0:
            for i in range(N):
                q[i, j] = -q[i, j]
    if special and np.linalg.det(q) < 0:
        for i in range(N):
            q[i, 0] = -q[i, 0]
    return q


@njit(cache=True)
def _usp_sample(base, N):
    m = N // 2
    u = np.empty((N, N), dtype=np.complex128)
    v = np.empty(N, dtype=np.complex128)
    for k in range(m):
        for row in range(N):
            t = k * 4 * m + 2 * row
            v[row] = complex(_gauss(base, t), _gauss(base, t + 1))
        for c in range(k):
            for col in (m + c, c):  # v_c then its partner
                proj = 0.0 + 0.0j
                for row in range(N):
                    proj += np.conj(u[row, col]) * v[row]
                for row in range(N):
                    v[row] -= proj * u[row, col]
        norm = 0.0
        for row in range(N):
            norm += v[row].real ** 2 + v[row].imag ** 2
        norm = np.sqrt(norm)
        for row in range(N):
            v[row] /= norm
        for row in range(N):
            u[row, m + k] = v[row]
        for row in range(m):
            u[row, k] = np.conj(v[m + row])
            u[m + row, k] = -np.conj(v[row])
    return u


@njit(cache=True, inline="always")
def _accumulate(lam, xs, ys, out_sum, out_sq, b):
    npts = xs.shape[0]
    N = lam.shape[0]
    for pt in range(npts):
        num = 1.0 + 0.0j
        for k in range(xs.shape[1]):
            for a in range(N):
                num *= 1.0 - xs[pt, k] * lam[a]
        den = 1.0 + 0.0j
        for l in range(ys.shape[1]):
            for a in range(N):
                den *= 1.0 - ys[pt, l] * lam[a]
        val = num / den
        out_sum[b, pt] += val
        out_sq[b, pt, 0] += val.real**2
        out_sq[b, pt, 1] += val.imag**2


@njit(cache=True, parallel=True)
def _ortho_blocks(seedbase, samples, N, special, xs, ys, out_sum, out_sq):
    nblocks = out_sum.shape[0]
    for b in prange(nblocks):
        s0 = b * BLOCK
        s1 = min(samples, s0 + BLOCK)
        for s in range(s0, s1):
            base = _mix(seedbase + np.uint64(s + 1) * _GOLD)
            q = _ortho_sample(base, N, special)
            lam = np.linalg.eigvals(q.astype(np.complex128))
            _accumulate(lam, xs, ys, out_sum, out_sq, b)


@njit(cache=True, parallel=True)
def _usp_blocks(seedbase, samples, N, xs, ys, out_sum, out_sq):
    nblocks = out_sum.shape[0]
    for b in prange(nblocks):
        s0 = b * BLOCK
        s1 = min(samples, s0 + BLOCK)
        for s in range(s0, s1):
            base = _mix(seedbase + np.uint64(s + 1) * _GOLD)
            u = _usp_sample(base, N)
            lam = np.linalg.eigvals(u)
            _accumulate(lam, xs, ys, out_sum, out_sq, b)


def run_blocks(seedbase, samples: int, N: int, family: str, xs: np.ndarray, ys: np.ndarray):
    """Numba counterpart of ``_mc_numpy.run_blocks`` (same outputs)."""
    npts = xs.shape[0]
    nblocks = (samples + BLOCK - 1) // BLOCK
    out_sum = np.zeros((nblocks, npts), dtype=np.complex128)
    out_sq = np.zeros((nblocks, npts, 2), dtype=np.float64)
    if family == "USp":
        _usp_blocks(np.uint64(seedbase), samples, N, xs, ys, out_sum, out_sq)
    else:
        _ortho_blocks(
            np.uint64(seedbase), samples, N, family == "SO", xs, ys, out_sum, out_sq
        )
    return out_sum, out_sq
