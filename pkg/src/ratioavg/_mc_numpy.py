"""Pure-numpy sampler backend: block-vectorized, worker-count independent.

The block layout (size ``BLOCK``, indexed by sample) and the per-sample
random stream are shared with the numba backend, so both produce the same
statistics; tiny ulp-level differences remain because numpy's vectorized
libm kernels round differently than scalar libm.
"""

from __future__ import annotations

import numpy as np

from ._rng import gaussians, sample_bases

BLOCK = 1024


def ortho_matrices(seedbase, start: int, count: int, N: int, special: bool) -> np.ndarray:
    """Haar orthogonal matrices for samples start..start+count-1.

    QR of a Gaussian matrix with the R-diagonal made positive; for SO
    (special=True) matrices with det = -1 get their first column negated.
    """
    bases = sample_bases(seedbase, start, count)
    mats = gaussians(bases, N * N).reshape(count, N, N)
    q, r = np.linalg.qr(mats)
    diag = np.diagonal(r, axis1=1, axis2=2)
    q = q * np.where(diag >= 0, 1.0, -1.0)[:, None, :]
    if special:
        neg = np.linalg.det(q) < 0
        q[neg, :, 0] = -q[neg, :, 0]
    return q


def usp_matrices(seedbase, start: int, count: int, N: int) -> np.ndarray:
    """Haar unitary-symplectic matrices (N = 2m) via quaternionic Gram-Schmidt.

    Column k of the quaternionic frame is a complex Gaussian vector in
    C^(2m); each is orthogonalized against all previously accepted columns
    and their symplectic partners J conj(v), then normalized.  The output
    columns are ordered [partners | vectors] so that u^T J u = J with
    J = [[0, I], [-I, 0]].
    """
    m = N // 2
    bases = sample_bases(seedbase, start, count)
    g = gaussians(bases, N * N)
    u = np.empty((count, N, N), dtype=np.complex128)
    for k in range(m):
        re = g[:, k * 4 * m : k * 4 * m + 4 * m : 2]
        im = g[:, k * 4 * m + 1 : k * 4 * m + 4 * m : 2]
        v = re + 1j * im
        for c in range(k):
            for col in (m + c, c):  # v_c then its partner
                w = u[:, :, col]
                proj = np.einsum("br,br->b", np.conj(w), v)
                v = v - proj[:, None] * w
        norm = np.sqrt(np.einsum("br,br->b", np.conj(v), v).real)
        v = v / norm[:, None]
        u[:, :, m + k] = v
        u[:, :m, k] = np.conj(v[:, m:])
        u[:, m:, k] = -np.conj(v[:, :m])
    return u


def _point_values(lam: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    num = np.ones(lam.shape[0], dtype=np.complex128)
    for xv in x:
        num = num * np.prod(1.0 - xv * lam, axis=1)
    den = np.ones(lam.shape[0], dtype=np.complex128)
    for yv in y:
        den = den * np.prod(1.0 - yv * lam, axis=1)
    return num / den


def run_blocks(seedbase, samples: int, N: int, family: str, xs: np.ndarray, ys: np.ndarray):
    """Per-block sums (sum v, sum Re(v)^2, sum Im(v)^2) for each torus point."""
    npts = xs.shape[0]
    nblocks = (samples + BLOCK - 1) // BLOCK
    out_sum = np.zeros((nblocks, npts), dtype=np.complex128)
    out_sq = np.zeros((nblocks, npts, 2), dtype=np.float64)
    for b in range(nblocks):
        s0 = b * BLOCK
        s1 = min(samples, s0 + BLOCK)
        if family == "USp":
            mats = usp_matrices(seedbase, s0, s1 - s0, N)
            lam = np.linalg.eigvals(mats)
        else:
            q = ortho_matrices(seedbase, s0, s1 - s0, N, family == "SO")
            lam = np.linalg.eigvals(q.astype(np.complex128))
        for pt in range(npts):
            vals = _point_values(lam, xs[pt], ys[pt])
            out_sum[b, pt] = np.sum(vals)
            out_sq[b, pt, 0] = np.sum(vals.real**2)
            out_sq[b, pt, 1] = np.sum(vals.imag**2)
    return out_sum, out_sq
