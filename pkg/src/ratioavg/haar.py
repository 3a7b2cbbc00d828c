"""Haar samplers for O_N / SO_N / USp_N and the Monte Carlo ratio-average
estimator, the formula-independent ground truth for the closed forms.

Sampling is driven by a counter-based stream: sample s of seed action is a
pure function of (seed, s), so estimates are bitwise reproducible for any
worker count.  Two backends compute the same block sums: a numba one
(parallel, default) and a pure-numpy one, selected with the
``RATIOAVG_BACKEND`` environment variable or the ``backend=`` argument.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import _mc_numpy
from ._rng import seed_base
from .closed_form import TorusPoint
from .errors import DomainError

_BACKENDS = ("numba", "numpy")


def available_backends() -> tuple[str, ...]:
    try:
        import numba  # noqa: F401

        return _BACKENDS
    except ImportError:  # pragma: no cover
        return ("numpy",)


def resolve_backend(backend: Optional[str] = None) -> str:
    choice = backend or os.environ.get("RATIOAVG_BACKEND") or None
    if choice is None:
        return available_backends()[0]
    if choice not in _BACKENDS:
        raise DomainError(f"backend must be one of {_BACKENDS}, got {choice!r}")
    if choice == "numba" and "numba" not in available_backends():  # pragma: no cover
        raise DomainError("numba backend requested but numba is not importable")
    return choice


def _run_blocks(backend: str):
    if backend == "numba":
        from . import _mc_numba

        return _mc_numba.run_blocks
    return _mc_numpy.run_blocks


def default_workers() -> int:
    env = os.environ.get("RATIOAVG_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass(frozen=True)
class GroupElement:
    family: str
    N: int
    matrix: np.ndarray

    def structure_residuals(self) -> dict[str, float]:
        """Max-abs defects of the defining relations (unitarity, det, form)."""
        u = self.matrix
        eye = np.eye(self.N)
        out = {"unitarity": float(np.abs(u.conj().T @ u - eye).max())}
        if self.family in ("O", "SO"):
            out["reality"] = float(np.abs(u.imag).max()) if np.iscomplexobj(u) else 0.0
            if self.family == "SO":
                out["determinant"] = float(abs(np.linalg.det(u) - 1.0))
        else:
            J = symplectic_form(self.N)
            out["symplectic"] = float(np.abs(u.T @ J @ u - J).max())
        return out


@dataclass(frozen=True)
class MCEstimate:
    mean: complex
    stderr_re: float
    stderr_im: float
    samples: int
    seed: int

    @property
    def stderr(self) -> tuple[float, float]:
        return (self.stderr_re, self.stderr_im)


@dataclass
class SampleStream:
    """Counter-based stream position: sample i is a pure function of (seed, i)."""

    seed: int
    index: int = 0

    def take(self) -> int:
        i = self.index
        self.index += 1
        return i


def symplectic_form(N: int) -> np.ndarray:
    m = N // 2
    J = np.zeros((N, N))
    J[:m, m:] = np.eye(m)
    J[m:, :m] = -np.eye(m)
    return J


def _check_group(family: str, N: int) -> None:
    if family not in ("O", "SO", "USp"):
        raise DomainError(f"unknown family {family!r}")
    if N < 1:
        raise DomainError("N must be >= 1")
    if family == "USp" and N % 2:
        raise DomainError("USp requires even N")


def sample_many(
    family: str, N: int, seed: int, count: int, start: int = 0
) -> np.ndarray:
    """Matrices for sample indices start .. start+count-1 (numpy path)."""
    _check_group(family, N)
    base = seed_base(seed)
    if family == "USp":
        return _mc_numpy.usp_matrices(base, start, count, N)
    return _mc_numpy.ortho_matrices(base, start, count, N, family == "SO")


def sample(family: str, N: int, stream: SampleStream) -> GroupElement:
    """Draw the next Haar-distributed element from the stream."""
    mat = sample_many(family, N, stream.seed, 1, stream.take())[0]
    return GroupElement(family, N, mat)


def integrand_from_eigenvalues(pt: TorusPoint, eigenvalues: np.ndarray) -> complex:
    num = 1.0 + 0j
    for xv in pt.x:
        num *= complex(np.prod(1.0 - xv * eigenvalues))
    den = 1.0 + 0j
    for yv in pt.y:
        den *= complex(np.prod(1.0 - yv * eigenvalues))
    return num / den


def integrand(pt: TorusPoint, u: GroupElement) -> complex:
    """prod_k Det(1 - x_k u) / prod_l Det(1 - y_l u) via the spectrum of u."""
    lam = np.linalg.eigvals(u.matrix.astype(np.complex128))
    return integrand_from_eigenvalues(pt, lam)


def _pairwise_block_sum(arr: np.ndarray) -> np.ndarray:
    """Fixed pairwise tree over the leading (block) axis."""
    while arr.shape[0] > 1:
        if arr.shape[0] % 2:
            pad = np.zeros((1,) + arr.shape[1:], dtype=arr.dtype)
            arr = np.concatenate([arr, pad], axis=0)
        arr = arr[0::2] + arr[1::2]
    return arr[0]


def mc_estimate_batch(
    family: str,
    N: int,
    points: Sequence[TorusPoint],
    samples: int,
    seed: int,
    workers: Optional[int] = None,
    backend: Optional[str] = None,
) -> list[MCEstimate]:
    """Estimates for several torus points from one shared set of samples.

    All points must share (p, q).  One spectral factorization per sample is
    reused across every point, which is what makes point batches cheap.
    """
    _check_group(family, N)
    if samples < 2:
        raise DomainError("samples must be >= 2")
    if not points:
        return []
    p, q = points[0].p, points[0].q
    if any(pt.p != p or pt.q != q for pt in points):
        raise DomainError("batched points must share (p, q)")
    xs = np.array([pt.x for pt in points], dtype=np.complex128).reshape(len(points), p)
    ys = np.array([pt.y for pt in points], dtype=np.complex128).reshape(len(points), q)

    backend = resolve_backend(backend)
    run = _run_blocks(backend)
    if backend == "numba":
        import numba

        limit = numba.config.NUMBA_NUM_THREADS
        request = min(workers or default_workers(), limit)
        previous = numba.get_num_threads()
        numba.set_num_threads(max(1, request))
        try:
            out_sum, out_sq = run(seed_base(seed), samples, N, family, xs, ys)
        finally:
            numba.set_num_threads(previous)
    else:
        out_sum, out_sq = run(seed_base(seed), samples, N, family, xs, ys)

    total = _pairwise_block_sum(out_sum)
    totsq = _pairwise_block_sum(out_sq)
    out = []
    for i in range(len(points)):
        mean = total[i] / samples
        var_re = max(totsq[i, 0] - samples * mean.real**2, 0.0) / (samples - 1)
        var_im = max(totsq[i, 1] - samples * mean.imag**2, 0.0) / (samples - 1)
        out.append(
            MCEstimate(
                mean=complex(mean),
                stderr_re=math.sqrt(var_re / samples),
                stderr_im=math.sqrt(var_im / samples),
                samples=samples,
                seed=seed,
            )
        )
    return out


def mc_estimate(
    family: str,
    N: int,
    pt: TorusPoint,
    samples: int,
    seed: int,
    workers: Optional[int] = None,
    backend: Optional[str] = None,
) -> MCEstimate:
    """Monte Carlo estimate of the raw ratio average at one torus point."""
    return mc_estimate_batch(family, N, [pt], samples, seed, workers, backend)[0]
