"""Small-rank deterministic oracle: Weyl integration reduced to angle
integrals, evaluated with tensor Gauss-Legendre quadrature.

Supported groups and their eigenvalue angle densities (theta on [0, pi]
unless noted):

    SO_2   uniform on [0, 2pi],              {e^(i t), e^(-i t)}
    SO_3   (1 - cos t)/pi,                   {1, e^(i t), e^(-i t)}
    SO_4   ~ (cos t1 - cos t2)^2,            {e^(+-i t1), e^(+-i t2)}
    USp_2  (2/pi) sin^2 t,                   {e^(i t), e^(-i t)}
    USp_4  ~ (cos t1 - cos t2)^2 sin^2 t1 sin^2 t2
    O_2    half SO_2 plus half the reflection component {+1, -1}
    O_3    half SO_3 plus half of -SO_3: {-1, -e^(+-i t)}

Densities are normalized numerically so quad of 1 is exactly 1 up to float
roundoff, which removes constant-factor mistakes by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .closed_form import TorusPoint
from .errors import UnsupportedGroup

SUPPORTED = (
    ("SO", 2),
    ("SO", 3),
    ("SO", 4),
    ("O", 2),
    ("O", 3),
    ("USp", 2),
    ("USp", 4),
)


@dataclass(frozen=True)
class QuadSpec:
    family: str
    N: int
    nodes: int = 96

    def __post_init__(self):
        if (self.family, self.N) not in SUPPORTED:
            raise UnsupportedGroup(
                f"quadrature supports {SUPPORTED}, got ({self.family}, {self.N})"
            )
        if self.nodes < 2:
            raise ValueError("need at least 2 nodes per angle")


def _leggauss(nodes: int, a: float, b: float):
    t, w = np.polynomial.legendre.leggauss(nodes)
    return 0.5 * (b - a) * t + 0.5 * (a + b), 0.5 * (b - a) * w


def _normalized(weights: np.ndarray) -> np.ndarray:
    return weights / weights.sum()


@lru_cache(maxsize=64)
def _eigen_table(family: str, N: int, nodes: int):
    """(eigenvalue matrix (M, N), weight vector (M,)) for the group."""
    pi = np.pi
    if (family, N) == ("SO", 2):
        t, w = _leggauss(nodes, 0.0, 2.0 * pi)
        lam = np.stack([np.exp(1j * t), np.exp(-1j * t)], axis=1)
        return lam, _normalized(w)
    if (family, N) == ("SO", 3):
        t, w = _leggauss(nodes, 0.0, pi)
        lam = np.stack([np.ones_like(t), np.exp(1j * t), np.exp(-1j * t)], axis=1)
        return lam, _normalized(w * (1.0 - np.cos(t)))
    if (family, N) == ("SO", 4):
        t, w = _leggauss(nodes, 0.0, pi)
        t1, t2 = np.meshgrid(t, t, indexing="ij")
        ww = np.outer(w, w) * (np.cos(t1) - np.cos(t2)) ** 2
        lam = np.stack(
            [
                np.exp(1j * t1).ravel(),
                np.exp(-1j * t1).ravel(),
                np.exp(1j * t2).ravel(),
                np.exp(-1j * t2).ravel(),
            ],
            axis=1,
        )
        return lam, _normalized(ww.ravel())
    if (family, N) == ("USp", 2):
        t, w = _leggauss(nodes, 0.0, pi)
        lam = np.stack([np.exp(1j * t), np.exp(-1j * t)], axis=1)
        return lam, _normalized(w * np.sin(t) ** 2)
    if (family, N) == ("USp", 4):
        t, w = _leggauss(nodes, 0.0, pi)
        t1, t2 = np.meshgrid(t, t, indexing="ij")
        ww = (
            np.outer(w, w)
            * (np.cos(t1) - np.cos(t2)) ** 2
            * np.sin(t1) ** 2
            * np.sin(t2) ** 2
        )
        lam = np.stack(
            [
                np.exp(1j * t1).ravel(),
                np.exp(-1j * t1).ravel(),
                np.exp(1j * t2).ravel(),
                np.exp(-1j * t2).ravel(),
            ],
            axis=1,
        )
        return lam, _normalized(ww.ravel())
    if (family, N) == ("O", 2):
        lam_so, w_so = _eigen_table("SO", 2, nodes)
        lam_ref = np.array([[1.0 + 0j, -1.0 + 0j]])
        lam = np.concatenate([lam_so, lam_ref])
        w = np.concatenate([0.5 * w_so, [0.5]])
        return lam, w
    if (family, N) == ("O", 3):
        lam_so, w_so = _eigen_table("SO", 3, nodes)
        lam = np.concatenate([lam_so, -lam_so])
        w = np.concatenate([0.5 * w_so, 0.5 * w_so])
        return lam, w
    raise UnsupportedGroup(f"({family}, {N})")  # pragma: no cover


def quad_average_many(spec: QuadSpec, points: Sequence[TorusPoint]) -> list[complex]:
    """Quadrature values for several torus points on one eigenvalue grid."""
    lam, w = _eigen_table(spec.family, spec.N, spec.nodes)
    if not points:
        return []
    p, q = points[0].p, points[0].q
    if any(pt.p != p or pt.q != q for pt in points):
        return [quad_average_many(spec, [pt])[0] for pt in points]
    xs = np.array([pt.x for pt in points]).reshape(len(points), p)
    ys = np.array([pt.y for pt in points]).reshape(len(points), q)
    vals = np.ones((len(points), lam.shape[0]), dtype=np.complex128)
    for k in range(p):
        vals *= np.prod(1.0 - xs[:, k, None, None] * lam[None], axis=2)
    for l in range(q):
        vals /= np.prod(1.0 - ys[:, l, None, None] * lam[None], axis=2)
    return [complex(v) for v in vals @ w]


def quad_average(spec: QuadSpec, pt: TorusPoint) -> complex:
    """Deterministic quadrature value of the raw ratio average."""
    return quad_average_many(spec, [pt])[0]
