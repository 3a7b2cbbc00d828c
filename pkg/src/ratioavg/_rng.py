"""Counter-based random stream shared by both sampler backends.

Every value is a pure function of (seed, sample index, draw index): a
splitmix64-style mixer keyed by sample gives a 64-bit word per draw, and
Gaussians come from Box-Muller on consecutive uniform pairs.  This makes
per-sample computations order- and worker-independent.
"""

from __future__ import annotations

import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_SEED_SALT = np.uint64(0x5851F42D4C957F2D)
_U53 = 2.0**-53
_U54 = 2.0**-54
TWO_PI = 6.283185307179586476925287


def mix64(z):
    """Finalizing 64-bit mixer (splitmix64 without the increment)."""
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def seed_base(seed: int) -> np.uint64:
    folded = np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF)
    with np.errstate(over="ignore"):
        return mix64(folded ^ _SEED_SALT)


def sample_bases(seedbase: np.uint64, start: int, count: int) -> np.ndarray:
    """Per-sample mixer keys for sample indices start .. start+count-1."""
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return mix64(seedbase + idx * GOLDEN)


def gaussians(bases: np.ndarray, count: int) -> np.ndarray:
    """(len(bases), count) standard normals, draw t from uniforms (2t+1, 2t+2)."""
    t = np.arange(count, dtype=np.uint64)
    with np.errstate(over="ignore"):
        u1 = mix64(bases[:, None] + (np.uint64(2) * t + np.uint64(1)) * GOLDEN)
        u2 = mix64(bases[:, None] + (np.uint64(2) * t + np.uint64(2)) * GOLDEN)
    f1 = (u1 >> np.uint64(11)) * _U53 + _U54
    f2 = (u2 >> np.uint64(11)) * _U53
    return np.sqrt(-2.0 * np.log(f1)) * np.cos(TWO_PI * f2)
