import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


def unit_complex(rng, n):
    """n points on the unit circle."""
    return tuple(np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, n)))


def disk_complex(rng, n, rmin=0.05, rmax=0.7):
    """n points strictly inside the unit disk."""
    r = rng.uniform(rmin, rmax, n)
    return tuple(r * np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, n)))
