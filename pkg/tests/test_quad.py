"""Quadrature oracle: normalization, convergence, and MC agreement."""

import pytest

from conftest import disk_complex, unit_complex
from ratioavg.closed_form import TorusPoint
from ratioavg.errors import UnsupportedGroup
from ratioavg.haar import mc_estimate
from ratioavg.quad import SUPPORTED, QuadSpec, quad_average


def test_unsupported_group():
    with pytest.raises(UnsupportedGroup):
        QuadSpec("SO", 5)
    with pytest.raises(UnsupportedGroup):
        QuadSpec("USp", 6)


@pytest.mark.parametrize("family,N", SUPPORTED)
def test_normalization(family, N):
    one = quad_average(QuadSpec(family, N), TorusPoint((), ()))
    assert abs(one - 1.0) < 1e-13


def test_golden_values():
    assert abs(quad_average(QuadSpec("SO", 2, 64), TorusPoint((0.5,), (0.25,))) - 16 / 15) < 1e-12
    assert abs(quad_average(QuadSpec("USp", 2, 64), TorusPoint((0.5,), ())) - 1.25) < 1e-12


@pytest.mark.parametrize("family,N", SUPPORTED)
def test_node_doubling_convergence(family, N, rng):
    for _ in range(3):
        pt = TorusPoint(unit_complex(rng, 2), disk_complex(rng, 1))
        a = quad_average(QuadSpec(family, N, 64), pt)
        b = quad_average(QuadSpec(family, N, 128), pt)
        assert abs(a - b) < 1e-10


@pytest.mark.parametrize("family,N", SUPPORTED)
def test_agrees_with_monte_carlo(family, N, rng):
    pt = TorusPoint(unit_complex(rng, 1), disk_complex(rng, 1, rmax=0.5))
    est = mc_estimate(family, N, pt, samples=100_000, seed=12345)
    ref = quad_average(QuadSpec(family, N), pt)
    tol_re = 4 * max(est.stderr_re, 1e-9)
    tol_im = 4 * max(est.stderr_im, 1e-9)
    assert abs(est.mean.real - ref.real) < tol_re
    assert abs(est.mean.imag - ref.imag) < tol_im


def test_o_family_mixes_components():
    """O averages halve between the SO part and the reflection part."""
    pt = TorusPoint((0.5,), (0.3,))
    o2 = quad_average(QuadSpec("O", 2), pt)
    so2 = quad_average(QuadSpec("SO", 2), pt)
    reflect = (1 - 0.5) * (1 + 0.5) / ((1 - 0.3) * (1 + 0.3))
    assert abs(o2 - 0.5 * (so2 + reflect)) < 1e-13
