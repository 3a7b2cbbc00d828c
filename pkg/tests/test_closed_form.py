"""Closed-form evaluation against independent oracles and its invariants."""

import cmath

import numpy as np
import pytest

from conftest import disk_complex, unit_complex
from ratioavg.closed_form import (
    TorusPoint,
    character_chi,
    pairwise_sum,
    ratio_average,
    so_from_o,
)
from ratioavg.errors import DomainError, RangeViolation
from ratioavg.quad import QuadSpec, quad_average


def _so2_oracle(x, y, nodes=4096):
    """Uniform angle average over SO_2 eigenvalues {e^(i t), e^(-i t)}."""
    t = (np.arange(nodes) + 0.5) * (2 * np.pi / nodes)
    lam = np.exp(1j * t)
    vals = (1 - x * lam) * (1 - x / lam) / ((1 - y * lam) * (1 - y / lam))
    return np.mean(vals)


def _usp2_oracle(x, nodes=4096):
    """sin^2 density average over SU(2) eigenvalues."""
    t = (np.arange(nodes) + 0.5) * (np.pi / nodes)
    w = (2 / np.pi) * np.sin(t) ** 2
    vals = (1 - x * np.exp(1j * t)) * (1 - x * np.exp(-1j * t))
    return np.sum(w * vals) * (np.pi / nodes)


def test_golden_values():
    pt = TorusPoint((0.5,), (0.25,))
    # SO_1 = {Id}: direct integrand value (1-x)/(1-y)
    assert abs(ratio_average("SO", 1, pt).value - (1 - 0.5) / (1 - 0.25)) < 1e-15
    assert abs(ratio_average("SO", 1, pt).value - 2 / 3) < 1e-12
    # O_1 = {+1, -1}: two-element average
    o1 = 0.5 * ((1 - 0.5) / (1 - 0.25) + (1 + 0.5) / (1 + 0.25))
    assert abs(ratio_average("O", 1, pt).value - o1) < 1e-15
    assert abs(ratio_average("O", 1, pt).value - 14 / 15) < 1e-12
    # SO_2: angle quadrature oracle, frozen value 16/15
    assert abs(_so2_oracle(0.5, 0.25) - 16 / 15) < 1e-12
    assert abs(ratio_average("SO", 2, pt).value - 16 / 15) < 1e-12
    # USp_2 with q=0: sin^2 quadrature oracle, frozen value 1.25
    assert abs(_usp2_oracle(0.5) - 1.25) < 1e-8
    assert abs(ratio_average("USp", 2, TorusPoint((0.5,), ())).value - 1.25) < 1e-12


def test_empty_product_is_one():
    for family, N in (("O", 3), ("SO", 2), ("USp", 4)):
        res = ratio_average(family, N, TorusPoint((), ()))
        assert res.value == 1.0 + 0j
        assert not res.regularized


def test_validity_ranges():
    y3 = (0.1, 0.2, 0.3)
    with pytest.raises(RangeViolation):
        ratio_average("SO", 2, TorusPoint((), (0.1, 0.2)))
    with pytest.raises(RangeViolation):
        ratio_average("USp", 2, TorusPoint((), (0.1, 0.2, 0.3, 0.35)))
    with pytest.raises(RangeViolation):
        ratio_average("USp", 3, TorusPoint((0.5,), ()))
    # boundary cases are allowed
    assert ratio_average("SO", 3, TorusPoint((), (0.1, 0.2))).value
    assert ratio_average("USp", 2, TorusPoint((), y3)).value


def test_domain_errors():
    with pytest.raises(DomainError):
        TorusPoint((0.5,), (1.0,))
    with pytest.raises(DomainError):
        TorusPoint((0.5,), (1.2,))
    with pytest.raises(DomainError):
        ratio_average("SU", 2, TorusPoint((0.5,), ()))


def test_reduction_x_to_zero_bitwise(rng):
    for family, N in (("SO", 4), ("O", 4), ("USp", 4)):
        for _ in range(25):
            x = unit_complex(rng, 2) + (0.0,)
            y = disk_complex(rng, 2)
            full = ratio_average(family, N, TorusPoint(x, y)).value
            reduced = ratio_average(family, N, TorusPoint(x[:2], y)).value
            assert full == reduced


def test_reduction_tiny_x(rng):
    for _ in range(10):
        x = unit_complex(rng, 2) + (1e-30,)
        y = disk_complex(rng, 2)
        full = ratio_average("SO", 4, TorusPoint(x, y)).value
        reduced = ratio_average("SO", 4, TorusPoint(x[:2], y)).value
        assert abs(full - reduced) < 1e-12 * max(1.0, abs(reduced))


def test_permutation_invariance(rng):
    for family, N in (("SO", 3), ("O", 3), ("USp", 4)):
        for _ in range(10):
            x = unit_complex(rng, 3)
            y = disk_complex(rng, 3)
            base = ratio_average(family, N, TorusPoint(x, y)).value
            px = tuple(np.array(x)[rng.permutation(3)])
            py = tuple(np.array(y)[rng.permutation(3)])
            other = ratio_average(family, N, TorusPoint(px, py)).value
            assert abs(base - other) <= 1e-12 * max(1.0, abs(base))


def test_chi_usp2_algebraic(rng):
    """chi for USp, N=2, n=1 collapses to x^(-1) y (1 + x^2 - x y)."""
    for _ in range(10):
        psi = rng.uniform(0, 2 * np.pi)
        phi = rng.uniform(0.2, 1.5)
        x = cmath.exp(-1j * psi)
        y = cmath.exp(-phi)
        expected = (1 / x) * y * (1 + x * x - x * y)
        got = character_chi("USp", 2, 1, [psi], [phi])
        assert abs(got - expected) < 1e-12 * max(1.0, abs(expected))


def test_chi_large_phi_limit(rng):
    """phi -> +inf sends all y to 0: chi -> e^lambda x (pure numerator average)."""
    for family, N, n in (("O", 3, 2), ("USp", 4, 2)):
        psi = rng.uniform(0, 2 * np.pi, n)
        phi = np.full(n, 40.0)
        chi = character_chi(family, N, n, psi, phi)
        lam = cmath.exp(sum(0.5 * N * (1j * a - b) for a, b in zip(psi, phi)))
        numerator_only = ratio_average(
            family, N, TorusPoint(tuple(np.exp(-1j * psi)), ())
        ).value
        assert abs(chi - lam * numerator_only) < 1e-12 * abs(lam) * max(
            1.0, abs(numerator_only)
        )


def test_chi_weyl_invariance(rng):
    for family in ("O", "USp"):
        for N in (1, 2, 3):
            if family == "USp" and N % 2:
                continue
            for n in (1, 2, 3):
                psi = rng.uniform(0, 2 * np.pi, n)
                phi = rng.uniform(0.3, 1.2, n)
                base = character_chi(family, N, n, psi, phi)
                flips = np.array([True] + [False] * (n - 1))
                if family == "O":
                    if n == 1:
                        continue
                    flips[1] = True
                flipped_psi = np.where(flips, -psi, psi)
                other = character_chi(family, N, n, flipped_psi, phi)
                assert abs(base - other) <= 1e-10 * max(1.0, abs(base))


def test_chi_matches_ratio_average(rng):
    """chi = e^(lambda_N(ln t)) * ratio_average, 100 points per configuration."""
    for family in ("O", "USp"):
        for N in (1, 2, 3, 4, 5):
            if family == "USp" and N % 2:
                continue
            for n in (1, 2, 3):
                for _ in range(100):
                    psi = rng.uniform(0, 2 * np.pi, n) + 1j * rng.uniform(-0.1, 0.1, n)
                    phi = rng.uniform(0.3, 1.5, n) + 1j * rng.uniform(-0.5, 0.5, n)
                    chi = character_chi(family, N, n, psi, phi)
                    lam = cmath.exp(sum(0.5 * N * (1j * a - b) for a, b in zip(psi, phi)))
                    ra = ratio_average(family, N, TorusPoint.from_angles(psi, phi)).value
                    assert abs(chi - lam * ra) <= 1e-11 * max(1.0, abs(chi))


def test_chi_odd_n_branch(rng):
    """Odd N needs the angle lift: psi and psi + 2 pi give opposite chi signs."""
    psi = [0.7]
    phi = [0.9]
    a = character_chi("O", 3, 1, psi, phi)
    b = character_chi("O", 3, 1, [psi[0] + 2 * np.pi], phi)
    assert abs(a + b) < 1e-12 * abs(a)


def test_so_from_o_matches_so(rng):
    pt = TorusPoint((0.6,), (0.3,))
    assert abs(so_from_o(2, pt) - ratio_average("SO", 2, pt).value) < 1e-12
    pt1 = TorusPoint((0.5,), (0.25,))
    assert abs(so_from_o(1, pt1) - 2 / 3) < 1e-12
    for N in (1, 2, 3, 4, 5):
        for n in (1, 2, 3):
            for _ in range(7):
                tp = TorusPoint(unit_complex(rng, n), disk_complex(rng, n))
                lhs = so_from_o(N, tp)
                rhs = ratio_average("SO", N, tp).value
                assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs))


def test_so_from_o_quadrature_cross_check(rng):
    spec = QuadSpec("SO", 3)
    for _ in range(5):
        tp = TorusPoint(unit_complex(rng, 1), disk_complex(rng, 1))
        assert abs(so_from_o(3, tp) - quad_average(spec, tp)) < 1e-8


def test_regularization_near_pole(rng):
    """x_2 near 1/x_1: unregularized at 1e-6 separation, regularized closer in;
    both agree with quadrature to 1e-6."""
    spec = QuadSpec("SO", 3)
    x1 = cmath.exp(1j * 0.8)
    y = (0.35, 0.2)
    for eps, want_reg in ((1e-6, False), (1e-9, True), (0.0, True)):
        x2 = (1 + eps) / x1
        res = ratio_average("SO", 3, TorusPoint((x1, x2), y))
        assert res.regularized == want_reg
        ref = quad_average(spec, TorusPoint((x1, x2), y)) if eps else quad_average(
            spec, TorusPoint((x1, 1 / x1), y)
        )
        assert abs(res.value - ref) < 1e-6
        # regularized path reports the conditioning of the rotated points
        assert res.condition_estimate > 1e3 or not want_reg


def test_equal_x_degeneracy_regularized(rng):
    x = cmath.exp(1j * 1.1)
    res = ratio_average("SO", 3, TorusPoint((x, x), (0.3, 0.1)))
    assert res.regularized
    ref = quad_average(QuadSpec("SO", 3), TorusPoint((x, x), (0.3, 0.1)))
    assert abs(res.value - ref) < 1e-6


def test_condition_estimate_reported(rng):
    res = ratio_average("SO", 3, TorusPoint((0.9,), (0.85,)))
    assert res.condition_estimate >= 1.0
    assert not res.regularized


def test_pairwise_sum_matches_plain():
    vals = [complex(k, -k) * (-1) ** k / (k + 1) for k in range(37)]
    assert abs(pairwise_sum(vals) - sum(vals)) < 1e-12
    assert pairwise_sum([]) == 0j
