"""Exact expansion arithmetic: A coefficients, B recursion, Casimir checks."""

import io

import numpy as np
import pytest

from ratioavg.closed_form import character_chi
from ratioavg.errors import TailTooLarge
from ratioavg.rootsys import (
    LinForm,
    build_root_data,
    enumerate_cosets,
    positive_even_roots,
    positive_odd_roots,
    zero_form,
)
from ratioavg.series import (
    compute_B,
    evaluate_series,
    expand_J,
    export_coefficients,
    verify_casimir,
)
from ratioavg.weights import highest_weight, satisfies_constraints, weight_from_mn


def _expand_oracle(family, n, depth):
    """Independent dict-based expansion of e^(-delta) J.

    Convolves one factor at a time on a loose box (the window depth plus
    slack for the downward phi-dips the numerator roots phi_j - phi_k can
    cause), then filters to the window.  Slack n is enough: at most n-1
    numerator factors lower any phi coordinate."""
    cap = depth + n
    series = {zero_form(n): 1}

    def mul(factor_terms):
        nonlocal series
        out = {}
        for e1, c1 in series.items():
            for e2, c2 in factor_terms.items():
                e = e1 + e2
                if any(v < -2 * cap for v in e.phi2):
                    continue
                out[e] = out.get(e, 0) + c1 * c2
        series = {k: v for k, v in out.items() if v}

    for alpha in positive_even_roots(family, n):
        mul({zero_form(n): 1, -alpha: -1})
    for beta in positive_odd_roots(family, n):
        powers = {zero_form(n): 1}
        acc = zero_form(n)
        for _ in range(cap):
            acc = acc - beta
            powers[acc] = 1
        mul(powers)
    return {k: v for k, v in series.items() if not any(v < -2 * depth for v in k.phi2)}


@pytest.mark.parametrize(
    "family,n,depth", [("USp", 1, 3), ("O", 1, 3), ("USp", 2, 2), ("O", 2, 2)]
)
def test_expand_matches_independent_convolution(family, n, depth):
    got = expand_J(build_root_data(family, n), depth).terms
    want = _expand_oracle(family, n, depth)
    got = {k: v for k, v in got.items() if not any(c < -2 * depth for c in k.phi2)}
    want = {k: v for k, v in want.items() if not any(c < -2 * depth for c in k.phi2)}
    assert got == want


def test_expand_constant_term_and_hand_values():
    a = expand_J(build_root_data("USp", 1), 3)
    assert a.coefficient(zero_form(1)) == 1
    # c = 2 i psi from the numerator factor (1 - e^(-2 i psi))
    assert a.coefficient(LinForm((-4,), (0,))) == -1
    # c = i psi + phi cancels between the two odd-root series
    assert a.coefficient(LinForm((-2,), (-2,))) == 0
    # c = phi - i psi survives with +1
    assert a.coefficient(LinForm((2,), (-2,))) == 1


def test_compute_b_usp2_exact_table():
    for depth in (4, 8):
        table = compute_B("USp", 2, 1, depth)
        assert table.terms == {
            weight_from_mn((2,), (2,)): 1,
            weight_from_mn((-2,), (2,)): 1,
            weight_from_mn((0,), (4,)): -1,
        }


def test_compute_b_o1_matches_closed_form():
    """O_1 average (1 - x y)/(1 - y^2) expands with B(1/2, 1/2+2k) = 1 and
    B(-1/2, 3/2+2k) = -1."""
    depth = 8
    table = compute_B("O", 1, 1, depth)
    expected = {}
    for k in range(depth + 1):
        if 2 * k <= depth:
            expected[weight_from_mn((1,), (1 + 4 * k,))] = 1
        if 2 * k + 1 <= depth:
            expected[weight_from_mn((-1,), (3 + 4 * k,))] = -1
    assert table.terms == expected


def test_b_lambda_is_one_and_o_exceptional_zero():
    for family, N, n in (("O", 2, 2), ("O", 3, 2), ("USp", 4, 2)):
        table = compute_B(family, N, n, 4)
        assert table.coefficient(highest_weight(N, n)) == 1
        if family == "O":
            for j in range(n):
                m2 = tuple(-N if i == j else N for i in range(n))
                assert table.coefficient(weight_from_mn(m2, (N,) * n)) == 0


def test_b_support_obeys_constraints_and_w_invariance():
    for family, N, n in (("O", 2, 2), ("USp", 2, 2), ("O", 3, 2)):
        table = compute_B(family, N, n, 5)
        for gamma, coeff in table.terms.items():
            assert coeff != 0
            assert satisfies_constraints(gamma, N)
        for w in enumerate_cosets(family, n):
            for gamma, coeff in table.terms.items():
                flipped = LinForm(
                    tuple(-c if f else c for c, f in zip(gamma.psi2, w.flips)),
                    gamma.phi2,
                )
                assert table.coefficient(flipped) == coeff


def test_compute_b_is_deterministic():
    a = compute_B("O", 2, 2, 5)
    b = compute_B("O", 2, 2, 5)
    assert a.terms == b.terms


@pytest.mark.parametrize("family", ["O", "USp"])
@pytest.mark.parametrize("N", [1, 2, 3])
@pytest.mark.parametrize("n", [1, 2])
def test_casimir_annihilation_exact(family, N, n):
    if family == "USp" and N % 2:
        pytest.skip("USp needs even N")
    report = verify_casimir(family, N, n, 6, 4)
    assert report.ok, report.violations[:5]
    assert report.checked > 0
    skipped = set(report.skipped)
    expected = {highest_weight(N, n)}
    if family == "O":
        m2 = tuple(N if j < n - 1 else -N for j in range(n))
        expected.add(weight_from_mn(m2, (N,) * n))
    assert skipped == expected


def test_evaluate_series_matches_chi(rng):
    for family in ("O", "USp"):
        for N in (1, 2, 3):
            if family == "USp" and N % 2:
                continue
            for n in (1, 2):
                table = compute_B(family, N, n, 8)
                for _ in range(20):
                    psi = rng.uniform(0.0, 2 * np.pi, n)
                    phi = rng.uniform(2.0, 3.0, n)
                    ev = evaluate_series(table, psi, phi)
                    chi = character_chi(family, N, n, psi, phi)
                    assert abs(ev.value - chi) <= max(ev.tail_estimate, 1e-9)


def test_evaluate_series_leading_term(rng):
    table = compute_B("USp", 2, 2, 6)
    psi = rng.uniform(0, 2 * np.pi, 2)
    phi = np.full(2, 60.0)
    ev = evaluate_series(table, psi, phi)
    lam = np.exp(sum(1j * p - f for p, f in zip(psi, phi)))
    assert abs(ev.value - lam) < 1e-40


def test_tail_too_large(rng):
    table = compute_B("O", 2, 1, 2)
    with pytest.raises(TailTooLarge):
        evaluate_series(table, [0.4], [0.05], tolerance=1e-12)


def test_export_coefficients_csv():
    table = compute_B("USp", 2, 1, 4)
    text = export_coefficients(table)
    lines = text.strip().splitlines()
    assert lines[0] == "m_1,n_1,numerator,denominator"
    assert lines[1:] == ["1,1,1,1", "-1,1,1,1", "0,2,-1,1"]
    # half-integer weights render as exact fractions
    text = export_coefficients(compute_B("O", 1, 1, 2))
    assert "1/2,1/2,1,1" in text


def test_export_to_fileobj():
    table = compute_B("USp", 2, 1, 2)
    buf = io.StringIO()
    export_coefficients(table, buf)
    assert "m_1" in buf.getvalue()
