"""Exact weight-lattice arithmetic and Laplace-Casimir eigenvalues.

A weight gamma = sum_j (i m_j psi_j - n_j phi_j) reuses the LinForm
representation: m_j = psi2[j]/2 and n_j = -phi2[j]/2.  All arithmetic is
integer-exact; eigenvalue power sums use Python's arbitrary precision.
"""

from __future__ import annotations

from fractions import Fraction

from .rootsys import FAMILY_O, LinForm, RootSystemData

Weight = LinForm


def weight_from_mn(m2: tuple[int, ...], n2: tuple[int, ...]) -> Weight:
    """Weight with doubled coordinates 2*m_j = m2[j], 2*n_j = n2[j]."""
    return LinForm(tuple(m2), tuple(-c for c in n2))


def weight_mn(gamma: Weight) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Doubled (2*m_j, 2*n_j) coordinates of a weight."""
    return gamma.psi2, tuple(-c for c in gamma.phi2)


def highest_weight(N: int, n: int) -> Weight:
    """lambda_N = (N/2) sum_j (i psi_j - phi_j)."""
    if N < 1 or n < 1:
        raise ValueError("N and n must be >= 1")
    return LinForm((N,) * n, (-N,) * n)


def satisfies_constraints(gamma: Weight, N: int) -> bool:
    """Componentwise -N/2 <= m_j <= N/2 <= n_j."""
    m2, n2 = weight_mn(gamma)
    return all(-N <= m <= N for m in m2) and all(v >= N for v in n2)


def casimir_eigenvalue(ell: int, e: LinForm) -> Fraction:
    """(-1)^ell sum_k (m_k^(2 ell) - n_k^(2 ell)) for e = sum(i m_k psi_k - n_k phi_k)."""
    if ell < 1:
        raise ValueError("ell must be a positive integer")
    m2, n2 = weight_mn(e)
    total = sum(m ** (2 * ell) for m in m2) - sum(v ** (2 * ell) for v in n2)
    return Fraction((-1) ** ell * total, 4**ell)


def vanishing_test(gamma: Weight, data: RootSystemData, N: int) -> bool:
    """Whether E(ell, delta + gamma) = 0 for every ell.

    Checking ell = 1..n suffices: the condition equates the first n power
    sums of the two n-element multisets {m_k^2} and {n_k^2}, which pins the
    multisets.  Within the constraint window the solutions are lambda_N
    (both families) plus, for O only, lambda_N - i N psi_n.
    """
    e = data.delta_half_supersum + gamma
    m2, n2 = weight_mn(e)
    for ell in range(1, data.n + 1):
        if sum(m ** (2 * ell) for m in m2) != sum(v ** (2 * ell) for v in n2):
            return False
    return True


def exceptional_weights(family: str, N: int, n: int) -> list[Weight]:
    """The O-family W-orbit of lambda_N - i N psi_n (empty for USp).

    The unicity theorem assigns coefficient zero to the representative; the
    even-flip Weyl group spreads that to every lambda_N - i N psi_j.
    """
    if family != FAMILY_O:
        return []
    out = []
    for j in range(n):
        m2 = tuple(-N if i == j else N for i in range(n))
        out.append(weight_from_mn(m2, (N,) * n))
    return out
