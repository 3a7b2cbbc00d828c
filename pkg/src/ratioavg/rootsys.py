"""Root systems and sign-flip Weyl combinatorics for the two ensemble families.

Linear forms on the torus coordinates are written in the basis
``i*psi_1 .. i*psi_n, phi_1 .. phi_n``.  All coefficients are stored
*doubled* so that half-integer forms (the highest weight for odd N) are
exact integers; roots always have even stored entries.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable

FAMILY_O = "O"
FAMILY_USP = "USp"
_FAMILIES = (FAMILY_O, FAMILY_USP)


def _check_family(family: str) -> str:
    if family not in _FAMILIES:
        raise ValueError(f"family must be one of {_FAMILIES}, got {family!r}")
    return family


@dataclass(frozen=True)
class LinForm:
    """Linear form sum_j (psi2[j]/2) * i*psi_j + (phi2[j]/2) * phi_j."""

    psi2: tuple[int, ...]
    phi2: tuple[int, ...]

    def __post_init__(self):
        if len(self.psi2) != len(self.phi2):
            raise ValueError("psi and phi coefficient vectors must have equal length")

    @property
    def n(self) -> int:
        return len(self.psi2)

    def __add__(self, other: "LinForm") -> "LinForm":
        self._match(other)
        return LinForm(
            tuple(a + b for a, b in zip(self.psi2, other.psi2)),
            tuple(a + b for a, b in zip(self.phi2, other.phi2)),
        )

    def __sub__(self, other: "LinForm") -> "LinForm":
        self._match(other)
        return LinForm(
            tuple(a - b for a, b in zip(self.psi2, other.psi2)),
            tuple(a - b for a, b in zip(self.phi2, other.phi2)),
        )

    def __neg__(self) -> "LinForm":
        return LinForm(tuple(-a for a in self.psi2), tuple(-a for a in self.phi2))

    def scaled(self, k: int) -> "LinForm":
        return LinForm(tuple(k * a for a in self.psi2), tuple(k * a for a in self.phi2))

    def is_zero(self) -> bool:
        return not any(self.psi2) and not any(self.phi2)

    def _match(self, other: "LinForm") -> None:
        if self.n != other.n:
            raise ValueError("rank mismatch between linear forms")

    def evaluate(self, psi: Iterable[complex], phi: Iterable[complex]) -> complex:
        """Value at torus coordinates (psi_j, phi_j), i.e. at ln t."""
        psi = tuple(psi)
        phi = tuple(phi)
        if len(psi) != self.n or len(phi) != self.n:
            raise ValueError("coordinate tuples do not match the rank")
        val = 0j
        for c, p in zip(self.psi2, psi):
            if c:
                val += 0.5j * c * p
        for c, f in zip(self.phi2, phi):
            if c:
                val += 0.5 * c * f
        return val


def zero_form(n: int) -> LinForm:
    return LinForm((0,) * n, (0,) * n)


def ipsi(j: int, n: int) -> LinForm:
    """The form i*psi_j (0-based j)."""
    return LinForm(tuple(2 if i == j else 0 for i in range(n)), (0,) * n)


def phi(j: int, n: int) -> LinForm:
    """The form phi_j (0-based j)."""
    return LinForm((0,) * n, tuple(2 if i == j else 0 for i in range(n)))


@dataclass(frozen=True)
class SignConfig:
    """One coset of the Weyl group modulo the highest-weight stabilizer.

    ``flips[j]`` means i*psi_j is sent to -i*psi_j.  For family O only an
    even number of flips occurs; for USp any pattern is allowed.
    """

    flips: tuple[bool, ...]

    @property
    def n(self) -> int:
        return len(self.flips)

    @property
    def parity(self) -> int:
        return sum(self.flips) % 2


@dataclass(frozen=True)
class RootSystemData:
    family: str
    n: int
    delta_lambda_even: tuple[LinForm, ...]
    delta_lambda_odd: tuple[LinForm, ...]
    simple_roots: tuple[LinForm, ...]
    delta_half_supersum: LinForm
    delta_prime: LinForm
    # For family O with n = 1 the last simple root i*psi_{n-1}+i*psi_n does
    # not exist; the list is emitted without it and this flag records that.
    simple_roots_complete: bool = True


def positive_even_roots(family: str, n: int) -> list[LinForm]:
    """Full system of positive even roots (degree-0 and degree-2 sectors)."""
    _check_family(family)
    roots = []
    for j in range(n):
        for k in range(j + 1, n):
            roots.append(phi(j, n) + phi(k, n))
            roots.append(phi(j, n) - phi(k, n))
            roots.append(ipsi(j, n) + ipsi(k, n))
            roots.append(ipsi(j, n) - ipsi(k, n))
    for j in range(n):
        if family == FAMILY_O:
            roots.append(phi(j, n).scaled(2))
        else:
            roots.append(ipsi(j, n).scaled(2))
    return roots


def positive_odd_roots(family: str, n: int) -> list[LinForm]:
    """Full system of positive odd roots phi_j +- i*psi_k (same for O and USp)."""
    _check_family(family)
    roots = []
    for j in range(n):
        for k in range(n):
            roots.append(phi(j, n) + ipsi(k, n))
            roots.append(phi(j, n) - ipsi(k, n))
    return roots


def build_root_data(family: str, n: int) -> RootSystemData:
    """Assemble the root-system data used by the character formulas.

    The half supersum delta is computed directly as half the difference of
    the full positive even and odd root sums; for O it agrees with
    sum_k (k-1)(i*psi_{n-k+1} - phi_k) and for USp with
    sum_k k (i*psi_{n-k+1} - phi_k).
    """
    _check_family(family)
    if n < 1:
        raise ValueError("rank n must be >= 1")

    even: list[LinForm] = []
    odd: list[LinForm] = []
    if family == FAMILY_O:
        for j in range(n):
            for k in range(j + 1, n):
                even.append(ipsi(j, n) + ipsi(k, n))
        for j in range(n):
            for k in range(j, n):
                even.append(phi(j, n) + phi(k, n))
    else:
        for j in range(n):
            for k in range(j, n):
                even.append(ipsi(j, n) + ipsi(k, n))
        for j in range(n):
            for k in range(j + 1, n):
                even.append(phi(j, n) + phi(k, n))
    for j in range(n):
        for k in range(n):
            odd.append(ipsi(j, n) + phi(k, n))

    simple: list[LinForm] = []
    for j in range(n - 1):
        simple.append(phi(j, n) - phi(j + 1, n))
    simple.append(phi(n - 1, n) - ipsi(0, n))
    for j in range(n - 1):
        simple.append(ipsi(j, n) - ipsi(j + 1, n))
    complete = True
    if family == FAMILY_O:
        if n >= 2:
            simple.append(ipsi(n - 2, n) + ipsi(n - 1, n))
        else:
            complete = False
    else:
        simple.append(ipsi(n - 1, n).scaled(2))

    total = zero_form(n)
    for a in positive_even_roots(family, n):
        total = total + a
    for b in positive_odd_roots(family, n):
        total = total - b
    psi2 = tuple(c // 2 for c in total.psi2)
    phi2 = tuple(c // 2 for c in total.phi2)
    delta = LinForm(psi2, phi2)

    lambda1 = LinForm((1,) * n, (-1,) * n)  # (1/2) sum (i psi_j - phi_j)
    delta_prime = -lambda1 if family == FAMILY_O else lambda1

    return RootSystemData(
        family=family,
        n=n,
        delta_lambda_even=tuple(even),
        delta_lambda_odd=tuple(odd),
        simple_roots=tuple(simple),
        delta_half_supersum=delta,
        delta_prime=delta_prime,
        simple_roots_complete=complete,
    )


def enumerate_cosets(family: str, n: int) -> list[SignConfig]:
    """Sign configurations indexing W / W_lambda, lexicographic in flips.

    2^n configurations for USp, the even-parity half (2^(n-1)) for O.
    """
    _check_family(family)
    if n < 1:
        raise ValueError("rank n must be >= 1")
    configs = []
    for flips in product((False, True), repeat=n):
        if family == FAMILY_O and sum(flips) % 2:
            continue
        configs.append(SignConfig(flips))
    return configs


def apply_sign_config(w: SignConfig, f: LinForm) -> LinForm:
    """Negate the i*psi coefficients on the flipped slots."""
    if w.n != f.n:
        raise ValueError("sign configuration and form rank mismatch")
    return LinForm(
        tuple(-c if flip else c for c, flip in zip(f.psi2, w.flips)),
        f.phi2,
    )
