"""Closed-form sign-sum evaluation of the ratio averages and the character.

ratio_average computes

    int_K prod_k Det(1 - x_k u) / prod_l Det(1 - y_l u) du

for K = O_N, SO_N, USp_N from the explicit Weyl-type formulas, valid for
q - p <= N - 1 (SO, O) respectively q - p <= N + 1 (USp, N even).  Each
coset term is reorganized so that inverted variables x_k^(-1) never appear:
the flipped factors are rewritten as (x_k - y_l), (x_j - x_k), (x_j x_k - 1)
with the collected power of x_k kept as a single non-negative exponent.
That makes the p -> p-1 degeneration x_p -> 0 exact and keeps terms finite
for x on and off the unit circle.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from itertools import product
from typing import Sequence

from .errors import DegenerateConfiguration, DomainError, RangeViolation
from .rootsys import (
    FAMILY_O,
    FAMILY_USP,
    apply_sign_config,
    build_root_data,
    enumerate_cosets,
)

FAMILY_SO = "SO"

# Relative threshold below which a denominator pair triggers regularization,
# and the phase steps used for the Richardson extrapolation.
DEGENERACY_TOL = 1e-8
_RICHARDSON_STEP = 1e-4


@dataclass(frozen=True)
class TorusPoint:
    """Evaluation point: x_k = e^(-i psi_k), y_l = e^(-phi_l) with |y_l| < 1.

    x_k = 0 is admitted and means the factor Det(1 - x_k u) = 1, i.e. the
    exact p -> p-1 degeneration.
    """

    x: tuple[complex, ...]
    y: tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(complex(v) for v in self.x))
        object.__setattr__(self, "y", tuple(complex(v) for v in self.y))
        for v in self.y:
            if abs(v) >= 1.0:
                raise DomainError(f"|y| must be < 1, got {v!r}")
        for v in self.x + self.y:
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise DomainError("non-finite torus coordinate")

    @property
    def p(self) -> int:
        return len(self.x)

    @property
    def q(self) -> int:
        return len(self.y)

    @classmethod
    def from_angles(cls, psi: Sequence[complex], phi: Sequence[complex]) -> "TorusPoint":
        """Build from logarithmic coordinates (psi_k, phi_l), Re phi_l > 0."""
        x = tuple(cmath.exp(-1j * complex(v)) for v in psi)
        y = tuple(cmath.exp(-complex(v)) for v in phi)
        return cls(x, y)


@dataclass(frozen=True)
class EvalResult:
    value: complex
    regularized: bool
    condition_estimate: float


def _neumaier(values: list[float]) -> float:
    total = 0.0
    comp = 0.0
    for v in values:
        t = total + v
        if abs(total) >= abs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        total = t
    return total + comp


def pairwise_sum(values: Sequence[complex]) -> complex:
    """Deterministic pairwise tree with compensated leaves."""
    vals = list(values)
    if not vals:
        return 0j

    def rec(lo: int, hi: int) -> complex:
        if hi - lo <= 4:
            chunk = vals[lo:hi]
            return complex(
                _neumaier([v.real for v in chunk]), _neumaier([v.imag for v in chunk])
            )
        mid = (lo + hi) // 2
        return rec(lo, mid) + rec(mid, hi)

    return rec(0, len(vals))


def _validity_check(family: str, N: int, p: int, q: int) -> None:
    if family == FAMILY_USP:
        if N % 2:
            raise RangeViolation(f"USp requires even N, got {N}")
        if q - p > N + 1:
            raise RangeViolation(
                f"USp formula needs q - p <= N + 1, got p={p}, q={q}, N={N}"
            )
    elif q - p > N - 1:
        raise RangeViolation(
            f"{family} formula needs q - p <= N - 1, got p={p}, q={q}, N={N}"
        )


def _y_pairs(family: str, q: int) -> list[tuple[int, int]]:
    if family == FAMILY_USP:
        return [(l, lp) for l in range(q) for lp in range(l + 1, q)]
    return [(l, lp) for l in range(q) for lp in range(l, q)]


def _x_pairs(family: str, p: int) -> list[tuple[int, int]]:
    pairs = [(k, kp) for k in range(p) for kp in range(k + 1, p)]
    if family == FAMILY_USP:
        pairs += [(k, k) for k in range(p)]
    return pairs


def _term(
    family: str,
    N: int,
    x: tuple[complex, ...],
    y: tuple[complex, ...],
    flips: tuple[bool, ...],
) -> tuple[complex, float]:
    """One coset term and the smallest denominator factor magnitude."""
    p, q = len(x), len(y)
    exp = [N if f else 0 for f in flips]
    num = 1.0 + 0j
    for k in range(p):
        if flips[k]:
            for l in range(q):
                num *= x[k] - y[l]
            exp[k] -= q
        else:
            for l in range(q):
                num *= 1.0 - x[k] * y[l]

    den = 1.0 + 0j
    min_den = math.inf
    for j, k in _x_pairs(family, p):
        if j == k:
            f = x[j] * x[j] - 1.0 if flips[j] else 1.0 - x[j] * x[j]
            if flips[j]:
                exp[j] += 2
        elif flips[j] and flips[k]:
            f = x[j] * x[k] - 1.0
            exp[j] += 1
            exp[k] += 1
        elif flips[j]:
            f = x[j] - x[k]
            exp[j] += 1
        elif flips[k]:
            f = x[k] - x[j]
            exp[k] += 1
        else:
            f = 1.0 - x[j] * x[k]
        den *= f
        min_den = min(min_den, abs(f))
    for l, lp in _y_pairs(family, q):
        f = 1.0 - y[l] * y[lp]
        if f == 0:
            raise DomainError(f"coincidence y_{l} y_{lp} = 1")
        den *= f
        min_den = min(min_den, abs(f))

    value = num
    for k in range(p):
        e = exp[k]
        if e:
            value *= x[k] ** e
    if family != FAMILY_USP and N % 2:
        if sum(flips) % 2:
            value = -value
    return value / den, min_den


def _sign_sum(
    family: str, N: int, x: tuple[complex, ...], y: tuple[complex, ...]
) -> tuple[complex, float]:
    root_family = FAMILY_USP if family == FAMILY_USP else FAMILY_O
    p = len(x)
    if p == 0:
        cosets = [()]
    elif family == FAMILY_SO:
        cosets = list(product((False, True), repeat=p))
    else:
        cosets = [w.flips for w in enumerate_cosets(root_family, p)]
    terms = []
    min_den = math.inf
    for flips in cosets:
        t, m = _term(family, N, x, y, tuple(flips))
        terms.append(t)
        min_den = min(min_den, m)
    return pairwise_sum(terms), min_den


def _min_pair_separation(family: str, x: tuple[complex, ...]) -> float:
    """Smallest |denominator factor| over all sign configurations."""
    sep = math.inf
    for j, k in _x_pairs(family, len(x)):
        if j == k:
            sep = min(sep, abs(1.0 - x[j] * x[j]), abs(x[j] * x[j] - 1.0))
        else:
            sep = min(sep, abs(1.0 - x[j] * x[k]), abs(x[j] - x[k]), abs(x[j] * x[k] - 1.0))
    return sep


def _rotated(x: tuple[complex, ...], delta: float) -> tuple[complex, ...]:
    return tuple(v * cmath.exp(1j * (k + 1) * delta) for k, v in enumerate(x))


def ratio_average(family: str, N: int, pt: TorusPoint) -> EvalResult:
    """Haar average of prod Det(1 - x_k u) / prod Det(1 - y_l u) over the family.

    Terms are accumulated in coset enumeration order with compensated
    pairwise summation.  Near-degenerate denominator pairs (within
    DEGENERACY_TOL) switch to evaluation at four phase-rotated points with
    Richardson extrapolation back to the nominal point; the sum itself is
    holomorphic there, only individual terms blow up.
    """
    if family not in (FAMILY_O, FAMILY_SO, FAMILY_USP):
        raise DomainError(f"unknown family {family!r}")
    if N < 1:
        raise DomainError("N must be >= 1")
    _validity_check(family, N, pt.p, pt.q)

    # Exact zeros mean Det(1 - 0*u) = 1; dropping them reproduces the
    # (p-1, q) sum bitwise.  Only drop while the reduced (p, q) stays in
    # the proven range - at the range boundary the x_k = 0 terms with
    # epsilon_k = -1 still contribute and the full sum handles them.
    x = pt.x
    while 0j in x:
        reduced = tuple(v for v in x if v != 0)
        try:
            _validity_check(family, N, len(reduced), pt.q)
        except RangeViolation:
            break
        x = reduced
        break

    if _min_pair_separation(family, x) >= DEGENERACY_TOL:
        value, min_den = _sign_sum(family, N, x, pt.y)
        cond = 1.0 / min_den if min_den not in (0.0, math.inf) else 0.0
        return EvalResult(value, False, cond)

    step = _RICHARDSON_STEP
    evals = []
    worst = 0.0
    for d in (step, -step, 2 * step, -2 * step):
        xr = _rotated(x, d)
        if _min_pair_separation(family, xr) < 1e3 * DEGENERACY_TOL:
            raise DegenerateConfiguration(
                "rotated evaluation points remain degenerate"
            )
        v, m = _sign_sum(family, N, xr, pt.y)
        evals.append(v)
        worst = max(worst, 1.0 / m if m else math.inf)
    s1 = 0.5 * (evals[0] + evals[1])
    s2 = 0.5 * (evals[2] + evals[3])
    value = (4.0 * s1 - s2) / 3.0
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise DegenerateConfiguration("regularized value is not finite")
    return EvalResult(value, True, worst)


def character_chi(
    family: str,
    N: int,
    n: int,
    psi: Sequence[complex],
    phi: Sequence[complex],
) -> complex:
    """Character chi = sum over cosets of e^(w lambda_N) prod(1-e^(-w beta)) / prod(1-e^(-w alpha)).

    Takes logarithmic coordinates so that the half-integer exponentials for
    odd N are single-valued.  Satisfies chi = e^(lambda_N(ln t)) *
    ratio_average(family, N, (e^(-i psi), e^(-phi))).
    """
    if family not in (FAMILY_O, FAMILY_USP):
        raise DomainError("character is defined for families O and USp")
    psi = tuple(complex(v) for v in psi)
    phi = tuple(complex(v) for v in phi)
    if len(psi) != n or len(phi) != n:
        raise DomainError("psi and phi must have length n")
    for v in phi:
        if v.real <= 0:
            raise DomainError("Re phi_j must be positive")
    _validity_check(family, N, n, n)

    data = build_root_data(family, n)
    cosets = enumerate_cosets(family, n)

    def evaluate(psi_shift: Sequence[complex]) -> tuple[complex, float]:
        terms = []
        min_den = math.inf
        for w in cosets:
            lam_w = sum(
                (0.5j * N * p if not f else -0.5j * N * p)
                for p, f in zip(psi_shift, w.flips)
            ) - 0.5 * N * sum(phi)
            t = cmath.exp(lam_w)
            for beta in data.delta_lambda_odd:
                t *= 1.0 - cmath.exp(-apply_sign_config(w, beta).evaluate(psi_shift, phi))
            den = 1.0 + 0j
            for alpha in data.delta_lambda_even:
                f = 1.0 - cmath.exp(-apply_sign_config(w, alpha).evaluate(psi_shift, phi))
                den *= f
                min_den = min(min_den, abs(f))
            terms.append(t / den)
        return pairwise_sum(terms), min_den

    _, min_den = _probe_chi_degeneracy(data, cosets, psi, phi)
    if min_den >= DEGENERACY_TOL:
        value, _ = evaluate(psi)
        return value

    step = _RICHARDSON_STEP
    evals = []
    for d in (step, -step, 2 * step, -2 * step):
        shifted = tuple(p + (k + 1) * d for k, p in enumerate(psi))
        _, m = _probe_chi_degeneracy(data, cosets, shifted, phi)
        if m < 1e3 * DEGENERACY_TOL:
            raise DegenerateConfiguration("rotated evaluation points remain degenerate")
        evals.append(evaluate(shifted)[0])
    s1 = 0.5 * (evals[0] + evals[1])
    s2 = 0.5 * (evals[2] + evals[3])
    value = (4.0 * s1 - s2) / 3.0
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise DegenerateConfiguration("regularized value is not finite")
    return value


def _probe_chi_degeneracy(data, cosets, psi, phi) -> tuple[None, float]:
    min_den = math.inf
    for w in cosets:
        for alpha in data.delta_lambda_even:
            f = 1.0 - cmath.exp(-apply_sign_config(w, alpha).evaluate(psi, phi))
            min_den = min(min_den, abs(f))
    return None, min_den


def so_from_o(N: int, pt: TorusPoint) -> complex:
    """SO_N average reassembled from two O_N averages.

    Det(k) Z(t, k) = (-1)^N Z(t', k) with t' flipping psi_1 -> -psi_1 gives
    I_SO(t) = I_O(t) + (-1)^N I_O(t'); for the raw ratio averages the
    normalization e^(lambda_N) contributes the compensating factor x_1^N.
    """
    if pt.p != pt.q or pt.p == 0:
        raise DomainError("so_from_o expects p = q = n >= 1")
    x1 = pt.x[0]
    if x1 == 0:
        raise DomainError("so_from_o needs x_1 != 0 to form the reflected point")
    direct = ratio_average(FAMILY_O, N, pt).value
    reflected_pt = TorusPoint((1.0 / x1,) + pt.x[1:], pt.y)
    reflected = ratio_average(FAMILY_O, N, reflected_pt).value
    return direct + (-1.0) ** N * x1**N * reflected
