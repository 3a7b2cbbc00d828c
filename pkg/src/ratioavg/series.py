"""Exact weight-expansion engine: radial-factor expansion, coefficient
recursion, Casimir annihilation checks, and truncated series evaluation.

The radial factor J = e^delta * prod_{even alpha}(1-e^(-alpha)) /
prod_{odd beta}(1-e^(-beta)) over the full positive system expands as
e^delta * sum_c A_c e^(-c) with c running over the monoid generated by the
positive roots.  Annihilation of J*chi by the Laplace-Casimir operators
forces, for every exponent gamma with some nonvanishing eigenvalue
E(ell, delta+gamma), the exact relation

    0 = sum_c A_c B_{gamma+c}        (A_0 = 1),

which determines every coefficient B_gamma downward from B_lambda = 1.
Coefficients live on the constraint window -N/2 <= m_j <= N/2 <= n_j,
truncated at depth n_j <= N/2 + D.  All arithmetic is integer-exact; the
convolutions run on dense int64 arrays over the bounded exponent box with
an explicit overflow guard.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Optional, Sequence

import numpy as np

from .errors import InconsistentRecursion, TailTooLarge
from .rootsys import (
    FAMILY_O,
    LinForm,
    RootSystemData,
    build_root_data,
    enumerate_cosets,
    positive_even_roots,
    positive_odd_roots,
)
from .weights import Weight, weight_from_mn

_COEFF_GUARD = 1 << 40


@dataclass(frozen=True)
class WeightSeries:
    """Sparse exact-coefficient map from lattice exponents to integers.

    ``depth`` is the truncation D of the window N/2 <= n_j <= N/2 + D.
    For the radial-factor expansion (which is N-independent) N is None.
    """

    family: str
    N: Optional[int]
    n: int
    depth: int
    terms: dict[LinForm, int]

    def coefficient(self, e: LinForm) -> int:
        return self.terms.get(e, 0)


@dataclass(frozen=True)
class EvaluatedSeries:
    value: complex
    tail_estimate: float


@dataclass(frozen=True)
class CasimirReport:
    family: str
    N: int
    n: int
    depth: int
    lmax: int
    checked: int
    skipped: tuple[Weight, ...]
    violations: tuple[tuple[Weight, int], ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def _root_steps(root: LinForm) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Integer (psi, phi) step vector of a root (doubled entries halved)."""
    return tuple(c // 2 for c in root.psi2), tuple(c // 2 for c in root.phi2)


def _shift_subtract(arr: np.ndarray, vec: tuple[int, ...]) -> np.ndarray:
    """arr - shift(arr, vec) with zero fill (multiplication by 1 - e^(-root))."""
    src = []
    dst = []
    for v, length in zip(vec, arr.shape):
        if abs(v) >= length:
            return arr.copy()
        if v >= 0:
            dst.append(slice(v, length))
            src.append(slice(0, length - v))
        else:
            dst.append(slice(0, length + v))
            src.append(slice(-v, length))
    out = arr.copy()
    out[tuple(dst)] -= arr[tuple(src)]
    return out


def _geometric_sweep(arr: np.ndarray, vec: tuple[int, ...], axis: int) -> None:
    """In-place division by (1 - e^(-root)): cumulative sum along the root.

    ``axis`` is the phi axis on which the root steps by +1; entries pushed
    past the truncation boundary are dropped, which is exact because no
    later factor can lower that coordinate again.
    """
    n_axes = arr.ndim
    length = arr.shape[axis]
    base_dst = [slice(None)] * n_axes
    base_src = [slice(None)] * n_axes
    for ax in range(n_axes):
        if ax == axis:
            continue
        v = vec[ax]
        if v == 0:
            continue
        if v > 0:
            base_dst[ax] = slice(v, arr.shape[ax])
            base_src[ax] = slice(0, arr.shape[ax] - v)
        else:
            base_dst[ax] = slice(0, arr.shape[ax] + v)
            base_src[ax] = slice(-v, arr.shape[ax])
    for t in range(1, length):
        dst = list(base_dst)
        src = list(base_src)
        dst[axis] = t
        src[axis] = t - 1
        arr[tuple(dst)] += arr[tuple(src)]


@lru_cache(maxsize=32)
def _expansion_array(family: str, n: int, depth: int, psi_halfwidth: int):
    """Dense coefficient array of e^(-delta) J over the bounded exponent box.

    Index layout: axes (psi_1..psi_n, phi_1..phi_n) with c_psi in
    [-psi_halfwidth, psi_halfwidth] (offset psi_halfwidth) and c_phi in
    [-phi_low, depth] (offset phi_low).
    """
    pw = psi_halfwidth
    flow = max(depth, n - 1)
    shape = (2 * pw + 1,) * n + (flow + depth + 1,) * n
    arr = np.zeros(shape, dtype=np.int64)
    origin = (pw,) * n + (flow,) * n
    arr[origin] = 1

    for root in positive_even_roots(family, n):
        psi_step, phi_step = _root_steps(root)
        arr = _shift_subtract(arr, psi_step + phi_step)
    for root in positive_odd_roots(family, n):
        psi_step, phi_step = _root_steps(root)
        axis = n + phi_step.index(1)
        _geometric_sweep(arr, psi_step + phi_step, axis)

    if int(np.abs(arr).max()) >= _COEFF_GUARD:
        raise OverflowError("expansion coefficients exceeded the int64 guard")
    arr.setflags(write=False)
    return arr, pw, flow


def _natural_psi_halfwidth(n: int, depth: int) -> int:
    return n * depth + 2 * n + 2


def expand_J(data: RootSystemData, depth: int) -> WeightSeries:
    """Expansion of e^(-delta) J as a sparse series, truncated at phi-depth D.

    Exponents are the actual lattice exponents -c; the constant term is 1.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    n = data.n
    arr, pw, flow = _expansion_array(data.family, n, depth, _natural_psi_halfwidth(n, depth))
    terms: dict[LinForm, int] = {}
    for idx in np.argwhere(arr):
        c_psi = [int(idx[j]) - pw for j in range(n)]
        c_phi = [int(idx[n + j]) - flow for j in range(n)]
        e = LinForm(tuple(-2 * v for v in c_psi), tuple(-2 * v for v in c_phi))
        terms[e] = int(arr[tuple(idx)])
    return WeightSeries(data.family, None, n, depth, terms)


def _sweep_order(N: int, n: int, depth: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Window points ordered so every recursion dependency comes earlier.

    The key sum(v_j a_j + w_j d_j) with decreasing weights w_j > max v_j
    increases strictly along every positive root step, which covers the
    phi_j - phi_k directions that keep the total n-degree fixed.
    """
    v = [n - j for j in range(n)]
    w = [2 * n + (n - 1 - j) for j in range(n)]
    pts = []
    for a in product(range(N + 1), repeat=n):
        for d in product(range(depth + 1), repeat=n):
            key = sum(vj * aj for vj, aj in zip(v, a)) + sum(
                wj * dj for wj, dj in zip(w, d)
            )
            pts.append((key, d, a))
    pts.sort()
    return [(a, d) for _, d, a in pts]


def _eigenvalue_power_sums_zero(
    delta: LinForm, m2: Sequence[int], n2: Sequence[int], lrange: Sequence[int]
) -> bool:
    em = [m + dm for m, dm in zip(m2, delta.psi2)]
    en = [v - dp for v, dp in zip(n2, delta.phi2)]
    for ell in lrange:
        if sum(c ** (2 * ell) for c in em) != sum(c ** (2 * ell) for c in en):
            return False
    return True


@lru_cache(maxsize=32)
def _dense_B(family: str, N: int, n: int, depth: int):
    """Dense B table on the window plus the expansion array and offsets."""
    if N < 1 or n < 1 or depth < 0:
        raise ValueError("need N >= 1, n >= 1, depth >= 0")
    if family == "USp" and N % 2:
        raise ValueError("USp requires even N")
    data = build_root_data(family, n)
    delta = data.delta_half_supersum
    pw = max(_natural_psi_halfwidth(n, depth), N)
    arr, pw, flow = _expansion_array(family, n, depth, pw)
    amax = int(np.abs(arr).max())

    B = np.zeros((N + 1,) * n + (depth + 1,) * n, dtype=np.int64)
    assigned = np.zeros_like(B, dtype=bool)

    def slab(a, d):
        ix = [a[j] - np.arange(N + 1) + pw for j in range(n)]
        ix += [d[j] - np.arange(depth + 1) + flow for j in range(n)]
        return arr[np.ix_(*ix)]

    lam_idx = (0,) * n + (0,) * n
    B[lam_idx] = 1
    assigned[lam_idx] = True
    exceptional = set()
    if family == FAMILY_O:
        for j in range(n):
            idx = tuple(N if i == j else 0 for i in range(n)) + (0,) * n
            B[idx] = 0
            assigned[idx] = True
            exceptional.add(idx)

    lrange = tuple(range(1, n + 1))
    bmax = 1
    for a, d in _sweep_order(N, n, depth):
        idx = a + d
        m2 = tuple(N - 2 * aj for aj in a)
        n2 = tuple(N + 2 * dj for dj in d)
        vanish = _eigenvalue_power_sums_zero(delta, m2, n2, lrange)
        if assigned[idx]:
            if vanish:
                continue
            residual = int(np.multiply(slab(a, d), B, dtype=np.int64).sum())
            if residual != 0:
                raise InconsistentRecursion(
                    f"pre-assigned coefficient at m2={m2}, n2={n2} violates its "
                    f"recursion equation (residual {residual})"
                )
            continue
        if vanish:
            raise InconsistentRecursion(
                f"unexpected Casimir-null weight at m2={m2}, n2={n2}: the "
                "recursion cannot determine its coefficient"
            )
        if amax * bmax * B.size >= (1 << 62):
            raise OverflowError("recursion overflow guard tripped")
        value = -int(np.multiply(slab(a, d), B, dtype=np.int64).sum())
        B[idx] = value
        assigned[idx] = True
        bmax = max(bmax, abs(value))
        if bmax >= _COEFF_GUARD:
            raise OverflowError("coefficient magnitude exceeded the int64 guard")

    _check_sign_invariance(family, N, n, B)
    B.setflags(write=False)
    return B, arr, pw, flow


def _check_sign_invariance(family: str, N: int, n: int, B: np.ndarray) -> None:
    for w in enumerate_cosets(family, n):
        axes = [j for j in range(n) if w.flips[j]]
        if not axes:
            continue
        if not np.array_equal(B, np.flip(B, axis=axes)):
            raise InconsistentRecursion(
                f"coefficient table is not invariant under sign flips {w.flips}"
            )


def compute_B(family: str, N: int, n: int, depth: int) -> WeightSeries:
    """Weight coefficients B_gamma on the window, by descending recursion.

    B_{lambda_N} = 1; for family O the W-orbit of lambda_N - i N psi_n is
    pinned to zero and cross-checked against its own recursion equations.
    """
    B, _, _, _ = _dense_B(family, N, n, depth)
    terms: dict[LinForm, int] = {}
    for idx in np.argwhere(B):
        a = idx[:n]
        d = idx[n:]
        m2 = tuple(int(N - 2 * aj) for aj in a)
        n2 = tuple(int(N + 2 * dj) for dj in d)
        terms[weight_from_mn(m2, n2)] = int(B[tuple(idx)])
    return WeightSeries(family, N, n, depth, terms)


def verify_casimir(family: str, N: int, n: int, depth: int, lmax: int) -> CasimirReport:
    """Exact check that every constrained exponent with a nonvanishing
    Laplace-Casimir eigenvalue satisfies its annihilation equation."""
    if lmax < 1:
        raise ValueError("lmax must be >= 1")
    B, arr, pw, flow = _dense_B(family, N, n, depth)
    delta = build_root_data(family, n).delta_half_supersum
    lrange = tuple(range(1, lmax + 1))
    checked = 0
    skipped = []
    violations = []
    for a, d in _sweep_order(N, n, depth):
        m2 = tuple(N - 2 * aj for aj in a)
        n2 = tuple(N + 2 * dj for dj in d)
        gamma = weight_from_mn(m2, n2)
        if _eigenvalue_power_sums_zero(delta, m2, n2, lrange):
            skipped.append(gamma)
            continue
        ix = [a[j] - np.arange(N + 1) + pw for j in range(n)]
        ix += [d[j] - np.arange(depth + 1) + flow for j in range(n)]
        residual = int(np.multiply(arr[np.ix_(*ix)], B, dtype=np.int64).sum())
        checked += 1
        if residual != 0:
            violations.append((gamma, residual))
    return CasimirReport(
        family, N, n, depth, lmax, checked, tuple(skipped), tuple(violations)
    )


def evaluate_series(
    series: WeightSeries,
    psi: Sequence[complex],
    phi: Sequence[complex],
    tolerance: Optional[float] = None,
) -> EvaluatedSeries:
    """Sum B_gamma e^(gamma(ln t)) over the window plus a tail estimate.

    The tail estimate is (number of boundary lattice sites) x (max |B| on
    the boundary layer) x exp(-(N/2 + D) min Re phi); it is meaningful when
    min Re phi is large enough that boundary terms are already small.
    """
    import cmath

    if series.N is None:
        raise ValueError("evaluate_series needs a coefficient series from compute_B")
    psi = tuple(complex(v) for v in psi)
    phi = tuple(complex(v) for v in phi)
    n, N, depth = series.n, series.N, series.depth
    if len(psi) != n or len(phi) != n:
        raise ValueError("psi and phi must have length n")

    items = sorted(
        series.terms.items(),
        key=lambda kv: (tuple(-c for c in kv[0].phi2), tuple(-c for c in kv[0].psi2)),
    )
    value = 0j
    for e, coeff in items:
        value += coeff * cmath.exp(e.evaluate(psi, phi))

    boundary_max = 0
    for e, coeff in series.terms.items():
        n2 = tuple(-c for c in e.phi2)
        if any(v == N + 2 * depth for v in n2):
            boundary_max = max(boundary_max, abs(coeff))
    boundary_sites = (N + 1) ** n * ((depth + 1) ** n - depth**n)
    min_re_phi = min(v.real for v in phi)
    tail = boundary_sites * boundary_max * float(np.exp(-(N / 2 + depth) * min_re_phi))
    if tolerance is not None and tail > tolerance:
        raise TailTooLarge(f"tail estimate {tail:g} exceeds tolerance {tolerance:g}")
    return EvaluatedSeries(value, tail)


def export_coefficients(series: WeightSeries, fileobj=None) -> str:
    """CSV rows (m_1..m_n, n_1..n_n, numerator, denominator) in sweep order."""
    if series.N is None:
        raise ValueError("export needs a coefficient series from compute_B")
    n, N, depth = series.n, series.N, series.depth
    buf = fileobj or io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(
        [f"m_{j+1}" for j in range(n)]
        + [f"n_{j+1}" for j in range(n)]
        + ["numerator", "denominator"]
    )
    for a, d in _sweep_order(N, n, depth):
        m2 = tuple(N - 2 * aj for aj in a)
        n2 = tuple(N + 2 * dj for dj in d)
        coeff = series.coefficient(weight_from_mn(m2, n2))
        if coeff == 0:
            continue
        frac = Fraction(coeff)
        writer.writerow(
            [str(Fraction(c, 2)) for c in m2]
            + [str(Fraction(c, 2)) for c in n2]
            + [str(frac.numerator), str(frac.denominator)]
        )
    if fileobj is None:
        return buf.getvalue()
    return ""
