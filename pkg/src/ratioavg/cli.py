"""Command-line surface: point evaluation, Monte Carlo, quadrature,
coefficient tables, batch CSV processing, and the cross-verification suite.

JSON reports use the stable key set {command, inputs, value|table, stderr?,
regularized?, condition_estimate?, tail_estimate?, elapsed_ms}; complex
numbers are {re, im} objects (re/im column pairs in CSV).  Exit codes:
0 success, 1 verification failure, 2 input or domain error, 3 validity
range violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from typing import Optional, Sequence

import numpy as np

from . import quad, series
from .closed_form import TorusPoint, character_chi, ratio_average, so_from_o
from .errors import RangeViolation, RatioavgError
from .haar import default_workers, mc_estimate, resolve_backend
from .quad import QuadSpec, quad_average

_EXIT_VERIFY = 1
_EXIT_INPUT = 2
_EXIT_RANGE = 3


def _cplx(z: complex) -> dict:
    return {"re": z.real, "im": z.imag}


def _parse_complex(text: str) -> complex:
    text = text.strip()
    if "," in text:
        re_s, im_s = text.split(",", 1)
        return complex(float(re_s), float(im_s))
    return complex(text.replace(" ", ""))


def _point_from_args(args) -> TorusPoint:
    if args.psi or args.phi:
        if args.x or args.y:
            raise ValueError("give either (x, y) or (psi, phi), not both")
        pt = TorusPoint.from_angles(
            [_parse_complex(v) for v in args.psi], [_parse_complex(v) for v in args.phi]
        )
    else:
        pt = TorusPoint(
            tuple(_parse_complex(v) for v in args.x),
            tuple(_parse_complex(v) for v in args.y),
        )
    if getattr(args, "p", None) is not None and args.p != pt.p:
        raise ValueError(f"--p {args.p} does not match {pt.p} x-values")
    if getattr(args, "q", None) is not None and args.q != pt.q:
        raise ValueError(f"--q {args.q} does not match {pt.q} y-values")
    return pt


def _emit(report: dict, started: float) -> None:
    report["elapsed_ms"] = round(1000.0 * (time.perf_counter() - started), 3)
    json.dump(report, sys.stdout)
    sys.stdout.write("\n")


def _cmd_eval(args) -> int:
    started = time.perf_counter()
    pt = _point_from_args(args)
    res = ratio_average(args.family, args.N, pt)
    _emit(
        {
            "command": "eval",
            "inputs": {
                "family": args.family,
                "N": args.N,
                "x": [_cplx(v) for v in pt.x],
                "y": [_cplx(v) for v in pt.y],
            },
            "value": _cplx(res.value),
            "regularized": res.regularized,
            "condition_estimate": res.condition_estimate,
        },
        started,
    )
    return 0


def _cmd_chi(args) -> int:
    started = time.perf_counter()
    psi = [_parse_complex(v) for v in args.psi]
    phi = [_parse_complex(v) for v in args.phi]
    value = character_chi(args.family, args.N, len(psi), psi, phi)
    _emit(
        {
            "command": "chi",
            "inputs": {
                "family": args.family,
                "N": args.N,
                "psi": [_cplx(v) for v in psi],
                "phi": [_cplx(v) for v in phi],
            },
            "value": _cplx(value),
        },
        started,
    )
    return 0


def _cmd_mc(args) -> int:
    started = time.perf_counter()
    pt = _point_from_args(args)
    est = mc_estimate(
        args.family,
        args.N,
        pt,
        samples=args.samples,
        seed=args.seed,
        workers=args.workers,
        backend=args.backend,
    )
    _emit(
        {
            "command": "mc",
            "inputs": {
                "family": args.family,
                "N": args.N,
                "x": [_cplx(v) for v in pt.x],
                "y": [_cplx(v) for v in pt.y],
                "samples": args.samples,
                "seed": args.seed,
                "workers": args.workers or default_workers(),
                "backend": resolve_backend(args.backend),
            },
            "value": _cplx(est.mean),
            "stderr": {"re": est.stderr_re, "im": est.stderr_im},
        },
        started,
    )
    return 0


def _cmd_quad(args) -> int:
    started = time.perf_counter()
    pt = _point_from_args(args)
    value = quad_average(QuadSpec(args.family, args.N, args.nodes), pt)
    _emit(
        {
            "command": "quad",
            "inputs": {
                "family": args.family,
                "N": args.N,
                "nodes": args.nodes,
                "x": [_cplx(v) for v in pt.x],
                "y": [_cplx(v) for v in pt.y],
            },
            "value": _cplx(value),
        },
        started,
    )
    return 0


def _cmd_expand(args) -> int:
    started = time.perf_counter()
    table = series.compute_B(args.family, args.N, args.n, args.depth)
    if args.format == "csv":
        sys.stdout.write(series.export_coefficients(table))
        return 0
    rows = []
    reader = csv.DictReader(io.StringIO(series.export_coefficients(table)))
    for row in reader:
        rows.append(row)
    report = {
        "command": "expand",
        "inputs": {
            "family": args.family,
            "N": args.N,
            "n": args.n,
            "depth": args.depth,
        },
        "table": rows,
    }
    if args.psi or args.phi:
        psi = [_parse_complex(v) for v in args.psi]
        phi = [_parse_complex(v) for v in args.phi]
        ev = series.evaluate_series(table, psi, phi, tolerance=args.tolerance)
        report["value"] = _cplx(ev.value)
        report["tail_estimate"] = ev.tail_estimate
        report["inputs"]["psi"] = [_cplx(v) for v in psi]
        report["inputs"]["phi"] = [_cplx(v) for v in phi]
    _emit(report, started)
    return 0


def _batch_rows(path: str):
    with open(path, newline="") as handle:
        yield from csv.reader(handle)


def _cmd_batch(args) -> int:
    started = time.perf_counter()
    rows = list(_batch_rows(args.input))
    if not rows:
        raise ValueError("batch file is empty")
    header = rows[0]
    out_rows = []
    for line_no, row in enumerate(rows[1:], start=2):
        try:
            family = row[0].strip()
            N = int(row[1])
            p = int(row[2])
            q = int(row[3])
            vals = [float(v) for v in row[4 : 4 + 2 * (p + q)]]
            x = tuple(complex(vals[2 * k], vals[2 * k + 1]) for k in range(p))
            y = tuple(
                complex(vals[2 * p + 2 * l], vals[2 * p + 2 * l + 1]) for l in range(q)
            )
            res = ratio_average(family, N, TorusPoint(x, y))
            out_rows.append(
                {
                    "row": line_no,
                    "family": family,
                    "N": N,
                    "p": p,
                    "q": q,
                    "value": _cplx(res.value),
                    "regularized": res.regularized,
                    "condition_estimate": res.condition_estimate,
                }
            )
        except (RatioavgError, ValueError, IndexError) as exc:
            code = exc.code if isinstance(exc, RatioavgError) else "parse-error"
            out_rows.append({"row": line_no, "error": {"code": code, "message": str(exc)}})
    if args.format == "csv":
        writer = csv.writer(sys.stdout)
        writer.writerow(
            ["row", "value_re", "value_im", "regularized", "condition_estimate", "error"]
        )
        for r in out_rows:
            if "error" in r:
                writer.writerow([r["row"], "", "", "", "", r["error"]["code"]])
            else:
                writer.writerow(
                    [
                        r["row"],
                        r["value"]["re"],
                        r["value"]["im"],
                        r["regularized"],
                        r["condition_estimate"],
                        "",
                    ]
                )
        return 0
    _emit(
        {"command": "batch", "inputs": {"file": args.input, "header": header}, "table": out_rows},
        started,
    )
    return 0


def _verify_checks(tier: str, seed: int, workers: Optional[int], lmax: Optional[int] = None):
    """Yield (name, ok, detail) tuples for the cross-check suite."""
    rng = np.random.default_rng(seed)

    golden = [
        ("SO", 1, TorusPoint((0.5,), (0.25,)), 2.0 / 3.0),
        ("O", 1, TorusPoint((0.5,), (0.25,)), 14.0 / 15.0),
        ("SO", 2, TorusPoint((0.5,), (0.25,)), 16.0 / 15.0),
        ("USp", 2, TorusPoint((0.5,), ()), 1.25),
    ]
    worst = max(
        abs(ratio_average(f, N, pt).value - truth) for f, N, pt, truth in golden
    )
    yield "golden-values", worst < 1e-12, f"max |err| = {worst:.2e}"

    import cmath

    worst = 0.0
    for family in ("O", "USp"):
        for N in (1, 2, 3):
            if family == "USp" and N % 2:
                continue
            for n in (1, 2):
                psi = rng.uniform(0.0, 2 * np.pi, n)
                phi = rng.uniform(0.4, 1.4, n)
                chi = character_chi(family, N, n, psi, phi)
                lam = cmath.exp(sum(0.5 * N * (1j * a - b) for a, b in zip(psi, phi)))
                ra = ratio_average(
                    family, N, TorusPoint.from_angles(psi, phi)
                ).value
                worst = max(worst, abs(chi - lam * ra) / max(1.0, abs(chi)))
    yield "chi-consistency", worst < 1e-11, f"max rel err = {worst:.2e}"

    worst = 0.0
    for N in (1, 2, 3, 4):
        for n in (1, 2):
            x = np.exp(1j * rng.uniform(0, 2 * np.pi, n))
            y = rng.uniform(0.1, 0.6, n) * np.exp(1j * rng.uniform(0, 2 * np.pi, n))
            pt = TorusPoint(tuple(x), tuple(y))
            worst = max(
                worst, abs(so_from_o(N, pt) - ratio_average("SO", N, pt).value)
            )
    yield "so-from-o", worst < 1e-10, f"max |err| = {worst:.2e}"

    worst = 0.0
    for trial in range(10):
        x = tuple(np.exp(1j * rng.uniform(0, 2 * np.pi, 2))) + (0.0,)
        y = tuple(rng.uniform(0.1, 0.6, 2))
        a = ratio_average("SO", 4, TorusPoint(x, y)).value
        b = ratio_average("SO", 4, TorusPoint(x[:2], y)).value
        worst = max(worst, abs(a - b))
    yield "x-to-zero-reduction", worst < 1e-12, f"max |err| = {worst:.2e}"

    worst = 0.0
    for family, N in quad.SUPPORTED:
        for trial in range(5):
            p = int(rng.integers(0, 3))
            q = int(rng.integers(0, 3))
            bound = N + 1 if family == "USp" else N - 1
            if q - p > bound:
                continue
            pt = TorusPoint(
                tuple(np.exp(1j * rng.uniform(0, 2 * np.pi, p))),
                tuple(rng.uniform(0.05, 0.7, q) * np.exp(1j * rng.uniform(0, 2 * np.pi, q))),
            )
            worst = max(
                worst,
                abs(quad_average(QuadSpec(family, N), pt) - ratio_average(family, N, pt).value),
            )
    yield "quad-vs-eval", worst < 1e-8, f"max |err| = {worst:.2e}"

    from .weights import weight_from_mn

    table = series.compute_B("USp", 2, 1, 6)
    expected = {
        weight_from_mn((2,), (2,)): 1,
        weight_from_mn((-2,), (2,)): 1,
        weight_from_mn((0,), (4,)): -1,
    }
    yield "series-exact-usp2", table.terms == expected, f"{len(table.terms)} nonzero"

    depth, default_lmax, nmax = (6, 4, 3) if tier == "full" else (4, 3, 2)
    lmax = lmax or default_lmax
    failures = 0
    checked = 0
    for family in ("O", "USp"):
        for N in range(1, nmax + 1):
            if family == "USp" and N % 2:
                continue
            for n in (1, 2):
                rep = series.verify_casimir(family, N, n, depth, lmax)
                checked += rep.checked
                failures += len(rep.violations)
    yield "casimir-annihilation", failures == 0, f"{checked} equations, {failures} violations"

    worst = 0.0
    for family in ("O", "USp"):
        for N in (1, 2):
            if family == "USp" and N % 2:
                continue
            for n in (1, 2):
                B = series.compute_B(family, N, n, 6)
                psi = rng.uniform(0, 2 * np.pi, n)
                phi = np.full(n, 2.0)
                ev = series.evaluate_series(B, psi, phi)
                chi = character_chi(family, N, n, psi, phi)
                worst = max(worst, abs(ev.value - chi) - max(ev.tail_estimate, 1e-9))
    yield "series-vs-chi", worst <= 0.0, f"max excess = {worst:.2e}"

    mc_samples = 200_000 if tier == "full" else 20_000
    configs = [("SO", 3), ("USp", 2)]
    if tier == "full":
        configs = [("O", N) for N in (1, 2, 3, 4, 5)] + [
            ("SO", N) for N in (1, 2, 3, 4, 5)
        ] + [("USp", N) for N in (2, 4, 6)]
    worst_sigma = 0.0
    for family, N in configs:
        n = 1
        pt = TorusPoint(
            tuple(np.exp(1j * rng.uniform(0, 2 * np.pi, n))),
            tuple(rng.uniform(0.1, 0.5, n)),
        )
        est = mc_estimate(family, N, pt, mc_samples, seed, workers=workers)
        truth = ratio_average(family, N, pt).value
        sig = max(est.stderr_re, est.stderr_im, 1e-12)
        dev = max(abs(est.mean.real - truth.real), abs(est.mean.imag - truth.imag))
        worst_sigma = max(worst_sigma, dev / sig)
    yield "mc-agreement", worst_sigma < 6.0, f"max deviation = {worst_sigma:.2f} sigma"

    a = mc_estimate("SO", 3, TorusPoint((0.6,), (0.3,)), 20_000, seed, workers=1)
    b = mc_estimate("SO", 3, TorusPoint((0.6,), (0.3,)), 20_000, seed, workers=4)
    yield "mc-worker-determinism", a == b, "bitwise equal" if a == b else "mismatch"


def _cmd_verify(args) -> int:
    started = time.perf_counter()
    tier = "full" if args.full else "quick"
    checks = []
    ok_all = True
    for name, ok, detail in _verify_checks(tier, args.seed, args.workers, args.lmax):
        status = "PASS" if ok else "FAIL"
        ok_all = ok_all and ok
        print(f"{status} {name}: {detail}", file=sys.stderr)
        checks.append({"check": name, "status": status, "detail": detail})
    _emit(
        {
            "command": "verify",
            "inputs": {"tier": tier, "seed": args.seed},
            "table": checks,
        },
        started,
    )
    return 0 if ok_all else _EXIT_VERIFY


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ratioavg",
        description="Haar averages of ratios of characteristic polynomials "
        "over O(N), SO(N), USp(N).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_point_args(p, with_angles=True):
        p.add_argument("--x", action="append", default=[], metavar="Z",
                       help="numerator parameter x_k (complex, repeatable)")
        p.add_argument("--y", action="append", default=[], metavar="Z",
                       help="denominator parameter y_l (complex, |y|<1, repeatable)")
        p.add_argument("--p", type=int, default=None,
                       help="expected number of x-values (consistency check)")
        p.add_argument("--q", type=int, default=None,
                       help="expected number of y-values (consistency check)")
        if with_angles:
            p.add_argument("--psi", action="append", default=[], metavar="Z",
                           help="angle psi_j with x_j = exp(-i psi_j)")
            p.add_argument("--phi", action="append", default=[], metavar="Z",
                           help="angle phi_j with y_j = exp(-phi_j), Re phi_j > 0")

    p = sub.add_parser("eval", help="closed-form ratio average")
    p.add_argument("--family", required=True, choices=("O", "SO", "USp"))
    p.add_argument("--N", required=True, type=int)
    add_point_args(p)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("chi", help="character via the coset sum (needs p=q=n)")
    p.add_argument("--family", required=True, choices=("O", "USp"))
    p.add_argument("--N", required=True, type=int)
    p.add_argument("--psi", action="append", default=[], required=False)
    p.add_argument("--phi", action="append", default=[], required=False)
    p.set_defaults(func=_cmd_chi)

    p = sub.add_parser("mc", help="Monte Carlo estimate over Haar samples")
    p.add_argument("--family", required=True, choices=("O", "SO", "USp"))
    p.add_argument("--N", required=True, type=int)
    add_point_args(p)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--backend", choices=("numba", "numpy"), default=None)
    p.set_defaults(func=_cmd_mc)

    p = sub.add_parser("quad", help="Weyl-integration quadrature oracle")
    p.add_argument("--family", required=True, choices=("O", "SO", "USp"))
    p.add_argument("--N", required=True, type=int)
    add_point_args(p)
    p.add_argument("--nodes", type=int, default=96)
    p.set_defaults(func=_cmd_quad)

    p = sub.add_parser("expand", help="weight-coefficient table B_gamma")
    p.add_argument("--family", required=True, choices=("O", "USp"))
    p.add_argument("--N", required=True, type=int)
    p.add_argument("--n", required=True, type=int)
    p.add_argument("--depth", type=int, default=6)
    p.add_argument("--psi", action="append", default=[], metavar="Z",
                   help="with --phi: also evaluate the truncated series here")
    p.add_argument("--phi", action="append", default=[], metavar="Z")
    p.add_argument("--tolerance", type=float, default=None,
                   help="error out if the tail estimate exceeds this")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=_cmd_expand)

    p = sub.add_parser("verify", help="cross-check closed form / MC / quad / series")
    tier = p.add_mutually_exclusive_group()
    tier.add_argument("--quick", action="store_true", default=True)
    tier.add_argument("--full", action="store_true", default=False)
    p.add_argument("--seed", type=int, default=20260810)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--lmax", type=int, default=None,
                   help="Casimir orders checked (default 3 quick / 4 full)")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("batch", help="evaluate a CSV of parameter rows")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=_cmd_batch)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except RangeViolation as exc:
        json.dump({"command": args.command, "error": {"code": exc.code, "message": str(exc)}},
                  sys.stdout)
        sys.stdout.write("\n")
        return _EXIT_RANGE
    except RatioavgError as exc:
        json.dump({"command": args.command, "error": {"code": exc.code, "message": str(exc)}},
                  sys.stdout)
        sys.stdout.write("\n")
        return _EXIT_INPUT
    except (ValueError, OSError) as exc:
        json.dump(
            {"command": args.command, "error": {"code": "input-error", "message": str(exc)}},
            sys.stdout,
        )
        sys.stdout.write("\n")
        return _EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
