"""Benchmark the numba kernels against the pure-numpy fallback.

Both backends compute identical block sums from the same counter-based
stream, so the printed agreement column should sit at the few-ulp level.

    python3 benchmarks/bench_backends.py [--samples 200000] [--workers W]
"""

import argparse
import time

import numpy as np

from ratioavg.closed_form import TorusPoint
from ratioavg.haar import mc_estimate_batch

CONFIGS = [
    ("O", 3, 1),
    ("SO", 5, 2),
    ("USp", 4, 1),
    ("USp", 6, 2),
]


def bench(samples: int, workers):
    rng = np.random.default_rng(2026)
    print(f"{'group':>8} {'n':>2} {'numba':>10} {'numpy':>10} {'speedup':>8} {'|diff|':>10}")
    for family, N, n in CONFIGS:
        pts = [
            TorusPoint(
                tuple(rng.uniform(0.2, 0.7, n) * np.exp(1j * rng.uniform(0, 2 * np.pi, n))),
                tuple(rng.uniform(0.05, 0.3, n) * np.exp(1j * rng.uniform(0, 2 * np.pi, n))),
            )
            for _ in range(4)
        ]
        # warm up compilation before timing
        mc_estimate_batch(family, N, pts, 2048, seed=1, backend="numba")
        times = {}
        results = {}
        for backend in ("numba", "numpy"):
            t0 = time.perf_counter()
            results[backend] = mc_estimate_batch(
                family, N, pts, samples, seed=1, workers=workers, backend=backend
            )
            times[backend] = time.perf_counter() - t0
        diff = max(
            abs(a.mean - b.mean) for a, b in zip(results["numba"], results["numpy"])
        )
        print(
            f"{family + '_' + str(N):>8} {n:>2} {times['numba']:>9.2f}s "
            f"{times['numpy']:>9.2f}s {times['numpy'] / times['numba']:>7.1f}x "
            f"{diff:>10.1e}"
        )


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--samples", type=int, default=200_000)
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args()
    bench(args.samples, args.workers)
