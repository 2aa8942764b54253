"""Time the numba kernels against their pure-numpy counterparts.

    python benchmarks/bench_kernels.py [--count 2000] [--degree 10]

Both paths run in one process; the numba path is warmed up first so that
compilation is not counted.
"""

import argparse
import time

import numpy as np

from mahlernorm import _kernels


def random_polys(count, degree, seed=0):
    rng = np.random.default_rng(seed)
    c = rng.integers(-5, 6, size=(count, degree + 1)).astype(float)
    c[:, 0] = 1.0
    return c


def best_of(func, repeat=3):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        func()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=2000)
    ap.add_argument("--degree", type=int, default=10)
    args = ap.parse_args()
    if not _kernels.NUMBA_AVAILABLE:
        print("numba is disabled (MAHLER_NUMBA=0 or not installed); only the numpy path runs")

    polys = random_polys(args.count, args.degree)
    small = polys[:2]

    def roots(use_numba):
        return np.array([_kernels.aberth(p, use_numba=use_numba) for p in polys])

    # warm up compilation
    for p in small:
        _kernels.aberth(p, use_numba=True)
    rts = roots(False)
    lead = polys[:, 0]
    _kernels.log_mahler_batch(rts[:2], lead[:2], use_numba=True)

    rows = [
        ("aberth (per polynomial loop)", lambda: roots(True), lambda: roots(False)),
        ("log_mahler_batch", lambda: _kernels.log_mahler_batch(rts, lead, use_numba=True),
         lambda: _kernels.log_mahler_batch(rts, lead, use_numba=False)),
    ]
    print("%d polynomials of degree %d" % (args.count, args.degree))
    print("%-30s %12s %12s %8s" % ("kernel", "numba [s]", "numpy [s]", "ratio"))
    for name, fast, slow in rows:
        tn, tp = best_of(fast), best_of(slow)
        print("%-30s %12.4f %12.4f %8.1f" % (name, tn, tp, tp / tn if tn else float("nan")))
    diff = np.max(np.abs(_kernels.log_mahler_batch(rts, lead, True) - _kernels.log_mahler_batch(rts, lead, False)))
    print("max |numba - numpy| on log Mahler measures: %.2e" % diff)


if __name__ == "__main__":
    main()
