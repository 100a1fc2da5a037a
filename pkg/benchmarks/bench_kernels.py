#!/usr/bin/env python3
"""Benchmark the compiled counting core against its pure-Python twin.

The measured kernel enumerates every set partition of {1..n} (one
restricted growth string each) and filters by the non-crossing test; it is
the hot loop of the brute-force partition oracle.  Run after building the
extension:

    python benchmarks/bench_kernels.py [--n-max 12] [--repeat 3]

The pure twin is always available; the compiled row is skipped if the
extension is not built.
"""

import argparse
import importlib
import time

from freewick import _corepy

try:
    _core = importlib.import_module("freewick._core")
except ImportError:
    _core = None


def timeit(fn, n, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(n)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n-max", type=int, default=12)
    parser.add_argument("--n-min", type=int, default=9)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    print(f"{'n':>3} {'partitions':>12} {'noncrossing':>12} "
          f"{'python':>10} {'compiled':>10} {'speedup':>8}")
    for n in range(args.n_min, args.n_max + 1):
        t_py, res = timeit(_corepy.count_set_partitions, n, args.repeat)
        row = f"{n:>3} {res[0]:>12} {res[1]:>12} {t_py:>9.3f}s"
        if _core is not None:
            t_c, res_c = timeit(_core.count_set_partitions, n, args.repeat)
            assert res_c == res, "backend mismatch"
            row += f" {t_c:>9.3f}s {t_py / t_c:>7.1f}x"
        else:
            row += f" {'n/a':>10} {'n/a':>8}"
        print(row)


if __name__ == "__main__":
    main()
