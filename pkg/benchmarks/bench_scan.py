#!/usr/bin/env python3
"""Benchmark the discrete Legendre transform kernel: compiled vs pure Python.

The scan is the hot loop behind every conjugate table, identity check and
volume/moment pipeline, so this is the number that decides whether the
compiled extension is worth shipping. Run after `pip install -e .`:

    python benchmarks/bench_scan.py [--sizes 256,512,1024] [--lines 256]
"""

import argparse
import time

import numpy as np

from fockdual import _scan_py

try:
    from fockdual import _fastscan
except ImportError:
    _fastscan = None


def bench(fn, y, vals, x, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(y, vals, x)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--sizes", default="256,1024,4096",
                        help="comma-separated node counts per line")
    parser.add_argument("--lines", type=int, default=256)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    rng = np.random.default_rng(0)
    print(f"{'nodes':>8} {'lines':>6} {'pure (ms)':>12} {'compiled (ms)':>14} {'speedup':>8}")
    for n in sizes:
        y = np.linspace(-5.0, 5.0, n)
        vals = np.cumsum(rng.standard_normal((args.lines, n)), axis=1)
        x = np.linspace(-4.0, 4.0, n)
        t_pure = bench(_scan_py.conjugate_lines, y, vals, x, args.repeats)
        if _fastscan is not None:
            t_fast = bench(_fastscan.conjugate_lines, y, vals, x, args.repeats)
            ref = _scan_py.conjugate_lines(y, vals, x)
            out = _fastscan.conjugate_lines(y, vals, x)
            assert np.array_equal(ref, out), "backends disagree"
            print(f"{n:>8} {args.lines:>6} {t_pure * 1e3:>12.2f} "
                  f"{t_fast * 1e3:>14.2f} {t_pure / t_fast:>8.1f}x")
        else:
            print(f"{n:>8} {args.lines:>6} {t_pure * 1e3:>12.2f} "
                  f"{'n/a':>14} {'':>8}")


if __name__ == "__main__":
    main()
