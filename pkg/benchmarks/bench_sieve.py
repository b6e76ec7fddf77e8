"""Compare the numba and numpy sieve backends on a point-search workload.

    python benchmarks/bench_sieve.py [--span N] [--repeat R]

Both backends must return identical survivors; the script exits 1 otherwise.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from sectobs import _accel, poly

# x-coordinate cubic of the integral model of E1 for C_{7,-11}, row n = 7
CUBIC = poly.prod([[28 * 49, 1], [14 * 49, 1], [-22 * 49, 1]])


def timed(backend: str, lo: int, hi: int, tables, repeat: int):
    best, out = float("inf"), None
    for _ in range(repeat):
        t = time.perf_counter()
        out = _accel.scan(lo, hi, tables, backend)
        best = min(best, time.perf_counter() - t)
    return best, out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--span", type=int, default=2_000_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    tables = _accel.build_tables([CUBIC])
    lo, hi = -args.span // 2, args.span // 2
    results = {}
    backends = ["numpy"] + (["numba"] if _accel._HAVE_NUMBA else [])
    for b in backends:
        _accel.scan(lo, lo + 1000, tables, b)  # compile / warm up
        results[b] = timed(b, lo, hi, tables, args.repeat)
        sec, out = results[b]
        print(f"{b:>6}: {sec * 1e3:9.2f} ms  {args.span / sec / 1e6:8.1f} Mv/s  survivors={len(out)}")
    if len(results) == 2:
        same = np.array_equal(results["numpy"][1], results["numba"][1])
        print(f"speedup numba/numpy: {results['numpy'][0] / results['numba'][0]:.1f}x  identical={same}")
        return 0 if same else 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
