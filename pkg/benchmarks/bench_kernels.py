"""Benchmark the Green-row convolution kernel: numba JIT vs pure numpy.

Run directly:  python3 benchmarks/bench_kernels.py [--rows N] [--d D]
The numba path is selected automatically when available; set LINCA_NO_NUMBA=1
to force the numpy fallback.  This script times both by spawning a
subprocess for the disabled variant so module-level selection is honest.
"""

import argparse
import json
import os
import subprocess
import sys
import time

_WORKER = """
import json, os, sys, time
import numpy as np
from linca._kernels import advance_row, USING_NUMBA

rows_n, d = json.loads(sys.argv[1])
rng = np.random.default_rng(0)
mats = rng.integers(0, 2, size=(3, d, d), dtype=np.uint8)
shifts = np.array([-2, -1, 0], dtype=np.int64)
row = rng.integers(0, 2, size=(8, d, d), dtype=np.uint8)
# warm-up triggers JIT compilation; excluded from timing
advance_row(row, mats, shifts, 2)
t0 = time.perf_counter()
for _ in range(rows_n):
    row = advance_row(row, mats, shifts, 2)
dt = time.perf_counter() - t0
print(json.dumps({"numba": USING_NUMBA, "rows": rows_n,
                  "final_width": int(row.shape[0]),
                  "seconds": dt}))
"""


def run_variant(disable_numba, rows_n, d):
    env = dict(os.environ)
    if disable_numba:
        env["LINCA_NO_NUMBA"] = "1"
    else:
        env.pop("LINCA_NO_NUMBA", None)
    out = subprocess.run(
        [sys.executable, "-c", _WORKER, json.dumps([rows_n, d])],
        env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--rows", type=int, default=2000,
                    help="number of row-advance steps (default 2000)")
    ap.add_argument("--d", type=int, default=3,
                    help="matrix dimension (default 3)")
    args = ap.parse_args()
    t0 = time.time()
    fast = run_variant(False, args.rows, args.d)
    slow = run_variant(True, args.rows, args.d)
    for r in (fast, slow):
        label = "numba" if r["numba"] else "numpy"
        print(f"{label:5s}: {r['rows']} steps, final width "
              f"{r['final_width']}, {r['seconds']:.3f} s")
    if fast["numba"]:
        print(f"speedup: {slow['seconds'] / fast['seconds']:.1f}x")
    else:
        print("numba unavailable; both runs used the numpy fallback")
    print(f"(total wall time incl. JIT warm-up: {time.time() - t0:.1f} s)")


if __name__ == "__main__":
    main()
