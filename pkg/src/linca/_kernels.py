"""Hot numeric kernel: advancing a dense Green row by one convolution with
the symbol coefficients.

Two implementations are provided: a numba @njit version and a pure-numpy
fallback.  Selection:

  * if the environment variable LINCA_NO_NUMBA is set to a non-empty value
    other than "0", the numpy path is used;
  * otherwise numba is used when importable, numpy else.

Both paths are exact (arithmetic mod p on small unsigned integers) and are
benchmarked against each other in benchmarks/bench_kernels.py.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = ["advance_row", "USING_NUMBA"]


def _numpy_advance(row, mats, shifts, p):
    # row: (W, d, d) uint8; mats: (T, d, d) uint8; shifts: (T,) int64 <= 0
    w = row.shape[0]
    growth = -int(shifts.min()) if len(shifts) else 0
    out = np.zeros((w + growth, row.shape[1], row.shape[2]), dtype=np.int64)
    for t in range(mats.shape[0]):
        s = int(shifts[t])
        # destination index k reads source index k + s (s <= 0)
        out[-s:-s + w] += np.einsum("ij,wjk->wik", mats[t].astype(np.int64),
                                    row.astype(np.int64))
    return (out % p).astype(np.uint8)


USING_NUMBA = False
_numba_advance = None

_flag = os.environ.get("LINCA_NO_NUMBA", "")
if _flag in ("", "0"):
    try:
        from numba import njit

        @njit(cache=True)
        def _numba_advance_impl(row, mats, shifts, p):  # pragma: no cover
            w, d, _ = row.shape
            t_count = mats.shape[0]
            growth = 0
            for t in range(t_count):
                if -shifts[t] > growth:
                    growth = -shifts[t]
            out = np.zeros((w + growth, d, d), dtype=np.uint8)
            for t in range(t_count):
                s = shifts[t]
                m = mats[t]
                for k in range(w):
                    dest = k - s
                    src = row[k]
                    for i in range(d):
                        for j in range(d):
                            acc = np.uint32(out[dest, i, j])
                            for l in range(d):
                                acc += np.uint32(m[i, l]) * np.uint32(src[l, j])
                            out[dest, i, j] = np.uint8(acc % p)
            return out

        _numba_advance = _numba_advance_impl
        USING_NUMBA = True
    except ImportError:
        pass


def advance_row(row, mats, shifts, p):
    """Convolve a dense Green row with the symbol taps.

    row[k] holds the d x d matrix at position x0 + k; mats[t] is the
    coefficient at exponent e_t and shifts[t] = e_t - max_e <= 0.  The
    returned array is indexed from x0' = x0 - max_e.
    """
    if row.shape[0] == 0 or mats.shape[0] == 0:
        return np.zeros((0, row.shape[1], row.shape[2]), dtype=np.uint8)
    if USING_NUMBA:
        return _numba_advance(row, mats, shifts, np.uint32(p))
    return _numpy_advance(row, mats, shifts, p)
