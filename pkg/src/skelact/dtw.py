"""Dynamic time warping between vector sequences.

The distance is the minimum, over monotone alignment paths from (1, 1) to
(n, m) with steps (1,0), (0,1) and (1,1), of the summed Euclidean frame
distances along the path. A Sakoe-Chiba-style band restricts the alignment
to a corridor around the length-scaled diagonal: cell (i, j) (1-based) is
admitted when |i*m/n - j| <= max(1, band * max(n, m)). A band of 1.0 (or
more) admits every cell and reproduces the unconstrained distance.

With a tight band and wildly different sequence lengths the end cell can
become unreachable; the distance is then +inf (treated as "infinitely far"
by the classifier).
"""
from __future__ import annotations

import numpy as np
from numba import njit

from .errors import DimMismatch, EmptySequence


@njit(cache=True)
def _dtw_kernel(a, b, width):  # pragma: no cover - exercised via dtw_distance
    n, m = a.shape[0], b.shape[0]
    dim = a.shape[1]
    prev = np.full(m + 1, np.inf)
    cur = np.full(m + 1, np.inf)
    prev[0] = 0.0
    for i in range(1, n + 1):
        for j in range(m + 1):
            cur[j] = np.inf
        center = i * m / n
        lo = max(1, int(np.ceil(center - width)))
        hi = min(m, int(np.floor(center + width)))
        for j in range(lo, hi + 1):
            d = 0.0
            for t in range(dim):
                diff = a[i - 1, t] - b[j - 1, t]
                d += diff * diff
            best = prev[j]
            if cur[j - 1] < best:
                best = cur[j - 1]
            if prev[j - 1] < best:
                best = prev[j - 1]
            cur[j] = np.sqrt(d) + best
        prev, cur = cur, prev
    return prev[m]


def _as_sequence(x) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)   # a vector is a sequence of scalars
    return np.ascontiguousarray(arr)


def dtw_distance(s: np.ndarray, s2: np.ndarray, band: float = 1.0) -> float:
    """Banded DTW distance between two (frames, dim) sequences."""
    a = _as_sequence(s)
    b = _as_sequence(s2)
    if a.shape[0] == 0 or b.shape[0] == 0:
        raise EmptySequence("DTW over an empty sequence")
    if a.shape[1] != b.shape[1]:
        raise DimMismatch(f"vector dims differ: {a.shape[1]} vs {b.shape[1]}")
    n, m = a.shape[0], b.shape[0]
    if band >= 1.0:
        width = float(max(n, m))  # admits every cell
    else:
        width = max(1.0, band * max(n, m))
    return float(_dtw_kernel(a, b, width))
