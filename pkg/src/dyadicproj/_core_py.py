"""Pure-numpy fallback for the compiled pair kernels.

Counting predicates match dyadicproj._core exactly (same subtractions, same
comparison directions), so the two backends agree integer-for-integer; the
floating riesz sum agrees to rounding.
"""

from __future__ import annotations

import numpy as np

_CHUNK = 2048


def pair_count_sorted_1d(z: np.ndarray, delta: float) -> int:
    """Ordered pairs (i, j), diagonal included, with z[j] in [z[i]-d, z[i]+d]."""
    if z.shape[0] == 0:
        return 0
    hi = np.searchsorted(z, z + delta, side="right")
    lo = np.searchsorted(z, z - delta, side="left")
    return int((hi - lo).sum())


def pair_count_nd(x: np.ndarray, delta: float) -> int:
    """Ordered pairs (diagonal included) with Euclidean distance <= delta."""
    n, m = x.shape
    if n == 0:
        return 0
    d2max = delta * delta
    close = 0
    for a in range(0, n, _CHUNK):
        xa = x[a : a + _CHUNK]
        for b in range(0, n, _CHUNK):
            xb = x[b : b + _CHUNK]
            acc = np.zeros((xa.shape[0], xb.shape[0]))
            for t in range(m):
                d = xa[:, t, None] - xb[None, :, t]
                acc += d * d
            close += int((acc <= d2max).sum())
    return close  # the diagonal is included in the block counts


def riesz_pair_sum(pts: np.ndarray, power: int) -> float:
    """Sum over ordered distinct pairs of |x - y|^-power."""
    n, m = pts.shape
    total = 0.0
    for a in range(0, n, _CHUNK):
        xa = pts[a : a + _CHUNK]
        for b in range(0, n, _CHUNK):
            xb = pts[b : b + _CHUNK]
            acc = np.zeros((xa.shape[0], xb.shape[0]))
            for t in range(m):
                d = xa[:, t, None] - xb[None, :, t]
                acc += d * d
            r = np.sqrt(acc)
            if a == b:
                np.fill_diagonal(r, np.inf)
            total += float((r ** -float(power)).sum())
    return total
