# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled pair kernels: coincidence counts and inverse-power pair sums.

Predicates are kept operation-for-operation identical to the numpy fallback
in _core_py so both backends return the same integers on the same input.
"""

from libc.math cimport sqrt


def pair_count_sorted_1d(double[::1] z, double delta):
    """Ordered pairs (i, j), diagonal included, with z[j] in [z[i]-d, z[i]+d].

    z must be sorted ascending.
    """
    cdef Py_ssize_t n = z.shape[0]
    cdef Py_ssize_t i, lo = 0, hi = 0
    cdef long long total = 0
    if n == 0:
        return 0
    for i in range(n):
        while z[lo] < z[i] - delta:
            lo += 1
        if hi < lo:
            hi = lo
        while hi < n and z[hi] <= z[i] + delta:
            hi += 1
        total += hi - lo
    return total


def pair_count_nd(double[:, ::1] x, double delta):
    """Ordered pairs (diagonal included) with Euclidean distance <= delta.

    Rows must be sorted by the first coordinate; the sweep prunes on it.
    """
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t m = x.shape[1]
    cdef Py_ssize_t i, j, t
    cdef double d2max = delta * delta
    cdef double acc, d, d0
    cdef long long close = 0
    for i in range(n):
        j = i + 1
        while j < n:
            d0 = x[j, 0] - x[i, 0]
            if d0 * d0 > d2max:
                break
            acc = 0.0
            for t in range(m):
                d = x[i, t] - x[j, t]
                acc = acc + d * d
            if acc <= d2max:
                close += 1
            j += 1
    return 2 * close + n


def riesz_pair_sum(double[:, ::1] pts, int power):
    """Sum over ordered distinct pairs of |x - y|^-power."""
    cdef Py_ssize_t n = pts.shape[0]
    cdef Py_ssize_t m = pts.shape[1]
    cdef Py_ssize_t i, j, t
    cdef int p
    cdef double acc, d, r, term, total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            acc = 0.0
            for t in range(m):
                d = pts[i, t] - pts[j, t]
                acc = acc + d * d
            r = sqrt(acc)
            term = 1.0
            for p in range(power):
                term = term / r
            total += 2.0 * term
    return total
