# cython: language_level=3
"""Compiled discrete Legendre transform kernel (hot loop of the package).

Mirrors `_scan_py.conjugate_lines`; see that module for the algorithm notes.
"""

import numpy as np


def conjugate_lines(y, vals, x, out=None):
    """Row-wise discrete conjugate: out[l, k] = max_i (x[k] * y[i] - vals[l, i])."""
    y_arr = np.ascontiguousarray(y, dtype=np.float64)
    vals_arr = np.ascontiguousarray(vals, dtype=np.float64)
    x_arr = np.ascontiguousarray(x, dtype=np.float64)
    if vals_arr.ndim != 2 or vals_arr.shape[1] != y_arr.shape[0]:
        raise ValueError("vals must have shape (L, len(y))")
    if y_arr.shape[0] == 0 or x_arr.shape[0] == 0:
        raise ValueError("empty grid")
    if out is None:
        out = np.empty((vals_arr.shape[0], x_arr.shape[0]), dtype=np.float64)
    hull = np.empty(y_arr.shape[0], dtype=np.intp)
    _scan_rows(y_arr, vals_arr, x_arr, out, hull)
    return out


cdef void _scan_rows(double[::1] y, double[:, ::1] vals, double[::1] x,
                     double[:, ::1] out, Py_ssize_t[::1] hull) noexcept nogil:
    cdef Py_ssize_t n_rows = vals.shape[0]
    cdef Py_ssize_t n = vals.shape[1]
    cdef Py_ssize_t m = x.shape[0]
    cdef Py_ssize_t row, i, k, h, j, a, b
    cdef double xv, best, cand
    for row in range(n_rows):
        h = 0
        for i in range(n):
            while h >= 2:
                a = hull[h - 2]
                b = hull[h - 1]
                if (vals[row, b] - vals[row, a]) * (y[i] - y[a]) >= \
                        (vals[row, i] - vals[row, a]) * (y[b] - y[a]):
                    h -= 1
                else:
                    break
            hull[h] = i
            h += 1
        j = 0
        for k in range(m):
            xv = x[k]
            best = xv * y[hull[j]] - vals[row, hull[j]]
            while j + 1 < h:
                cand = xv * y[hull[j + 1]] - vals[row, hull[j + 1]]
                if cand > best:
                    j += 1
                    best = cand
                else:
                    break
            out[row, k] = best
