"""Pure-Python discrete Legendre transform kernel.

Fallback for the compiled `_fastscan` extension; both implement the same
linear-time algorithm so either backend satisfies the library contract.
"""

import numpy as np


def conjugate_lines(y, vals, x, out=None):
    """Row-wise discrete conjugate: out[l, k] = max_i (x[k] * y[i] - vals[l, i]).

    ``y`` (shape (N,)) and ``x`` (shape (M,)) must be strictly increasing.
    ``vals`` has shape (L, N). Works in O(L * (N + M)) by scanning the lower
    convex hull of each row's sample epigraph with a monotone pointer.
    When two hull nodes tie, the smaller index wins.
    """
    y = np.ascontiguousarray(y, dtype=np.float64)
    vals = np.ascontiguousarray(vals, dtype=np.float64)
    x = np.ascontiguousarray(x, dtype=np.float64)
    if vals.ndim != 2 or vals.shape[1] != y.shape[0]:
        raise ValueError("vals must have shape (L, len(y))")
    n_rows, n = vals.shape
    m = x.shape[0]
    if n == 0 or m == 0:
        raise ValueError("empty grid")
    if out is None:
        out = np.empty((n_rows, m), dtype=np.float64)

    hull = np.empty(n, dtype=np.intp)
    for row in range(n_rows):
        f = vals[row]
        # lower hull of (y_i, f_i); middle points on or above a chord are dropped
        h = 0
        for i in range(n):
            while h >= 2:
                a = hull[h - 2]
                b = hull[h - 1]
                if (f[b] - f[a]) * (y[i] - y[a]) >= (f[i] - f[a]) * (y[b] - y[a]):
                    h -= 1
                else:
                    break
            hull[h] = i
            h += 1
        j = 0
        o = out[row]
        for k in range(m):
            xv = x[k]
            best = xv * y[hull[j]] - f[hull[j]]
            while j + 1 < h:
                cand = xv * y[hull[j + 1]] - f[hull[j + 1]]
                if cand > best:
                    j += 1
                    best = cand
                else:
                    break
            o[k] = best
    return out
