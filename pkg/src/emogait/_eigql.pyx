# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled symmetric eigensolver kernel.

Householder reduction to tridiagonal form with accumulation of the
orthogonal transform, followed by the implicit-shift QL iteration.  The
QL stage rotates rows of the transposed accumulation matrix so the inner
loop walks contiguous memory; the Python entry point transposes back.
"""

from libc.math cimport fabs, hypot, sqrt

import numpy as np

cdef double DBL_EPS = 2.220446049250313e-16


cdef void _tridiagonalize(double[:, ::1] z, double[::1] d, double[::1] e) noexcept nogil:
    # On entry z is the symmetric input; on exit z holds the orthogonal Q
    # (columns) with Q.T @ A @ Q tridiagonal, d the diagonal and e the
    # subdiagonal (e[0] unused).
    cdef Py_ssize_t n = z.shape[0]
    cdef Py_ssize_t i, j, k, l
    cdef double scale, h, hh, f, g

    for i in range(n - 1, 0, -1):
        l = i - 1
        h = 0.0
        scale = 0.0
        if l > 0:
            for k in range(l + 1):
                scale += fabs(z[i, k])
            if scale == 0.0:
                e[i] = z[i, l]
            else:
                for k in range(l + 1):
                    z[i, k] /= scale
                    h += z[i, k] * z[i, k]
                f = z[i, l]
                g = -sqrt(h) if f >= 0.0 else sqrt(h)
                e[i] = scale * g
                h -= f * g
                z[i, l] = f - g
                f = 0.0
                for j in range(l + 1):
                    z[j, i] = z[i, j] / h
                    g = 0.0
                    for k in range(j + 1):
                        g += z[j, k] * z[i, k]
                    for k in range(j + 1, l + 1):
                        g += z[k, j] * z[i, k]
                    e[j] = g / h
                    f += e[j] * z[i, j]
                hh = f / (h + h)
                for j in range(l + 1):
                    f = z[i, j]
                    g = e[j] - hh * f
                    e[j] = g
                    for k in range(j + 1):
                        z[j, k] -= f * e[k] + g * z[i, k]
        else:
            e[i] = z[i, l]
        d[i] = h

    d[0] = 0.0
    e[0] = 0.0
    for i in range(n):
        if d[i] != 0.0:
            for j in range(i):
                g = 0.0
                for k in range(i):
                    g += z[i, k] * z[k, j]
                for k in range(i):
                    z[k, j] -= g * z[k, i]
        d[i] = z[i, i]
        z[i, i] = 1.0
        for j in range(i):
            z[i, j] = 0.0
            z[j, i] = 0.0


cdef int _ql_implicit(double[::1] d, double[::1] e, double[:, ::1] w, int cap) noexcept nogil:
    # Implicit-shift QL on the tridiagonal (d, e); plane rotations are
    # applied to rows of w (w starts as Q.T, ends with eigenvector rows).
    # Returns total sweeps used, or -1 if the cap was exceeded.
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t i, k, l, m
    cdef double b, c, dd, f, g, p, r, s
    cdef int total = 0
    cdef bint early

    if n <= 1:
        return 0
    for i in range(1, n):
        e[i - 1] = e[i]
    e[n - 1] = 0.0

    for l in range(n):
        while True:
            m = l
            while m < n - 1:
                dd = fabs(d[m]) + fabs(d[m + 1])
                if fabs(e[m]) <= DBL_EPS * dd:
                    break
                m += 1
            if m == l:
                break
            total += 1
            if total > cap:
                return -1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0.0 else -r))
            s = 1.0
            c = 1.0
            p = 0.0
            early = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    early = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                for k in range(n):
                    f = w[i + 1, k]
                    w[i + 1, k] = s * w[i, k] + c * f
                    w[i, k] = c * w[i, k] - s * f
            if early:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return total


def ql_eigh(a, int sweep_cap_per_dim):
    """Eigenvalues and eigenvectors of a symmetric float64 matrix.

    Returns ``(w, v, sweeps)`` with unsorted eigenvalues ``w``, eigenvector
    columns ``v``, and the sweep count (-1 when the iteration cap of
    ``sweep_cap_per_dim * n`` was exceeded; ``w`` and ``v`` are then
    unusable).
    """
    z = np.array(a, dtype=np.float64, order="C", copy=True)
    if z.ndim != 2 or z.shape[0] != z.shape[1]:
        raise ValueError("expected a square matrix")
    cdef Py_ssize_t n = z.shape[0]
    d = np.empty(n, dtype=np.float64)
    e = np.empty(n, dtype=np.float64)

    cdef double[:, ::1] z_view = z
    cdef double[::1] d_view = d
    cdef double[::1] e_view = e
    with nogil:
        _tridiagonalize(z_view, d_view, e_view)

    w = np.ascontiguousarray(z.T)
    cdef double[:, ::1] w_view = w
    cdef int cap = sweep_cap_per_dim * n
    cdef int sweeps
    with nogil:
        sweeps = _ql_implicit(d_view, e_view, w_view, cap)

    return d, np.ascontiguousarray(w.T), sweeps
