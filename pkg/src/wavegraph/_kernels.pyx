# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: cyclic Jacobi rotations and sparse Laplacian rows.

Same signatures and results as :mod:`wavegraph._kernels_py`.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt

cnp.import_array()


cdef double _offdiag_norm(double[:, ::1] a, Py_ssize_t n) noexcept nogil:
    cdef double acc = 0.0
    cdef Py_ssize_t i, j
    for i in range(n):
        for j in range(n):
            if i != j:
                acc += a[i, j] * a[i, j]
    return sqrt(acc)


def jacobi_eigh(S, double tol=1e-12, int max_sweeps=100):
    """Diagonalize symmetric ``S`` by cyclic Jacobi sweeps.

    Returns ``(eigenvalues, eigenvectors, sweeps, off)`` with eigenvectors in
    columns, unsorted; ``off`` is the final off-diagonal Frobenius norm.
    """
    cdef double[:, ::1] a = np.array(S, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t n = a.shape[0]
    V_arr = np.eye(n, dtype=np.float64)
    cdef double[:, ::1] v = V_arr
    cdef double scale = 0.0
    cdef Py_ssize_t i, p, q
    cdef int sweep = 0
    cdef double threshold, off, apq, theta, t, c, s, aip, aiq
    for p in range(n):
        for q in range(n):
            scale += a[p, q] * a[p, q]
    scale = sqrt(scale)
    threshold = tol * (scale if scale > 0.0 else 1.0)
    off = _offdiag_norm(a, n)
    with nogil:
        while off > threshold and sweep < max_sweeps:
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    if apq == 0.0:
                        continue
                    theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                    t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                    c = 1.0 / sqrt(t * t + 1.0)
                    s = t * c
                    for i in range(n):
                        aip = a[i, p]
                        aiq = a[i, q]
                        a[i, p] = c * aip - s * aiq
                        a[i, q] = s * aip + c * aiq
                    for i in range(n):
                        aip = a[p, i]
                        aiq = a[q, i]
                        a[p, i] = c * aip - s * aiq
                        a[q, i] = s * aip + c * aiq
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    for i in range(n):
                        aip = v[i, p]
                        aiq = v[i, q]
                        v[i, p] = c * aip - s * aiq
                        v[i, q] = s * aip + c * aiq
            sweep += 1
            off = _offdiag_norm(a, n)
    w = np.array([a[i, i] for i in range(n)], dtype=np.float64)
    return w, V_arr, sweep, off


def laplacian_rows(const long[::1] indptr, const long[::1] indices,
                   const double[::1] coef, const double[::1] values,
                   const long[::1] rows):
    """Delta f at each vertex index in ``rows`` (CSR coefficients omega/mu)."""
    cdef Py_ssize_t r, j, x
    cdef Py_ssize_t m = rows.shape[0]
    out_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double acc, fx
    with nogil:
        for r in range(m):
            x = rows[r]
            fx = values[x]
            acc = 0.0
            for j in range(indptr[x], indptr[x + 1]):
                acc += coef[j] * (values[indices[j]] - fx)
            out[r] = acc
    return out_arr
