"""Pure-Python versions of the compiled kernels in ``_kernels.pyx``."""

import numpy as np


def jacobi_eigh(S, tol=1e-12, max_sweeps=100):
    """Diagonalize symmetric ``S`` by cyclic Jacobi sweeps.

    Returns ``(eigenvalues, eigenvectors, sweeps, off)`` with eigenvectors in
    columns, unsorted; ``off`` is the final off-diagonal Frobenius norm.
    """
    a = np.array(S, dtype=np.float64, copy=True)
    n = a.shape[0]
    v = np.eye(n)
    scale = np.linalg.norm(a)
    threshold = tol * (scale if scale > 0 else 1.0)

    def off_norm():
        return float(np.linalg.norm(a - np.diag(np.diag(a))))

    off = off_norm()
    sweep = 0
    while off > threshold and sweep < max_sweeps:
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                cp, cq = a[:, p].copy(), a[:, q]
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                rp, rq = a[p, :].copy(), a[q, :]
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q]
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
        sweep += 1
        off = off_norm()
    return np.diag(a).copy(), v, sweep, off


def laplacian_rows(indptr, indices, coef, values, rows):
    """Delta f at each vertex index in ``rows`` (CSR coefficients omega/mu)."""
    out = np.empty(len(rows), dtype=np.float64)
    for r, x in enumerate(rows):
        lo, hi = indptr[x], indptr[x + 1]
        nb = indices[lo:hi]
        out[r] = np.dot(coef[lo:hi], values[nb] - values[x])
    return out
