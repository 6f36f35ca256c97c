# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; same contracts as _pykernels."""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, sqrt, INFINITY

cnp.import_array()


cdef inline double _minor(double[:, ::1] v, Py_ssize_t a, Py_ssize_t b, Py_ssize_t c,
                          int i, int j, int l) noexcept nogil:
    return (v[a, i] * (v[b, j] * v[c, l] - v[b, l] * v[c, j])
            - v[a, j] * (v[b, i] * v[c, l] - v[b, l] * v[c, i])
            + v[a, l] * (v[b, i] * v[c, j] - v[b, j] * v[c, i]))


def support_planes(vectors, double tol):
    cdef double[:, ::1] v = np.ascontiguousarray(vectors, dtype=np.float64)
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t a, b, c, r
    cdef double nrm[4]
    cdef double norm, s
    cdef bint up, down
    triples = []
    normals = []
    if n < 3:
        return np.zeros((0, 3), dtype=np.int64), np.zeros((0, 4))
    for a in range(n - 2):
        for b in range(a + 1, n - 1):
            for c in range(b + 1, n):
                nrm[0] = _minor(v, a, b, c, 1, 2, 3)
                nrm[1] = -_minor(v, a, b, c, 0, 2, 3)
                nrm[2] = _minor(v, a, b, c, 0, 1, 3)
                nrm[3] = -_minor(v, a, b, c, 0, 1, 2)
                norm = sqrt(nrm[0] * nrm[0] + nrm[1] * nrm[1] + nrm[2] * nrm[2] + nrm[3] * nrm[3])
                if norm <= 1e-12:
                    continue
                nrm[0] /= norm
                nrm[1] /= norm
                nrm[2] /= norm
                nrm[3] /= norm
                up = True
                down = True
                for r in range(n):
                    s = nrm[0] * v[r, 0] + nrm[1] * v[r, 1] + nrm[2] * v[r, 2] + nrm[3] * v[r, 3]
                    if s < -tol:
                        up = False
                    if s > tol:
                        down = False
                    if not up and not down:
                        break
                if up:
                    triples.append((a, b, c))
                    normals.append((nrm[0], nrm[1], nrm[2], nrm[3]))
                elif down:
                    triples.append((a, b, c))
                    normals.append((-nrm[0], -nrm[1], -nrm[2], -nrm[3]))
    if not triples:
        return np.zeros((0, 3), dtype=np.int64), np.zeros((0, 4))
    return np.array(triples, dtype=np.int64), np.array(normals)


def min_pairing(points_a, points_b, form):
    cdef double[:, ::1] a = np.ascontiguousarray(points_a, dtype=np.float64)
    cdef double[:, ::1] b = np.ascontiguousarray(points_b, dtype=np.float64)
    cdef double[:, ::1] g = np.ascontiguousarray(form, dtype=np.float64)
    cdef Py_ssize_t na = a.shape[0], nb = b.shape[0], dim = a.shape[1]
    cdef Py_ssize_t i, j, k, l
    cdef double best = INFINITY, val, qa, qb
    cdef Py_ssize_t bi = -1, bj = -1
    ga_np = np.empty((na, dim))
    cdef double[:, ::1] ga = ga_np
    cdef double[::1] sa = np.empty(na)
    cdef double[::1] sb = np.empty(nb)
    for i in range(na):
        for k in range(dim):
            val = 0.0
            for l in range(dim):
                val += a[i, l] * g[l, k]
            ga[i, k] = val
        qa = 0.0
        for k in range(dim):
            qa -= ga[i, k] * a[i, k]
        sa[i] = sqrt(qa) if qa > 0 else -1.0
    for j in range(nb):
        qb = 0.0
        for k in range(dim):
            val = 0.0
            for l in range(dim):
                val += b[j, l] * g[l, k]
            qb -= val * b[j, k]
        sb[j] = sqrt(qb) if qb > 0 else -1.0
    with nogil:
        for i in range(na):
            if sa[i] <= 0:
                continue
            for j in range(nb):
                if sb[j] <= 0:
                    continue
                val = 0.0
                for k in range(dim):
                    val += ga[i, k] * b[j, k]
                val = fabs(val) / (sa[i] * sb[j])
                if val <= 1.0 and val < best:
                    best = val
                    bi = i
                    bj = j
    if bi < 0:
        return np.inf, -1, -1
    return best, int(bi), int(bj)
