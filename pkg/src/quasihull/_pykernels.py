"""numpy implementations of the hot kernels (fallback for the compiled ones)."""

import itertools

import numpy as np


def _triple_normals(vectors, triples):
    """Normals in R^4 of the hyperplanes spanned by row triples (signed 3x3 minors)."""
    a, b, c = (vectors[triples[:, k]] for k in range(3))
    out = np.empty((len(triples), 4))
    cols = [(1, 2, 3), (0, 2, 3), (0, 1, 3), (0, 1, 2)]
    for k, (i, j, l) in enumerate(cols):
        minor = (
            a[:, i] * (b[:, j] * c[:, l] - b[:, l] * c[:, j])
            - a[:, j] * (b[:, i] * c[:, l] - b[:, l] * c[:, i])
            + a[:, l] * (b[:, i] * c[:, j] - b[:, j] * c[:, i])
        )
        out[:, k] = minor if k % 2 == 0 else -minor
    return out


def support_planes(vectors, tol):
    """Triples whose linear span supports the cone over the rows of ``vectors``.

    Returns ``(triples, normals)``; each normal is unit length and oriented
    so that every row has pairing >= -tol with it.
    """
    vectors = np.ascontiguousarray(vectors, dtype=float)
    n = len(vectors)
    if n < 3:
        return np.zeros((0, 3), dtype=np.int64), np.zeros((0, 4))
    triples = np.array(list(itertools.combinations(range(n), 3)), dtype=np.int64)
    normals = _triple_normals(vectors, triples)
    norms = np.linalg.norm(normals, axis=1)
    ok = norms > 1e-12
    triples, normals = triples[ok], normals[ok] / norms[ok, None]
    side = normals @ vectors.T
    upper = np.all(side >= -tol, axis=1)
    lower = np.all(side <= tol, axis=1)
    keep = upper | lower
    normals = np.where(upper[:, None], normals, -normals)[keep]
    return triples[keep], normals


def min_pairing(points_a, points_b, form):
    """Smallest normalized pairing |<a,b>| / sqrt(q(a) q(b)) over timelike pairs.

    ``q(x) = -<x,x>`` must be positive for both points; pairs with ratio > 1
    are ignored.  Returns ``(value, i, j)``; value is inf if nothing counts.
    """
    a = np.asarray(points_a, dtype=float)
    b = np.asarray(points_b, dtype=float)
    qa = -np.einsum("ij,jk,ik->i", a, form, a)
    qb = -np.einsum("ij,jk,ik->i", b, form, b)
    good_a, good_b = qa > 0, qb > 0
    if not (good_a.any() and good_b.any()):
        return np.inf, -1, -1
    ia, ib = np.flatnonzero(good_a), np.flatnonzero(good_b)
    a = a[ia] / np.sqrt(qa[ia])[:, None]
    b = b[ib] / np.sqrt(qb[ib])[:, None]
    ratio = np.abs(a @ form @ b.T)
    ratio[ratio > 1.0] = np.inf
    k = int(np.argmin(ratio))
    i, j = divmod(k, ratio.shape[1])
    val = float(ratio[i, j])
    if not np.isfinite(val):
        return np.inf, -1, -1
    return val, int(ia[i]), int(ib[j])
