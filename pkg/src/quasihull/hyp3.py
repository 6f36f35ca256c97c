"""Hyperbolic 3-space in the Hermitian-matrix model.

A real 4-vector ``(x1, x2, x3, x4)`` stands for the Hermitian matrix
``[[x4 + x1, x2 - i x3], [x2 + i x3, x4 - x1]]``; the Lorentzian form
``x1^2 + x2^2 + x3^2 - x4^2`` equals minus its determinant.  The ideal
point ``z = v1/v2`` of CP^1 is the null vector of ``v v*``.

Convex hulls of finitely many ideal points are found by support-plane
enumeration over triples.  Faces are "top" when the orientation induced
by the cyclic order of their vertices agrees with the outward normal.
"""

import cmath
import csv
import io
import math
from collections import deque

import numpy as np

from . import kernels
from .errors import CollinearInput, DegenerateHull, NonDiskSide, NonJordanOrder, PointOnCurve
from .mobius import (
    CircleMap,
    MobiusComplex,
    complex_mobius_from_triples,
    cyclically_increasing,
    mobius_from_triples,
    to_angle,
)

FORM31 = np.diag([1.0, 1.0, 1.0, -1.0])
INCIDENCE_TOL = 1e-10
TOP, BOTTOM = "top", "bottom"


def inner31(x, y):
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    return x[..., 0] * y[..., 0] + x[..., 1] * y[..., 1] + x[..., 2] * y[..., 2] - x[..., 3] * y[..., 3]


def herm_from_vec(x):
    x1, x2, x3, x4 = x
    return np.array([[x4 + x1, x2 - 1j * x3], [x2 + 1j * x3, x4 - x1]])


def vec_from_herm(h):
    h = np.asarray(h, dtype=complex)
    return np.array(
        [
            (h[0, 0].real - h[1, 1].real) / 2.0,
            h[1, 0].real,
            h[1, 0].imag,
            (h[0, 0].real + h[1, 1].real) / 2.0,
        ]
    )


def _pair(z):
    if isinstance(z, (tuple, list, np.ndarray)) and len(z) == 2:
        return np.asarray(z, dtype=complex)
    if isinstance(z, (float, int)) and math.isinf(z):
        return np.array([1.0, 0.0], dtype=complex)
    return np.array([complex(z), 1.0])


def ideal_embed(z):
    """Null vector of v v* for z in CP^1 (complex, inf, or a homogeneous pair)."""
    v = _pair(z)
    return np.array(
        [
            (abs(v[0]) ** 2 - abs(v[1]) ** 2) / 2.0,
            (v[1] * np.conj(v[0])).real,
            (v[1] * np.conj(v[0])).imag,
            (abs(v[0]) ** 2 + abs(v[1]) ** 2) / 2.0,
        ]
    )


def act(matrix, x):
    """PSL(2,C) action A.X = A X A* on a 4-vector."""
    a = np.asarray(matrix, dtype=complex)
    return vec_from_herm(a @ herm_from_vec(x) @ a.conj().T)


def normalize_point(x):
    x = np.asarray(x, dtype=float)
    q = -float(inner31(x, x))
    if q <= 0:
        raise ValueError("not a point of H^3")
    x = x / math.sqrt(q)
    return x if x[3] > 0 else -x


def distance(x, y):
    return float(np.arccosh(max(1.0, -float(inner31(x, y)))))


def _complex_of(z):
    return z if isinstance(z, complex) else (math.inf if math.isinf(float(z)) else complex(z))


class Face:
    """Support plane of the hull with its ideal vertices in circle order."""

    __slots__ = ("vertices", "plane", "side")

    def __init__(self, vertices, plane, side):
        self.vertices = tuple(vertices)
        self.plane = plane
        self.side = side

    def edges(self):
        k = len(self.vertices)
        return [tuple(sorted((self.vertices[i], self.vertices[(i + 1) % k]))) for i in range(k)]

    def __repr__(self):
        return f"Face({self.vertices}, side={self.side!r})"


class HullComplexH3:
    """Ideal convex hull: vertices, faces with inward unit duals, bending edges."""

    def __init__(self, points, vectors, faces, marked, planar):
        self.points = points
        self.vectors = vectors
        self.faces = faces
        self.marked = tuple(marked)
        self.planar = planar
        self.edges = {}
        for idx, face in enumerate(faces):
            for e in face.edges():
                self.edges.setdefault(e, []).append(idx)

    def side_faces(self, side):
        return [i for i, f in enumerate(self.faces) if f.side in (side, "both")]

    def bending(self, edge):
        """Exterior dihedral angle at an interior edge (0 on the boundary polygon)."""
        fs = self.edges[edge]
        if len(fs) != 2 or self.faces[fs[0]].side != self.faces[fs[1]].side:
            return 0.0
        c = float(inner31(self.faces[fs[0]].plane, self.faces[fs[1]].plane))
        return math.acos(max(-1.0, min(1.0, c)))

    def bending_edges(self, side):
        out = {}
        for e, fs in self.edges.items():
            if len(fs) == 2 and all(self.faces[f].side == side for f in fs):
                out[e] = self.bending(e)
        return out

    def combinatorics(self):
        """Face vertex sets with side labels, as a canonical sorted list."""
        return sorted((tuple(sorted(f.vertices)), f.side) for f in self.faces)

    def to_json(self):
        def cpx(z):
            return ["inf", 0.0] if z == math.inf else [z.real, z.imag]

        return {
            "vertices": [cpx(z) for z in self.points],
            "marked": list(self.marked),
            "planar": self.planar,
            "faces": [
                {"vertices": list(f.vertices), "plane": f.plane.tolist(), "side": f.side} for f in self.faces
            ],
            "edges": [
                {"vertices": list(e), "faces": fs, "bending": self.bending(e)} for e, fs in sorted(self.edges.items())
            ],
        }


def _circle_order(vectors, idx, plane_euclid):
    """Order coplanar ideal vertices around their circle."""
    pts = np.array([vectors[i][:3] / vectors[i][3] for i in idx])
    c = pts.mean(axis=0)
    normal = plane_euclid[:3]
    u = pts[0] - c
    u -= normal * (u @ normal) / (normal @ normal)
    u /= np.linalg.norm(u)
    w = np.cross(normal, u)
    w /= np.linalg.norm(w)
    ang = [math.atan2((p - c) @ w, (p - c) @ u) for p in pts]
    order = [idx[k] for k in np.argsort(ang)]
    # orient so that increasing curve index runs forward where possible
    k = len(order)
    forward = sum(1 for i in range(k) if order[(i + 1) % k] > order[i])
    if forward < k - forward:
        order = order[::-1]
    start = order.index(min(order))
    return order[start:] + order[:start]


def convex_hull_ideal(points, marked=(0, 1, 2)):
    """Convex hull of ideal points listed in cyclic (Jordan) order.

    Coplanar inputs (all points on one round circle) give a single face
    labelled on both sides and ``planar=True``.
    """
    pts = [_complex_of(z) for z in points]
    n = len(pts)
    if n < 3:
        raise CollinearInput("need at least three points")
    vectors = np.array([ideal_embed(z) for z in pts])
    unit = vectors / np.linalg.norm(vectors, axis=1)[:, None]
    for i in range(n):
        for j in range(i + 1, n):
            if np.linalg.norm(unit[i] - unit[j]) < 1e-9:
                raise NonJordanOrder(f"points {i} and {j} coincide")
    if len(set(marked)) != 3 or not all(0 <= m < n for m in marked):
        raise ValueError("marked must name three distinct vertices")
    triples, normals = kernels.support_planes(unit, 1e-9)
    faces, seen = [], set()
    planar = False
    for nrm in normals:
        s = unit @ nrm
        members = tuple(np.flatnonzero(np.abs(s) <= 1e-9).tolist())
        if members in seen:
            continue
        seen.add(members)
        if len(members) == n:
            planar = True
        plane = FORM31 @ nrm
        plane = plane / math.sqrt(float(inner31(plane, plane)))
        order = _circle_order(vectors, list(members), nrm)
        faces.append((order, plane, nrm))
    if planar:
        order, plane, _ = next(f for f in faces if len(f[0]) == n)
        face_list = [Face(order, plane, "both")]
    else:
        face_list = []
        for order, plane, nrm in faces:
            a, b, c = sorted(order)[:3]
            chart = [vectors[i][:3] / vectors[i][3] for i in (a, b, c)]
            witness = np.cross(chart[1] - chart[0], chart[2] - chart[0])
            side = TOP if witness @ (-nrm[:3]) > 0 else BOTTOM
            face_list.append(Face(order, plane, side))
    hull = HullComplexH3(pts, vectors, face_list, marked, planar)
    for i in range(n):
        e = tuple(sorted((i, (i + 1) % n)))
        if e not in hull.edges:
            raise NonJordanOrder(f"consecutive points {e} do not span a hull edge")
    return hull


class PleatedDevelopment:
    """Per-face complex Möbius charts flattening one side of the hull into H^2.

    ``boundary[v]`` is the normalized real position of ideal vertex v.
    """

    def __init__(self, side, charts, boundary, bending, base):
        self.side = side
        self.charts = charts
        self.boundary = boundary
        self.bending = bending
        self.base = base

    def values(self, n):
        return np.array([self.boundary[v] for v in range(n)])


def _real(z):
    if z == math.inf or (isinstance(z, complex) and abs(z) > 1e15):
        return math.inf
    return float(np.real(z))


def develop_pleated_boundary(hull, side, base=None):
    """Unfold one side of the hull into the upper half-plane.

    The base face is charted by sending three of its vertices to 0, 1, inf;
    crossing a bending edge rotates the next face about the common geodesic
    until it lies in the same plane on the other side of the edge.  The
    result is normalized so the marked vertices land on 0, 1, inf.
    """
    faces = hull.side_faces(side)
    if not faces:
        raise NonDiskSide(f"no faces on side {side!r}")
    adjacency = {f: [] for f in faces}
    for e, fs in hull.edges.items():
        if len(fs) == 2 and fs[0] in adjacency and fs[1] in adjacency:
            adjacency[fs[0]].append((fs[1], e))
            adjacency[fs[1]].append((fs[0], e))
    base = faces[0] if base is None else base
    z = hull.points
    first = hull.faces[base].vertices
    charts = {base: complex_mobius_from_triples([z[v] for v in first[:3]], [0.0, 1.0, math.inf])}
    bending = {}
    queue = deque([base])
    while queue:
        f = queue.popleft()
        for g, (a, c) in adjacency[f]:
            if g in charts:
                continue
            b = next(v for v in hull.faces[f].vertices if v not in (a, c))
            w = next(v for v in hull.faces[g].vertices if v not in (a, c))
            norm = complex_mobius_from_triples([z[a], z[b], z[c]], [0.0, 1.0, math.inf])
            beta = cmath.phase(norm(z[w]))
            rot = MobiusComplex(np.array([[cmath.exp(0.5j * (math.pi - beta)), 0], [0, cmath.exp(-0.5j * (math.pi - beta))]]))
            charts[g] = charts[f] @ norm.inverse() @ rot @ norm
            bending[(a, c)] = math.pi - abs(beta)
            queue.append(g)
    if len(charts) != len(faces):
        raise NonDiskSide(f"faces on side {side!r} are not connected")
    raw = {}
    for f, chart in charts.items():
        for v in hull.faces[f].vertices:
            if v not in raw:
                raw[v] = _real(chart(z[v]))
    n = len(z)
    if len(raw) != n:
        raise NonDiskSide(f"side {side!r} misses some vertices")
    xs = np.array([raw[v] for v in range(n)])
    marked = hull.marked
    if not cyclically_increasing(to_angle(xs[list(marked)])):
        xs = -xs
    g = mobius_from_triples([xs[m] for m in marked], [0.0, 1.0, math.inf])
    values = g(xs)
    boundary = {v: float(values[v]) for v in range(n)}
    return PleatedDevelopment(side, charts, boundary, bending, base)


def hyp_gluing_samples(hull):
    """The gluing map at the vertices: top-developed position -> bottom-developed position."""
    if len(hull.points) < 3:
        raise DegenerateHull("need at least three vertices")
    top = develop_pleated_boundary(hull, TOP)
    if hull.planar:
        xs = top.values(len(hull.points))
        return CircleMap(xs, xs)
    bottom = develop_pleated_boundary(hull, BOTTOM)
    n = len(hull.points)
    return CircleMap(top.values(n), bottom.values(n))


def gluing_csv(samples_map, hull=None):
    """CSV with columns vertex_index, x_plus, x_minus."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["vertex_index", "x_plus", "x_minus"])
    if hull is not None:
        top = develop_pleated_boundary(hull, TOP)
        bottom = top if hull.planar else develop_pleated_boundary(hull, BOTTOM)
        for v in range(len(hull.points)):
            w.writerow([v, repr(top.boundary[v]), repr(bottom.boundary[v])])
    else:
        for i, (x, y) in enumerate(samples_map.samples()):
            w.writerow([i, repr(x), repr(y)])
    return buf.getvalue()


def nearest_point_retract(z, hull):
    """Tangency point of the smallest horoball at z touching the hull.

    The horofunction ``X -> -<X, Z>`` is convex along geodesics, so its
    minimum over the hull sits on a face (foot of the projection of Z) or
    on an edge, where it has the closed form
    ``X ~ A/a + B/b`` with ``a = -<A,Z>``, ``b = -<B,Z>``.
    """
    zc = _complex_of(z)
    target = ideal_embed(zc)
    unit = target / np.linalg.norm(target)
    for v in hull.vectors:
        if np.linalg.norm(unit - v / np.linalg.norm(v)) < 1e-12:
            raise PointOnCurve("point is a vertex of the curve")
    best, best_val = None, math.inf
    for face in hull.faces:
        plane = face.plane
        foot = target - float(inner31(target, plane)) * plane
        if -float(inner31(foot, foot)) <= 1e-300:
            continue
        foot = normalize_point(foot)
        coeffs, *_ = np.linalg.lstsq(hull.vectors[list(face.vertices)].T, foot, rcond=None)
        if np.all(coeffs >= -1e-12) and np.allclose(hull.vectors[list(face.vertices)].T @ coeffs, foot, atol=1e-9):
            val = abs(float(inner31(target, plane)))
            if val < best_val:
                best, best_val = foot, val
    for a_idx, b_idx in hull.edges:
        va, vb = hull.vectors[a_idx], hull.vectors[b_idx]
        a, b = -float(inner31(va, target)), -float(inner31(vb, target))
        g = -float(inner31(va, vb))
        val = math.sqrt(2.0 * a * b / g)
        if val < best_val:
            best, best_val = normalize_point(va / a + vb / b), val
    return best


def horofunction(z, x):
    """Busemann-type height -<X, Z> of a point X relative to the ideal point z."""
    return -float(inner31(x, ideal_embed(_complex_of(z))))
