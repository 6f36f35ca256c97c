"""Anti-de Sitter 3-space as PSL(2,R), its boundary Ein^{1,1} = RP^1 x RP^1.

A 4-vector ``(x1, x2, x3, x4)`` stands for the matrix
``[[x1 - x3, -x2 + x4], [x2 + x4, x1 + x3]]`` and ``q = -det`` is the form
of signature (2,2): ``-x1^2 - x2^2 + x3^2 + x4^2``.  The boundary point
``(p, q)`` is the rank-one matrix with image p and kernel q.

Hulls are cone hulls of sign-consistent lifts of the vertices (pairwise
negative pairings), which places them in the affine chart given by the
functional ``-<sum of lifts, .>``.  Time orientation: the future of a
point ``g`` is the direction ``R g`` with ``R = [[0, 1], [-1, 0]]``.
"""

import itertools
import math
from collections import deque

import numpy as np

from . import kernels
from .earthquake import LEFT, RIGHT, Earthquake, FiniteLamination, GeodesicH2
from .errors import (
    ChartFailure,
    NonUnitPoint,
    NotAcausal,
    NotOnFace,
    NotSpacelike,
    NotTimelike,
    PlanarHull,
    PlanarSide,
    RouteMismatch,
    SchemaError,
)
from .mobius import (
    CircleMap,
    MobiusReal,
    angular_distance,
    cyclically_increasing,
    format_value,
    homogeneous,
    mobius_from_triples,
    parse_value,
    to_angle,
)

FORM22 = np.diag([-1.0, -1.0, 1.0, 1.0])
TIME_GENERATOR = np.array([[0.0, 1.0], [-1.0, 0.0]])
FUTURE, PAST = "future", "past"


# ---------------------------------------------------------------------------
# the model


def mat(x):
    x1, x2, x3, x4 = x
    return np.array([[x1 - x3, -x2 + x4], [x2 + x4, x1 + x3]])


def vec(m):
    a, b, c, d = np.asarray(m, dtype=float).ravel()
    return np.array([(a + d) / 2.0, (c - b) / 2.0, (d - a) / 2.0, (b + c) / 2.0])


def inner22(x, y):
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    return -x[..., 0] * y[..., 0] - x[..., 1] * y[..., 1] + x[..., 2] * y[..., 2] + x[..., 3] * y[..., 3]


def qform(x):
    return float(inner22(x, x))


def normalize_point(x):
    """Scale a timelike vector to q = -1 (sign kept)."""
    x = np.asarray(x, dtype=float)
    q = qform(x)
    if q >= 0:
        raise NotTimelike("vector is not in AdS^3")
    return x / math.sqrt(-q)


def ein_embed(p, q):
    """Rank-one matrix [a; b] [d, -c] with image p = a/b and kernel q = c/d (as a 4-vector)."""
    u = homogeneous(parse_value(p) if isinstance(p, str) else p)
    k = homogeneous(parse_value(q) if isinstance(q, str) else q)
    return vec(np.outer(u, [k[1], -k[0]]))


def ein_decode(x):
    """(image, kernel) of a rank-one 4-vector."""
    m = mat(x)
    col = m[:, 0] if np.linalg.norm(m[:, 0]) >= np.linalg.norm(m[:, 1]) else m[:, 1]
    row = m[0] if np.linalg.norm(m[0]) >= np.linalg.norm(m[1]) else m[1]
    p = math.inf if abs(col[1]) < 1e-15 * abs(col[0]) else col[0] / col[1]
    # kernel (c, d) is proportional to (-row[1], row[0])
    c, d = -row[1], row[0]
    q = math.inf if abs(d) < 1e-15 * abs(c) else c / d
    return p, q


def dual_plane(x, tol=1e-9):
    """Normal vector of the plane x^perp (the point itself, checked to be unit)."""
    x = np.asarray(x, dtype=float)
    if abs(qform(x) + 1.0) > tol:
        raise NonUnitPoint("dual plane needs q(x) = -1")
    return x.copy()


def dual_point(normal, tol=1e-9):
    n = np.asarray(normal, dtype=float)
    if abs(qform(n) + 1.0) > tol:
        raise NonUnitPoint("plane normal must satisfy q = -1")
    return n.copy()


def plane_boundary_point(gamma, p):
    """The point of the boundary of gamma^perp with image p: (p, gamma^{-1} p)."""
    g = MobiusReal(mat(gamma))
    return ein_embed(p, g.inverse()(p))


def timelike_distance(x, y, tol=1e-12):
    """Length of the timelike segment between two unit points, in [0, pi/2]."""
    c = abs(float(inner22(x, y)))
    if c > 1.0 + tol:
        raise NotTimelike("points are not timelike related")
    return math.acos(min(1.0, c))


def elliptic_involution(x):
    """The order-two rotation about the point x of the upper half-plane, as a 4-vector."""
    z = complex(x)
    a, b = z.real, z.imag
    # conjugate of [[0, -1], [1, 0]] by z -> b z + a
    g = np.array([[b, a], [0.0, 1.0]]) / math.sqrt(b)
    return vec(g @ np.array([[0.0, -1.0], [1.0, 0.0]]) @ np.linalg.inv(g))


def fixed_point(m):
    """Upper half-plane fixed point of an elliptic matrix."""
    a, b, c, d = np.asarray(m, dtype=float).ravel()
    disc = (a + d) ** 2 - 4.0 * (a * d - b * c)
    if disc >= 0 or abs(c) < 1e-300:
        raise NotSpacelike("matrix is not elliptic")
    z = complex(a - d, math.sqrt(-disc)) / (2.0 * c)
    return z if z.imag > 0 else z.conjugate()


# ---------------------------------------------------------------------------
# acausal polygons


def acausal_check(points, allow_lightlike=False):
    """Whether the pairs (x_i, y_i) form the graph of an orientation-preserving map.

    Returns ``(ok, certificate)``; the certificate names the offending pair or
    triple.  With ``allow_lightlike`` repeated coordinates are tolerated as
    long as both sequences stay weakly cyclically monotone (piecewise
    lightlike curves such as the rhombus).
    """
    xs = np.array([to_angle(parse_value(p) if isinstance(p, str) else p) for p, _ in points], dtype=float)
    ys = np.array([to_angle(parse_value(q) if isinstance(q, str) else q) for _, q in points], dtype=float)
    n = len(xs)
    if n < 3:
        return False, {"reason": "fewer than three points"}
    for i, j in itertools.combinations(range(n), 2):
        same_x = angular_distance(xs[i], xs[j]) < 1e-13
        same_y = angular_distance(ys[i], ys[j]) < 1e-13
        if same_x and same_y:
            return False, {"reason": "repeated point", "pair": [i, j]}
        if (same_x or same_y) and not allow_lightlike:
            return False, {"reason": "lightlike pair", "pair": [i, j]}
    strict = not allow_lightlike
    for name, ang in (("x", xs), ("y", ys)):
        if not cyclically_increasing(ang, strict=strict):
            for i, j, k in itertools.combinations(range(n), 3):
                sub = ang[[i, j, k]]
                if not cyclically_increasing(sub, strict=False):
                    return False, {"reason": f"{name} coordinates reverse orientation", "triple": [i, j, k]}
            return False, {"reason": f"{name} coordinates are not cyclically increasing"}
    return True, {}


class AcausalPolygon:
    """Cyclically ordered boundary points (x_i, y_i) with three marked vertices."""

    def __init__(self, points, marked=(0, 1, 2), allow_lightlike=False):
        self.points = [
            (parse_value(p) if isinstance(p, str) else float(p), parse_value(q) if isinstance(q, str) else float(q))
            for p, q in points
        ]
        self.marked = tuple(int(m) for m in marked)
        self.allow_lightlike = allow_lightlike
        if len(set(self.marked)) != 3 or not all(0 <= m < len(self.points) for m in self.marked):
            raise SchemaError("marked must name three distinct vertices")
        ok, cert = acausal_check(self.points, allow_lightlike)
        if not ok:
            raise NotAcausal(f"not an acausal polygon: {cert}")

    @property
    def xs(self):
        return np.array([p for p, _ in self.points])

    @property
    def ys(self):
        return np.array([q for _, q in self.points])

    @classmethod
    def from_json(cls, doc):
        try:
            pts = [(parse_value(a), parse_value(b)) for a, b in doc["points"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"malformed polygon: {exc}") from exc
        return cls(pts, doc.get("marked", (0, 1, 2)), doc.get("allow_lightlike", False))

    def to_json(self):
        return {
            "points": [[format_value(p), format_value(q)] for p, q in self.points],
            "marked": list(self.marked),
        }

    @classmethod
    def from_map(cls, func, xs, marked=(0, 1, 2)):
        xs = [float(x) for x in xs]
        return cls([(x, func(x)) for x in xs], marked)

    def circle_map(self):
        return CircleMap(self.xs, self.ys)


def random_acausal_polygon(n, rng, marked=(0, 1, 2)):
    """Random acausal n-gon: sorted random angles in both coordinates, cyclically shifted."""
    tx = np.sort(rng.uniform(-math.pi, math.pi, n))
    ty = np.roll(np.sort(rng.uniform(-math.pi, math.pi, n)), int(rng.integers(n)))
    return AcausalPolygon(list(zip(np.tan(tx / 2.0), np.tan(ty / 2.0))), marked)


def rhombus_polygon():
    """The piecewise lightlike quadrilateral with vertices (0,0), (1,0), (1,1), (0,1)."""
    return AcausalPolygon([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)], (0, 1, 2), allow_lightlike=True)


def degeneration_polygon(delta):
    """Acausal quadrilateral that tends to the rhombus as delta -> 0."""
    return AcausalPolygon([(0.0, 0.0), (1.0, delta), (1.0 + delta, 1.0), (-delta, 1.0 + delta)])


# ---------------------------------------------------------------------------
# hulls


class FaceAdS:
    __slots__ = ("vertices", "normal", "gamma", "side")

    def __init__(self, vertices, normal, gamma, side):
        self.vertices = tuple(vertices)
        self.normal = normal
        self.gamma = gamma
        self.side = side

    def edges(self):
        k = len(self.vertices)
        return [tuple(sorted((self.vertices[i], self.vertices[(i + 1) % k]))) for i in range(k)]

    @property
    def spacelike(self):
        return self.gamma is not None

    def __repr__(self):
        return f"FaceAdS({self.vertices}, side={self.side!r})"


class HullComplexAdS:
    """Convex hull of an acausal polygon: lifts, faces with duals, bending edges."""

    def __init__(self, polygon, lifts, faces, planar):
        self.polygon = polygon
        self.lifts = lifts
        self.faces = faces
        self.planar = planar
        self.edges = {}
        for idx, face in enumerate(faces):
            for e in face.edges():
                self.edges.setdefault(e, []).append(idx)

    @property
    def marked(self):
        return self.polygon.marked

    @property
    def points(self):
        return self.polygon.points

    def side_faces(self, side):
        return [i for i, f in enumerate(self.faces) if f.side in (side, "both")]

    def bending(self, edge):
        fs = self.edges[edge]
        if len(fs) != 2:
            return 0.0
        f, g = self.faces[fs[0]], self.faces[fs[1]]
        if f.side != g.side or not (f.spacelike and g.spacelike):
            return 0.0
        c = abs(float(inner22(f.normal, g.normal)))
        return math.acosh(max(1.0, c))

    def bending_edges(self, side):
        out = {}
        for e, fs in self.edges.items():
            if len(fs) == 2 and all(self.faces[f].side == side for f in fs):
                out[e] = self.bending(e)
        return out

    def combinatorics(self):
        return sorted((tuple(sorted(f.vertices)), f.side) for f in self.faces)

    def to_json(self):
        return {
            "polygon": self.polygon.to_json(),
            "planar": self.planar,
            "faces": [
                {
                    "vertices": list(f.vertices),
                    "side": f.side,
                    "dual": None if f.gamma is None else f.normal.tolist(),
                }
                for f in self.faces
            ],
            "edges": [
                {"vertices": list(e), "faces": fs, "bending": self.bending(e)} for e, fs in sorted(self.edges.items())
            ],
        }


def consistent_lifts(polygon, tol=1e-12):
    """Lifts of the vertices with pairwise non-positive pairings.

    Signs are propagated along the pairs with nonzero pairing; a conflict
    means no affine chart contains the hull and raises ChartFailure.
    """
    raw = np.array([ein_embed(p, q) for p, q in polygon.points])
    raw /= np.linalg.norm(raw, axis=1)[:, None]
    n = len(raw)
    gram = raw @ FORM22 @ raw.T
    signs = np.zeros(n)
    for start in range(n):
        if signs[start]:
            continue
        signs[start] = 1.0
        queue = deque([start])
        while queue:
            i = queue.popleft()
            for j in range(n):
                if j == i or abs(gram[i, j]) <= tol:
                    continue
                want = -signs[i] * math.copysign(1.0, gram[i, j])
                if signs[j] == 0:
                    signs[j] = want
                    queue.append(j)
                elif signs[j] != want:
                    raise ChartFailure("vertex lifts admit no consistent sign (no affine chart)")
    lifts = raw * signs[:, None]
    g = lifts @ FORM22 @ lifts.T
    np.fill_diagonal(g, 0.0)
    if np.any(g > tol):
        raise ChartFailure("vertex lifts admit no consistent sign (no affine chart)")
    if not polygon.allow_lightlike and np.any(g[~np.eye(n, dtype=bool)] > -tol):
        raise NotAcausal("two vertices are lightlike related")
    return lifts


def _future(normal, members, lifts):
    s = lifts[list(members)].sum(axis=0)
    t = vec(TIME_GENERATOR @ mat(s))
    return float(inner22(normal, t)) < 0


def convex_hull_acausal(polygon, tol=1e-9):
    """Cone hull of the vertex lifts, faces labelled future/past.

    Each spacelike face stores its dual point ``gamma`` (q = -1, as a
    PSL(2,R) matrix it maps every vertex's second coordinate to its first).
    Lightlike faces (degenerate inputs such as the rhombus) carry no dual.
    """
    if not isinstance(polygon, AcausalPolygon):
        polygon = AcausalPolygon(polygon)
    lifts = consistent_lifts(polygon)
    n = len(lifts)
    _, normals = kernels.support_planes(lifts, tol)
    faces, seen = [], set()
    planar = False
    for nrm in normals:
        s = lifts @ nrm
        members = tuple(np.flatnonzero(np.abs(s) <= tol).tolist())
        if members in seen:
            continue
        seen.add(members)
        if len(members) == n:
            planar = True
        normal = FORM22 @ nrm
        order = sorted(members)
        q = qform(normal)
        if q < -1e-12:
            normal = normal / math.sqrt(-q)
            gamma = mat(normal)
        else:
            gamma = None
        side = FUTURE if _future(normal, members, lifts) else PAST
        faces.append(FaceAdS(order, normal, gamma, side))
    if planar:
        face = next(f for f in faces if len(f.vertices) == n)
        faces = [FaceAdS(face.vertices, face.normal, face.gamma, "both")]
    return HullComplexAdS(polygon, lifts, faces, planar)


# ---------------------------------------------------------------------------
# projections, laminations, gluing


class FaceProjection:
    """Left and right projections of a spacelike face onto H^2."""

    def __init__(self, gamma, tol=1e-9):
        if gamma is None:
            raise NotSpacelike("face is not spacelike")
        self.gamma = np.asarray(gamma, dtype=float)
        self.normal = vec(self.gamma)
        self.tol = tol

    def pi_r(self, s):
        s = np.asarray(s, dtype=float)
        if abs(float(inner22(s, self.normal))) > self.tol * max(1.0, np.abs(s).max()):
            raise NotOnFace("point is not on the face plane")
        return fixed_point(np.linalg.inv(self.gamma) @ mat(s))

    def pi_l(self, s):
        x = self.pi_r(s)
        a, b, c, d = self.gamma.ravel()
        return (a * x + b) / (c * x + d)


def face_projections(hull, face_index):
    return FaceProjection(hull.faces[face_index].gamma)


def bending_lamination(hull, side):
    """Bending lamination of one side, via the left and the right projection.

    Returns ``(lam_l, lam_r)``; each bending edge (v_a, v_b) gives the leaf
    (x_a, x_b) on the left and (y_a, y_b) on the right, weighted by the
    bending angle.
    """
    edges = hull.bending_edges(side)
    if not edges:
        if hull.planar:
            return FiniteLamination(), FiniteLamination()
        raise PlanarSide(f"side {side!r} has no bending edges")
    pts = hull.points
    keys = sorted(edges)
    lam_l = FiniteLamination([GeodesicH2(pts[a][0], pts[b][0]) for a, b in keys], [edges[e] for e in keys])
    lam_r = FiniteLamination([GeodesicH2(pts[a][1], pts[b][1]) for a, b in keys], [edges[e] for e in keys])
    return lam_l, lam_r


def _normalize_values(xs, marked):
    xs = np.asarray(xs, dtype=float)
    if not cyclically_increasing(to_angle(xs[list(marked)])):
        xs = -xs
    g = mobius_from_triples([xs[m] for m in marked], [0.0, 1.0, math.inf])
    out = np.atleast_1d(g(xs)).astype(float)
    out[list(marked)] = (0.0, 1.0, math.inf)
    return out


def _sqrt_hyperbolic(m):
    if np.trace(m) < 0:
        m = -m
    return (m + np.eye(2)) / math.sqrt(np.trace(m) + 2.0)


def develop_side(hull, side, base=None):
    """Developed positions of the vertices for one boundary side (normalized).

    On a face with dual gamma, the right projection is an isometry; across a
    bending edge the next face's chart is corrected by the square root of
    gamma_k^{-1} gamma_j, the half-translation along the edge.
    """
    faces = [f for f in hull.side_faces(side) if hull.faces[f].spacelike]
    if not faces:
        raise PlanarSide(f"no spacelike faces on side {side!r}")
    adjacency = {f: [] for f in faces}
    for e, fs in hull.edges.items():
        if len(fs) == 2 and fs[0] in adjacency and fs[1] in adjacency:
            adjacency[fs[0]].append(fs[1])
            adjacency[fs[1]].append(fs[0])
    base = faces[0] if base is None else base
    charts = {base: np.eye(2)}
    queue = deque([base])
    while queue:
        j = queue.popleft()
        gj = hull.faces[j].gamma
        for k in adjacency[j]:
            if k in charts:
                continue
            gk = hull.faces[k].gamma
            half = _sqrt_hyperbolic(np.linalg.inv(gk) @ gj)
            charts[k] = charts[j] @ np.linalg.inv(half)
            queue.append(k)
    if len(charts) != len(faces):
        raise PlanarSide(f"faces on side {side!r} are not connected")
    n = len(hull.points)
    raw = [None] * n
    for f, chart in charts.items():
        for v in hull.faces[f].vertices:
            if raw[v] is None:
                a, b = chart @ homogeneous(hull.points[v][1])
                raw[v] = math.inf if b == 0 else a / b
    if any(r is None for r in raw):
        raise PlanarSide(f"side {side!r} misses some vertices")
    return _normalize_values(raw, hull.marked)


def _earthquake_side_values(hull, side):
    lam_l, _ = bending_lamination(hull, side)
    handed = LEFT if side == FUTURE else RIGHT
    quake = Earthquake(lam_l, handed)
    return _normalize_values(quake.boundary(hull.polygon.xs), hull.marked)


def ads_gluing_samples(hull, route="both", tol=1e-7):
    """The gluing map at the vertices: future-developed -> past-developed position.

    Route "development" unfolds both sides; route "earthquake" composes the
    earthquakes along the left bending laminations; "both" computes the two
    and raises RouteMismatch if they differ by more than ``tol``.
    """
    if hull.planar:
        xs = _normalize_values(hull.polygon.xs, hull.marked)
        return CircleMap(xs, xs)
    if route in ("development", "both"):
        dev = (develop_side(hull, FUTURE), develop_side(hull, PAST))
    if route in ("earthquake", "both"):
        eq = (_earthquake_side_values(hull, FUTURE), _earthquake_side_values(hull, PAST))
    if route == "both":
        gap = max(
            float(np.max(angular_distance(to_angle(a), to_angle(b)))) for a, b in zip(dev, eq)
        )
        if gap > tol:
            raise RouteMismatch(f"development and earthquake routes differ by {gap:.3g}")
        xs, ys = dev
    elif route == "development":
        xs, ys = dev
    elif route == "earthquake":
        xs, ys = eq
    else:
        raise ValueError(f"unknown route {route!r}")
    return CircleMap(xs, ys)


def mess_check(hull):
    """Max deviation of the doubled-weight earthquakes from the vertex map x_i -> y_i."""
    xs, ys = hull.polygon.xs, hull.polygon.ys
    report = {"n": len(xs)}
    for side, handed, key in ((FUTURE, LEFT, "left_future"), (PAST, RIGHT, "right_past")):
        if hull.planar:
            lam = FiniteLamination()
        else:
            lam = bending_lamination(hull, side)[0].scaled(2.0)
        quake = Earthquake(lam, handed)
        raw = np.atleast_1d(quake.boundary(xs))
        m = hull.marked
        g = mobius_from_triples([raw[i] for i in m], [ys[i] for i in m])
        dev = angular_distance(to_angle(g(raw)), to_angle(ys))
        report[key] = float(np.max(dev))
    report["max_deviation"] = max(report["left_future"], report["right_past"])
    return report


# ---------------------------------------------------------------------------
# width and the invisible domain


def _triangles(face):
    v = face.vertices
    return [(v[0], v[i], v[i + 1]) for i in range(1, len(v) - 1)]


def _balanced(tri):
    """Rescale three lifts so that all their pairings are -1.

    This makes barycentric coordinates on the triangle invariant under
    isometries, so the grid search does not depend on the chart.  Triangles
    with a lightlike side are returned unchanged.
    """
    a, b, c = tri
    ab, bc, ca = (abs(float(inner22(u, v))) for u, v in ((a, b), (b, c), (c, a)))
    if min(ab, bc, ca) < 1e-14:
        return tri
    return np.array([a * math.sqrt(bc / (ab * ca)), b * math.sqrt(ca / (ab * bc)), c * math.sqrt(ab / (bc * ca))])


def _bary_grid(res):
    pts = [(i, j, res - i - j) for i in range(res + 1) for j in range(res + 1 - i)]
    return np.array(pts, dtype=float) / res


def _pairing_ratios(pa, pb):
    """Matrix of |<a, b>| / sqrt(q(a) q(b)); non-timelike or unrelated pairs get inf."""
    qa = -np.einsum("ij,jk,ik->i", pa, FORM22, pa)
    qb = -np.einsum("ij,jk,ik->i", pb, FORM22, pb)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.abs(pa @ FORM22 @ pb.T) / np.sqrt(np.outer(qa, qb))
    r[~np.isfinite(r) | (r > 1.0) | (qa[:, None] <= 0) | (qb[None, :] <= 0)] = np.inf
    return r


def _timelike_rows(points, rel=1e-9):
    q = -np.einsum("ij,jk,ik->i", points, FORM22, points)
    return q > rel * np.einsum("ij,ij->i", points, points)


def _seed_pairs(grid, tri_a, tri_b, count, res):
    """The best grid pairs, pairwise at least two grid steps apart."""
    pa, pb = grid @ tri_a, grid @ tri_b
    r = _pairing_ratios(pa, pb)
    r[~_timelike_rows(pa)] = np.inf
    r[:, ~_timelike_rows(pb)] = np.inf
    seeds = []
    for flat in np.argsort(r, axis=None):
        i, j = np.unravel_index(flat, r.shape)
        if not np.isfinite(r[i, j]) or len(seeds) == count:
            break
        far = all(
            np.abs(grid[i] - grid[a]).max() > 1.5 / res or np.abs(grid[j] - grid[b]).max() > 1.5 / res
            for a, b in seeds
        )
        if far:
            seeds.append((i, j))
    return [(grid[i], grid[j]) for i, j in seeds]


def _zoom_points(center, scale, grid):
    """Grid of the simplex homothetic to the face, centred at ``center``, clipped to the face."""
    corners = center[None, :] + scale * (np.eye(3) - 1.0 / 3.0)
    pts = np.clip(grid @ corners, 0.0, None)
    return pts / pts.sum(axis=1)[:, None]


def _pair_search(tri_a, tri_b, res=12, depth=40, seeds=4):
    """Minimize the normalized pairing over two triangles by zooming grids.

    Zooms start from the best few coarse-grid pairs; each step halves a
    grid centred at the current best pair and keeps the better of the old
    and new values.  Returns
    (best ratio, improvement of the last zoom step of the winning start).
    """
    grid = _bary_grid(res)
    best, best_gain = math.inf, math.inf
    for ba, bb in _seed_pairs(grid, tri_a, tri_b, seeds, res):
        value, gain, scale = math.inf, math.inf, 1.0
        for _ in range(depth):
            scale *= 0.5
            pa, pb = _zoom_points(ba, scale, grid), _zoom_points(bb, scale, grid)
            # near-null points (grid corners) only carry rounding noise: near a
            # shared ideal vertex the true ratio tends to a value >= 1
            pa, pb = pa[_timelike_rows(pa @ tri_a)], pb[_timelike_rows(pb @ tri_b)]
            if not (len(pa) and len(pb)):
                break
            val, i, j = kernels.min_pairing(pa @ tri_a, pb @ tri_b, FORM22)
            if not math.isfinite(val):
                break
            gain = value - val if math.isfinite(value) else math.inf
            if val <= value:
                value, ba, bb = val, pa[i], pb[j]
        if value < best:
            best, best_gain = value, gain
    return best, best_gain


def width(hull, res=12, depth=40):
    """Supremum of the timelike distance between the past and future sides.

    Returns ``{"lower", "upper", "argmax_faces", "planar"}``.  ``lower`` is
    attained by an explicit pair of points; ``upper`` adds the last zoom
    improvement (capped at pi/2) as an a-posteriori error estimate.
    """
    if hull.planar:
        return {"lower": 0.0, "upper": 0.0, "argmax_faces": [], "planar": True}
    past = hull.side_faces(PAST)
    future = hull.side_faces(FUTURE)
    best, gain, arg = math.inf, 0.0, []
    for i in past:
        for j in future:
            for ta in _triangles(hull.faces[i]):
                for tb in _triangles(hull.faces[j]):
                    val, g = _pair_search(_balanced(hull.lifts[list(ta)]), _balanced(hull.lifts[list(tb)]), res, depth)
                    if val < best:
                        best, gain, arg = val, g, [i, j]
    if not math.isfinite(best):
        raise NotTimelike("no timelike pair between the two sides")
    lower = math.acos(min(1.0, best))
    upper = min(math.pi / 2, math.acos(max(0.0, min(1.0, best - gain))) if math.isfinite(gain) else math.pi / 2)
    return {"lower": lower, "upper": max(lower, upper), "argmax_faces": arg, "planar": False}


def invisible_domain_contains(y, hull, tol=1e-12):
    """Whether the dual plane of y misses the hull (strict vertex-side certificate)."""
    s = hull.lifts @ FORM22 @ np.asarray(y, dtype=float)
    return bool(np.all(s > tol) or np.all(s < -tol))


def hull_point(hull, weights):
    """Unit AdS point of the hull with the given barycentric weights on the lifts."""
    w = np.asarray(weights, dtype=float)
    return normalize_point(w @ hull.lifts)
