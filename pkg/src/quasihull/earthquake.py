"""Finite measured laminations of H^2 and their earthquakes.

Handedness anchor: in the upper half-plane, for the single leaf (0, inf)
with base stratum {Re z < 0}, the *left* earthquake of weight t is
z -> e^t z on {Re z > 0}.  Every sign below follows from that anchor.

Also here: an interval estimate of the Thurston norm and the finite
approximation pipeline (ultraparallel perturbation, right-angled polygon
around a ball, reflection-orbit lamination).
"""

import itertools
import math

import numpy as np

from . import _h2 as h2
from .errors import (
    ConstructionFailure,
    CrossingInput,
    LeafEndpoint,
    OnWeightedLeaf,
    OrbitBudgetExceeded,
    SchemaError,
)
from .mobius import (
    TWO_PI,
    CircleMap,
    MobiusReal,
    angular_distance,
    from_angle,
    format_value,
    homogeneous,
    parse_value,
    to_angle,
)

LEFT, RIGHT = "left", "right"


# ---------------------------------------------------------------------------
# geodesics and laminations


class GeodesicH2:
    """Complete geodesic of H^2 given by its two ideal endpoints."""

    __slots__ = ("p", "q", "normal")

    def __init__(self, p, q):
        p, q = parse_value(p) if isinstance(p, str) else float(p), parse_value(q) if isinstance(q, str) else float(q)
        if angular_distance(to_angle(p), to_angle(q)) < 1e-14:
            raise ValueError("geodesic endpoints must differ")
        self.p, self.q = p, q
        self.normal = h2.geodesic_normal(p, q)

    @classmethod
    def from_normal(cls, n):
        return cls(*h2.geodesic_endpoints(n))

    def angles(self):
        return float(to_angle(self.p)), float(to_angle(self.q))

    def relation(self, other, tol=1e-11):
        """'equal', 'crossing', 'asymptotic' or 'ultraparallel'."""
        a = self.angles()
        b = other.angles()
        shared = sum(1 for s in a for t in b if angular_distance(s, t) < tol)
        if shared >= 2:
            return "equal"
        if shared == 1:
            return "asymptotic"
        start, span = a[0], (a[1] - a[0]) % TWO_PI
        inside = [0.0 < (t - start) % TWO_PI < span for t in b]
        return "crossing" if inside[0] != inside[1] else "ultraparallel"

    def distance(self, other):
        return h2.geodesic_distance(self.normal, other.normal)

    def side(self, point):
        """Sign of a boundary value (float) or hyperboloid point relative to the leaf."""
        v = h2.light_vector(point) if np.ndim(point) == 0 else np.asarray(point)
        s = float(h2.minner(v, self.normal))
        return 0 if abs(s) < 1e-12 else (1 if s > 0 else -1)

    def same_as(self, other, tol=1e-9):
        a, b = self.angles(), other.angles()
        d1 = max(angular_distance(a[0], b[0]), angular_distance(a[1], b[1]))
        d2 = max(angular_distance(a[0], b[1]), angular_distance(a[1], b[0]))
        return min(d1, d2) < tol

    def __repr__(self):
        return f"GeodesicH2({self.p!r}, {self.q!r})"


def leaf_displacement(a, b):
    """Reference distance on the space of geodesics: max endpoint angle gap."""
    s, t = a.angles(), b.angles()
    d1 = max(angular_distance(s[0], t[0]), angular_distance(s[1], t[1]))
    d2 = max(angular_distance(s[0], t[1]), angular_distance(s[1], t[0]))
    return float(min(d1, d2))


class FiniteLamination:
    """Finitely many pairwise non-crossing geodesics with positive weights."""

    def __init__(self, leaves=(), weights=(), check=True):
        self.leaves = [lf if isinstance(lf, GeodesicH2) else GeodesicH2(*lf) for lf in leaves]
        self.weights = [float(w) for w in weights]
        if len(self.leaves) != len(self.weights):
            raise ValueError("one weight per leaf")
        if check:
            if any(w <= 0 for w in self.weights):
                raise ValueError("weights must be positive")
            for i, j in itertools.combinations(range(len(self.leaves)), 2):
                rel = self.leaves[i].relation(self.leaves[j])
                if rel in ("crossing", "equal"):
                    raise CrossingInput(f"leaves {i} and {j} are {rel}")

    def __len__(self):
        return len(self.leaves)

    def __iter__(self):
        return iter(zip(self.leaves, self.weights))

    @classmethod
    def from_json(cls, doc):
        try:
            items = doc["leaves"]
            return cls(
                [GeodesicH2(parse_value(it["p"]), parse_value(it["q"])) for it in items],
                [float(it["w"]) for it in items],
            )
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"malformed lamination: {exc}") from exc

    def to_json(self):
        return {
            "leaves": [
                {"p": format_value(lf.p), "q": format_value(lf.q), "w": w} for lf, w in self
            ]
        }

    def scaled(self, factor):
        return FiniteLamination(self.leaves, [factor * w for w in self.weights], check=False)

    def pairwise_distances(self):
        n = len(self.leaves)
        if n == 0:
            return np.zeros((0, 0))
        normals = np.array([lf.normal for lf in self.leaves])
        g = np.abs(normals @ h2.FORM @ normals.T)
        d = np.arccosh(np.maximum(g, 1.0))
        np.fill_diagonal(d, 0.0)
        return d

    def is_ultraparallel(self):
        return all(
            self.leaves[i].relation(self.leaves[j]) == "ultraparallel"
            for i, j in itertools.combinations(range(len(self.leaves)), 2)
        )

    def matches(self, other, tol=1e-9):
        """Same leaves (as sets, endpoints within tol) with the same weights."""
        if len(self) != len(other):
            return False
        used = set()
        for lf, w in self:
            hit = None
            for j, (lg, v) in enumerate(other):
                if j not in used and lf.same_as(lg, tol) and abs(w - v) <= tol * max(1.0, abs(w)):
                    hit = j
                    break
            if hit is None:
                return False
            used.add(hit)
        return True


# ---------------------------------------------------------------------------
# earthquakes


def _dilation(factor):
    r = math.sqrt(factor)
    return np.array([[r, 0.0], [0.0, 1.0 / r]])


def _translation_toward_positive_side(leaf, weight, handed):
    """A(F') for F' on the positive side of the leaf, seen from the negative side."""
    p, q = homogeneous(leaf.p), homogeneous(leaf.q)
    g = np.array([[p[1], -p[0]], [q[1], -q[0]]])
    if np.linalg.det(g) < 0:
        g[0] *= -1.0
    # a point on the positive side of the leaf
    probe = h2.light_vector(leaf.p) + h2.light_vector(leaf.q) + 1e-3 * leaf.normal
    probe = probe if h2.minner(probe, leaf.normal) > 0 else None
    # boundary representative: the arc midpoint on the positive side
    ta, tb = leaf.angles()
    mid1 = ta + ((tb - ta) % TWO_PI) / 2.0
    x = float(np.tan(mid1 / 2.0)) if abs(math.cos(mid1 / 2.0)) > 1e-15 else math.inf
    if leaf.side(x) < 0:
        mid2 = mid1 + math.pi
        x = float(np.tan(mid2 / 2.0)) if abs(math.cos(mid2 / 2.0)) > 1e-15 else math.inf
    del probe
    gx = MobiusReal(g)(x)
    if not (gx > 0):
        g = np.array([[0.0, -1.0], [1.0, 0.0]]) @ g
    sign = 1.0 if handed == LEFT else -1.0
    t = np.linalg.inv(g) @ _dilation(math.exp(sign * weight)) @ g
    return MobiusReal(t)


class Earthquake:
    """Finite earthquake: lamination, handedness, base stratum, post-composition.

    ``base`` is a boundary point (float) or a point of the upper half-plane
    (complex); it must avoid the leaves.  The map is the identity on the base
    stratum, followed by the optional Möbius ``post``.
    """

    def __init__(self, lamination, side=LEFT, base=None, post=None):
        if side not in (LEFT, RIGHT):
            raise ValueError("side must be 'left' or 'right'")
        self.lamination = lamination
        self.side = side
        self.base = self._default_base() if base is None else base
        self.post = post if post is not None else MobiusReal.identity()
        self._base_vec = self._vector(self.base)
        self._base_sides = []
        for lf in lamination.leaves:
            s = float(h2.minner(self._base_vec, lf.normal))
            if abs(s) < 1e-12:
                raise OnWeightedLeaf("base point lies on a leaf")
            self._base_sides.append(1 if s > 0 else -1)
        # far side = the side away from the base
        self._moves = []
        for lf, w, s in zip(lamination.leaves, lamination.weights, self._base_sides):
            t = _translation_toward_positive_side(lf, w, side)
            self._moves.append(t if s < 0 else t.inverse())

    def _default_base(self):
        ends = sorted(a for lf in self.lamination.leaves for a in lf.angles())
        if not ends:
            return 0.0
        ext = ends + [ends[0] + TWO_PI]
        gaps = np.diff(ext)
        k = int(np.argmax(gaps))
        mid = ext[k] + gaps[k] / 2.0
        mid = (mid + math.pi) % TWO_PI - math.pi
        return float(np.tan(mid / 2.0)) if abs(abs(mid) - math.pi) > 1e-12 else math.inf

    @staticmethod
    def _vector(x):
        if isinstance(x, complex):
            return h2.from_upper(x)
        return h2.light_vector(float(x))

    def _crossed(self, vec):
        """Indices of leaves separating the base from vec, nearest to the base first."""
        crossed = []
        for k, (lf, s) in enumerate(zip(self.lamination.leaves, self._base_sides)):
            v = float(h2.minner(vec, lf.normal))
            scale = 1.0 + float(np.abs(vec).max())
            if abs(v) < 1e-12 * scale:
                continue
            if (v > 0) != (s > 0):
                crossed.append(k)
        if len(crossed) < 2:
            return crossed
        # a leaf nearer the base has more of the crossed leaves on its far side
        leaves = self.lamination.leaves

        def beyond(k):
            lf, s = leaves[k], self._base_sides[k]
            count = 0
            for j in crossed:
                if j == k:
                    continue
                vals = [float(h2.minner(h2.light_vector(e), lf.normal)) for e in (leaves[j].p, leaves[j].q)]
                if all(v * s <= 1e-12 for v in vals):
                    count += 1
            return count

        return sorted(crossed, key=lambda k: -beyond(k))

    def stratum_map(self, x):
        """A(F) for the stratum containing x (boundary float or complex point)."""
        vec = self._vector(x)
        m = np.eye(2)
        for k in self._crossed(vec):
            m = m @ self._moves[k].matrix
        return MobiusReal(m)

    def boundary(self, x):
        """Boundary map on extended reals (scalar or array).

        At a leaf endpoint the two one-sided limits agree for finite
        laminations; the common value is returned.
        """
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty_like(xs)
        for i, v in enumerate(xs):
            g = self.post @ self.stratum_map(float(v))
            out[i] = g(float(v))
        return float(out[0]) if np.ndim(x) == 0 else out

    def boundary_limits(self, x, eps=1e-9):
        """One-sided limits at x; raises LeafEndpoint-aware data for endpoints."""
        t = float(to_angle(x))
        lo = self.boundary(float(np.tan((t - eps) / 2.0)))
        hi = self.boundary(float(np.tan((t + eps) / 2.0)))
        return lo, hi

    def eval_point(self, z):
        """Image of an interior point of the upper half-plane."""
        z = complex(z)
        vec = h2.from_upper(z)
        for lf in self.lamination.leaves:
            if abs(float(h2.minner(vec, lf.normal))) < 1e-12:
                raise OnWeightedLeaf("point lies on a weighted leaf")
        g = (self.post @ self.stratum_map(z)).matrix
        return (g[0, 0] * z + g[0, 1]) / (g[1, 0] * z + g[1, 1])

    def post_compose(self, g):
        return Earthquake(self.lamination, self.side, self.base, g @ self.post)

    def image_lamination(self):
        leaves = [GeodesicH2(self.boundary(lf.p), self.boundary(lf.q)) for lf in self.lamination.leaves]
        return FiniteLamination(leaves, self.lamination.weights, check=False)

    def inverse(self):
        """The inverse: opposite handedness along the image lamination."""
        other = RIGHT if self.side == LEFT else LEFT
        if isinstance(self.base, complex):
            g = self.post.matrix
            z = self.base
            base = (g[0, 0] * z + g[0, 1]) / (g[1, 0] * z + g[1, 1])
        else:
            base = self.post(float(self.base))
        return Earthquake(self.image_lamination(), other, base, self.post.inverse())

    def circle_map(self, xs):
        """Exactly tagged CircleMap sampled at xs."""
        xs = np.asarray(xs, dtype=float)
        return CircleMap(xs, self.boundary(xs), interp="pw-moebius", exact=self.to_json())

    def to_json(self):
        doc = {"kind": "earthquake", "side": self.side}
        doc.update(self.lamination.to_json())
        if not isinstance(self.base, complex):
            doc["base"] = format_value(float(self.base))
        return doc


def earthquake_from_json(doc):
    if doc.get("kind") != "earthquake":
        raise SchemaError("exact form must have kind 'earthquake'")
    lam = FiniteLamination.from_json(doc)
    base = doc.get("base")
    return Earthquake(lam, doc.get("side", LEFT), None if base is None else parse_value(base))


def earthquake_eval(quake, x):
    """Evaluate an earthquake at a boundary value (float) or interior point (complex).

    Boundary evaluation exactly at a leaf endpoint raises LeafEndpoint with
    both one-sided limits attached when they differ.
    """
    if isinstance(x, complex):
        return quake.eval_point(x)
    x = float(x)
    for lf in quake.lamination.leaves:
        if min(angular_distance(to_angle(x), a) for a in lf.angles()) < 1e-14:
            lo, hi = quake.boundary_limits(x)
            if angular_distance(to_angle(lo), to_angle(hi)) > 1e-9:
                raise LeafEndpoint("evaluation at a leaf endpoint", limits=(lo, hi))
    return quake.boundary(x)


# ---------------------------------------------------------------------------
# Thurston norm


def _unit_segment(mid, toward):
    t = toward + h2.minner(toward, mid) * mid
    t = h2.normalize_space(t)
    c, s = math.cosh(0.5), math.sinh(0.5)
    return c * mid - s * t, c * mid + s * t


def _crossed_weight(lam, a, b, tol=1e-12):
    total = 0.0
    for lf, w in lam:
        sa, sb = float(h2.minner(a, lf.normal)), float(h2.minner(b, lf.normal))
        if sa * sb <= tol:
            total += w
    return total


def _max_weight_clique(adj, weights):
    n = len(weights)
    best = [0.0]

    def expand(clique_w, cand):
        if not cand:
            best[0] = max(best[0], clique_w)
            return
        if clique_w + sum(weights[v] for v in cand) <= best[0]:
            return
        for v in sorted(cand, key=lambda v: -weights[v]):
            if clique_w + sum(weights[u] for u in cand) <= best[0]:
                return
            expand(clique_w + weights[v], cand & adj[v])
            cand = cand - {v}

    expand(0.0, set(range(n)))
    return best[0]


def thurston_norm_estimate(lam):
    """Interval ``(lower, upper)`` for the Thurston norm of a finite lamination.

    Any two leaves met by a unit segment are at distance at most 1, so the
    heaviest clique of the "distance <= 1" graph bounds the norm above.  The
    lower bound evaluates explicit unit segments: one per leaf, and one
    along the common perpendicular (or a short transversal, for asymptotic
    pairs) of every close pair.
    """
    n = len(lam)
    if n == 0:
        return 0.0, 0.0
    w = lam.weights
    d = lam.pairwise_distances()
    close = d <= 1.0 + 1e-12
    adj = [set(np.flatnonzero(close[i]).tolist()) - {i} for i in range(n)]
    upper = _max_weight_clique(adj, w)
    lower = max(w)
    for i, j in itertools.combinations(range(n), 2):
        if not close[i, j]:
            continue
        li, lj = lam.leaves[i], lam.leaves[j]
        if li.relation(lj) == "ultraparallel":
            _, fi, fj = h2.common_perpendicular(li.normal, lj.normal)
            mid = h2.normalize_point(fi + fj)
            a, b = _unit_segment(mid, fj)
        else:
            a, b = _asymptotic_transversal(li, lj)
        lower = max(lower, _crossed_weight(lam, a, b))
    return float(min(lower, upper)), float(upper)


def _asymptotic_transversal(li, lj):
    """Unit segment crossing two asymptotic leaves near their common endpoint."""
    ai, aj = li.angles(), lj.angles()
    shared = min(((s, t) for s in ai for t in aj), key=lambda st: angular_distance(*st))[0]
    other = ai[1] if angular_distance(ai[0], shared) < 1e-9 else ai[0]
    base = h2.project(np.array([0.0, 0.0, 1.0]), li.normal)
    toward = h2.light_vector(float(np.tan(shared / 2.0)) if abs(math.cos(shared / 2.0)) > 1e-15 else math.inf)
    t = toward + h2.minner(toward, base) * base
    t = h2.normalize_space(t)
    del other
    lo, hi = 0.0, 60.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        p = math.cosh(mid) * base + math.sinh(mid) * t
        if h2.point_line_distance(p, lj.normal) > 0.25:
            lo = mid
        else:
            hi = mid
    p = math.cosh(hi) * base + math.sinh(hi) * t
    f = h2.project(p, lj.normal)
    m = h2.normalize_point(p + f)
    return _unit_segment(m, f)


# ---------------------------------------------------------------------------
# ultraparallel perturbation


def _axis_boost(foot, direction, length):
    """Translation by `length` along the geodesic through `foot` with unit tangent `direction`."""
    t = h2.normalize_space(h2.lcross(foot, direction))
    basis = np.column_stack([foot, direction, t])
    c, s = math.cosh(length), math.sinh(length)
    local = np.array([[c, s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    return basis @ local @ np.linalg.inv(basis)


def _push(leaf, toward_sign, length, ref):
    """Translate a leaf orthogonally to itself toward the side with the given sign."""
    foot = h2.project(ref, leaf.normal)
    boost = _axis_boost(foot, toward_sign * leaf.normal, length)
    return GeodesicH2.from_normal(boost @ leaf.normal), boost


def _side_of(leaf, other):
    """+1/-1 if `other` lies (weakly) on that side of `leaf`, 0 if it straddles."""
    vals = [float(h2.minner(h2.light_vector(e), leaf.normal)) for e in (other.p, other.q)]
    pos = any(v > 1e-12 for v in vals)
    neg = any(v < -1e-12 for v in vals)
    if pos and not neg:
        return 1
    if neg and not pos:
        return -1
    return 0


def _strictly_inside(leaf, sign, others):
    for m in others:
        for e in (m.p, m.q):
            if sign * float(h2.minner(h2.light_vector(e), leaf.normal)) <= 1e-10:
                return False
    return True


def _push_displacement(leaf, sign, length, ref):
    try:
        return leaf_displacement(leaf, _push(leaf, sign, length, ref)[0])
    except ValueError:  # the pushed leaf collapsed to a point
        return math.inf


def _max_push(leaf, sign, ref, budget, cap=16.0):
    """Largest push (at most ``cap``) keeping the endpoint displacement below budget.

    Pushing into a small arc saturates the displacement below the budget,
    hence the cap: beyond it the endpoints merge in floating point.
    """
    lo, hi = 0.0, 1.0
    while _push_displacement(leaf, sign, hi, ref) < budget and hi < cap:
        hi *= 2.0
    if _push_displacement(leaf, sign, hi, ref) < budget:
        return hi
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if _push_displacement(leaf, sign, mid, ref) < budget:
            lo = mid
        else:
            hi = mid
    return lo


def _perturb(leaves, budget, ref):
    if len(leaves) <= 1:
        if len(leaves) == 1:
            return [_push(leaves[0], 1.0, _max_push(leaves[0], 1.0, ref, budget / 2) / 2, ref)[0]]
        return []
    pick, sign = None, 0
    for i, lf in enumerate(leaves):
        sides = {_side_of(lf, m) for j, m in enumerate(leaves) if j != i}
        if sides in ({1}, {-1}):
            pick, sign = i, sides.pop()
            break
    if pick is None:
        raise CrossingInput("no outermost leaf; input leaves cross")
    outer = leaves[pick]
    rest = [m for j, m in enumerate(leaves) if j != pick]
    sub_budget = budget / 4.0
    for _attempt in range(12):
        moved = _perturb(rest, sub_budget, ref)
        # move the perturbed family strictly into the half-plane of the others
        shift = 0.0
        if not _strictly_inside(outer, sign, moved):
            shift = 1e-12
            while shift < 10:
                foot = h2.project(ref, outer.normal)
                boost = _axis_boost(foot, sign * outer.normal, shift)
                cand = [GeodesicH2.from_normal(boost @ m.normal) for m in moved]
                if _strictly_inside(outer, sign, cand):
                    moved = cand
                    break
                shift *= 2.0
        disp_ok = all(leaf_displacement(a, b) < budget / 2 for a, b in zip(rest, moved))
        loss = max(a.distance(outer) - b.distance(outer) for a, b in zip(rest, moved))
        room = _max_push(outer, -sign, ref, budget / 2)
        if disp_ok and _strictly_inside(outer, sign, moved) and max(loss, 0.0) < room / 2:
            push = max(loss, 0.0) + room / 2
            new_outer = _push(outer, -sign, push, ref)[0]
            out = list(moved)
            out.insert(pick, new_outer)
            return out
        sub_budget /= 10.0
    raise ConstructionFailure("perturbation did not converge", claim="displacement")


def perturb_ultraparallel(leaves, n, strict=True, ref=None):
    """Move non-crossing leaves to pairwise ultraparallel position.

    Each leaf moves by less than ``1/n`` in the endpoint-angle max metric and
    every pairwise distance strictly increases.  With ``strict=False`` an
    input that is already pairwise ultraparallel is returned unchanged.
    """
    leaves = [lf if isinstance(lf, GeodesicH2) else GeodesicH2(*lf) for lf in leaves]
    for i, j in itertools.combinations(range(len(leaves)), 2):
        if leaves[i].relation(leaves[j]) in ("crossing", "equal"):
            raise CrossingInput(f"leaves {i} and {j} cross")
    if not strict and all(
        leaves[i].relation(leaves[j]) == "ultraparallel" for i, j in itertools.combinations(range(len(leaves)), 2)
    ):
        return list(leaves)
    ref = np.array([0.0, 0.0, 1.0]) if ref is None else h2.from_upper(complex(ref))
    return _perturb(leaves, 1.0 / n, ref)


# ---------------------------------------------------------------------------
# right-angled polygon


class RightAngledPolygon:
    """Convex polygon in H^2 with all interior angles pi/2.

    Edge i lies on the geodesic whose ideal endpoints have angle
    coordinates ``lines[i]``; vertex i is where edges i-1 and i meet, so
    edge i runs from vertex i to vertex i+1.  ``normals`` are the inward
    unit normals (hyperboloid model) and ``kinds`` tags each edge as a
    cutting line ('e'), a spanning line ('g') or a connector ('a').
    """

    def __init__(self, lines, kinds, center):
        self.center = np.asarray(center, dtype=float)
        self.lines = np.asarray(lines, dtype=float)
        self.kinds = list(kinds)
        normals = [h2.normal_from_angles(a, b) for a, b in self.lines]
        self.normals = np.array([_inward(nv, self.center) for nv in normals])
        k = len(self.normals)
        self.vertices = np.array([h2.intersect(self.normals[i - 1], self.normals[i]) for i in range(k)])

    def __len__(self):
        return len(self.vertices)

    def edges(self):
        k = len(self.vertices)
        return [(self.vertices[i], self.vertices[(i + 1) % k]) for i in range(k)]

    def vertex_cosines(self):
        """|cos| of the interior angle at every vertex (0 for a right angle)."""
        k = len(self.lines)
        return [h2.crossing_cosine(*self.lines[i - 1], *self.lines[i]) for i in range(k)]

    def contains(self, p, tol=1e-9):
        scale = np.abs(self.normals).sum(axis=1) * np.abs(p).sum()
        return bool(np.all(self.normals @ h2.FORM @ p >= -tol * scale))

    def reflections(self):
        return [h2.reflection(nv) for nv in self.normals]

    def to_json(self):
        verts = [h2.to_upper(v) for v in self.vertices]
        return {
            "vertices": [[z.real, z.imag] for z in verts],
            "edges": [
                {
                    "from": i,
                    "to": (i + 1) % len(verts),
                    "kind": kd,
                    "line": [format_value(float(from_angle(t))) for t in self.lines[i]],
                }
                for i, kd in enumerate(self.kinds)
            ],
        }


def _inward(n, center):
    return n if h2.minner(center, n) > 0 else -n


def _frame_angle(frame, t):
    return float(to_angle(h2.boundary_value(frame @ h2.light_vector(float(from_angle(t))))))


def _short_arc(a, b):
    """Orient an endpoint pair so that the positive arc a -> b is the shorter one."""
    return (a, b) if (b - a) % TWO_PI <= math.pi else (b, a)


def _cutting_lines(leaf_normals, s):
    """Two geodesics orthogonal to each leaf at distance s from the leaf's foot.

    Works in a frame where the polygon center is the origin.  Returns
    (a, b, leaf_index) with a -> b the arc cut off by the line.
    """
    origin = np.array([0.0, 0.0, 1.0])
    out = []
    for idx, nrm in enumerate(leaf_normals):
        foot = h2.project(origin, nrm)
        tangent = h2.normalize_space(h2.lcross(nrm, foot))
        for sgn in (1.0, -1.0):
            line = math.sinh(sgn * s) * foot + math.cosh(sgn * s) * tangent
            out.append((*_short_arc(*h2.endpoint_angles(line)), idx))
    return out


def _auxiliary_lines(s, count=3):
    half = math.atan(1.0 / math.sinh(s))
    return [(TWO_PI * j / count - half, TWO_PI * j / count + half, None) for j in range(count)]


def _arc_inside(t, a, b):
    return 0.0 < (t - a) % TWO_PI < (b - a) % TWO_PI


def _cutting_lines_ok(lines, leaf_normals, radius):
    for (a1, b1, _), (a2, b2, _) in itertools.combinations(lines, 2):
        if _arc_inside(a2, a1, b1) or _arc_inside(b2, a1, b1) or _arc_inside(a1, a2, b2):
            return False
        if abs(float(h2.minner(h2.normal_from_angles(a1, b1), h2.normal_from_angles(a2, b2)))) <= 1.0 + 1e-9:
            return False
    for a, b, own in lines:
        if math.asinh(1.0 / math.tan((b - a) % TWO_PI / 2.0)) <= radius:
            return False
        nrm = h2.normal_from_angles(a, b)
        for j, leaf in enumerate(leaf_normals):
            if j != own and h2.geodesic_distance(nrm, leaf) <= 1.0:
                return False
    return True


def _gap_lines(start, end, m):
    """Lines of the right-angled path across the gap arc start -> end.

    Spanning lines sit over the nodes i/(1+2m) of the gap (measured in
    visual angle from the center); connectors are common perpendiculars.
    Returns [(a, b, kind)] excluding the two cutting lines at the ends.
    """
    span = (end - start) % TWO_PI
    nodes = start + span * np.arange(0, 2 * m + 2) / (1.0 + 2 * m)
    return [(nodes[2 * j - 1], nodes[2 * j]) for j in range(1, m + 1)]


def _assemble(cut, m):
    lines, kinds = [], []
    count = len(cut)
    for i in range(count):
        a0, b0, _ = cut[i]
        a1, b1, _ = cut[(i + 1) % count]
        share = max(1, math.ceil(m * ((a1 - b0) % TWO_PI) / TWO_PI))
        chain = [(a0, b0)] + _gap_lines(b0, a1, share) + [(a1, b1)]
        for j in range(len(chain) - 1):
            u, v = h2.perpendicular_angles(*chain[j], *chain[j + 1])
            lines.append(_short_arc(u, v))
            kinds.append("a")
            if j + 1 < len(chain) - 1:
                lines.append(chain[j + 1])
                kinds.append("g")
        lines.append((a1, b1))
        kinds.append("e")
    return lines, kinds


def check_polygon_claims(poly, lam, center, radius):
    """The four construction claims as booleans.

    ``contains_ball``: the edge lines bound a convex polygon (cut-off arcs
    cyclically ordered, consecutive ones overlapping, others disjoint)
    and every edge line is at distance >= radius from the center.
    ``right_angles``: every vertex angle is pi/2 to 1e-9.
    ``orthogonal_crossings``: each leaf meets the boundary in exactly two
    edges, orthogonally.  ``vertices_far_from_crossings``: those crossing
    points are more than 1 away from every vertex.
    """
    center = h2.from_upper(complex(center)) if np.ndim(center) == 0 else np.asarray(center, dtype=float)
    frame = h2.boost_to_origin(center)
    arcs = [_short_arc(_frame_angle(frame, a), _frame_angle(frame, b)) for a, b in poly.lines]
    k = len(arcs)
    report = {}
    far = all(math.asinh(1.0 / math.tan((b - a) % TWO_PI / 2.0)) >= radius for a, b in arcs)
    winding = sum((arcs[(i + 1) % k][0] - arcs[i][0]) % TWO_PI for i in range(k))
    convex = abs(winding - TWO_PI) < 1e-9
    for i in range(k):
        a0, b0 = arcs[i]
        a1, b1 = arcs[(i + 1) % k]
        a2, _ = arcs[(i + 2) % k]
        if not (_arc_inside(a1, a0, b0) and _arc_inside(b0, a1, b1)):
            convex = False
        if k > 3 and (a2 - a0) % TWO_PI < (b0 - a0) % TWO_PI:
            convex = False
    report["contains_ball"] = bool(far and convex)
    report["right_angles"] = bool(convex and max(poly.vertex_cosines()) <= 1e-9)
    hits_ok, far_ok = True, True
    for lf in lam.leaves:
        lt = lf.angles()
        hits = [i for i, (a, b) in enumerate(poly.edges()) if h2.segment_crosses(a, b, lf.normal, tol=0.0)]
        if len(hits) != 2 or any(h2.crossing_cosine(*lt, *poly.lines[i]) > 1e-9 for i in hits):
            hits_ok = False
            continue
        for i in hits:
            x = h2.intersect(poly.normals[i], lf.normal)
            if min(h2.point_distance(x, v) for v in poly.vertices) <= 1.0:
                far_ok = False
    report["orthogonal_crossings"] = hits_ok
    report["vertices_far_from_crossings"] = far_ok and hits_ok
    return report


def build_right_angled_polygon(lam, x0=1j, k=1, n=1, max_nodes=4096):
    """Right-angled polygon containing B(x0, k+n) met orthogonally by each leaf.

    The lamination must be pairwise ultraparallel with every leaf meeting
    B(x0, k).  Each leaf gets two orthogonal cutting lines far out on both
    sides; consecutive cutting lines are joined by right-angled paths whose
    spanning geodesics sit over the nodes i/(1+2m) of the gap arc.  A node
    budget m is shared between gaps in proportion to their angular size and
    doubled until every claim holds.  With no leaves, three auxiliary
    cutting lines play the same role.
    """
    center = h2.from_upper(complex(x0))
    radius = float(k + n)
    if not lam.is_ultraparallel():
        raise ConstructionFailure("lamination is not pairwise ultraparallel", claim="precondition")
    for lf in lam.leaves:
        if h2.point_line_distance(center, lf.normal) > k:
            raise ConstructionFailure("a leaf misses B(x0, k)", claim="precondition")
    frame = h2.boost_to_origin(center)
    back = np.linalg.inv(frame)
    leaf_normals = [frame @ lf.normal for lf in lam.leaves]
    s = radius + 1.0
    while True:
        cut = _cutting_lines(leaf_normals, s) if leaf_normals else _auxiliary_lines(s)
        if _cutting_lines_ok(cut, leaf_normals, radius):
            break
        s += 1.0
        if s > 40:
            raise ConstructionFailure("could not place the cutting lines", claim="orthogonal_crossings")
    cut.sort(key=lambda item: item[0] % TWO_PI)
    # smallest m for which every connector stays outside the ball
    m = 1
    while m <= max_nodes:
        lines, kinds = _assemble(cut, m)
        if all(math.asinh(1.0 / math.tan((b - a) % TWO_PI / 2.0)) >= radius for a, b in lines):
            break
        m *= 2
    failed = "contains_ball"
    while m <= max_nodes:
        lines, kinds = _assemble(cut, m)
        orig = [(_frame_angle(back, a), _frame_angle(back, b)) for a, b in lines]
        poly = RightAngledPolygon(orig, kinds, center)
        claims = check_polygon_claims(poly, lam, center, radius)
        if all(claims.values()):
            return poly
        failed = next(c for c, ok in claims.items() if not ok)
        m *= 2
    raise ConstructionFailure(f"polygon claim failed: {failed}", claim=failed)


# ---------------------------------------------------------------------------
# reflection orbit


def _point_polygon_distance(poly, p):
    vals = poly.normals @ h2.FORM @ p
    if np.all(vals >= -1e-12):
        return 0.0
    # for a convex right-angled polygon the nearest boundary point lies on
    # an edge whose half-plane excludes p
    lower = float(np.arcsinh(-vals.min()))
    best = math.inf
    k = len(poly.vertices)
    for i in np.flatnonzero(vals < 0):
        best = min(best, h2.segment_point_distance(poly.vertices[i], poly.vertices[(i + 1) % k], p))
    return max(best, lower)


def reflection_orbit_lamination(lam, poly, radius, budget=20000):
    """Orbit of a lamination under the reflection group of a right-angled polygon.

    Returns ``(lamination, generators, elements)``: the orbit leaves meeting
    B(center, radius), the edge reflections, and the enumerated group
    elements (3x3 Lorentz matrices) whose tiles meet that ball.
    """
    center = poly.center
    gens = poly.reflections()
    elements = [np.eye(3)]
    centers = [center.copy()]
    queue = [np.eye(3)]
    while queue:
        g = queue.pop(0)
        # edges of g(P) whose far side can reach the ball
        lines = (g @ poly.normals.T).T
        vals = lines @ h2.FORM @ center
        for e in np.flatnonzero(np.arcsinh(np.abs(vals)) <= radius + 1e-12):
            cand = g @ gens[e]
            c = cand @ center
            if min(-float(h2.minner(c, o)) for o in centers) < 2.0:
                continue
            if _point_polygon_distance(poly, np.linalg.inv(cand) @ center) > radius:
                continue
            elements.append(cand)
            centers.append(c)
            queue.append(cand)
            if len(elements) > budget:
                raise OrbitBudgetExceeded(f"more than {budget} tiles meet the ball")
    leaves, weights = [], []
    for g in elements:
        for lf, w in lam:
            nrm = g @ lf.normal
            if h2.point_line_distance(center, nrm) > radius:
                continue
            geo = GeodesicH2.from_normal(nrm)
            if any(geo.same_as(o) for o in leaves):
                continue
            leaves.append(geo)
            weights.append(w)
    return FiniteLamination(leaves, weights, check=False), gens, elements


def restrict_to_ball(lam, center, radius):
    """Leaves meeting the closed ball B(center, radius)."""
    c = h2.from_upper(complex(center)) if np.ndim(center) == 0 else np.asarray(center)
    keep = [(lf, w) for lf, w in lam if h2.point_line_distance(c, lf.normal) <= radius]
    return FiniteLamination([a for a, _ in keep], [b for _, b in keep], check=False)


def approximate_lamination(lam, n=1, k=1, x0=1j, radius=None):
    """Whole pipeline: perturb, build the polygon, take the reflection orbit.

    Leaves that are already pairwise ultraparallel are kept in place, since
    a strict push can move a leaf out of B(x0, k).
    """
    moved = perturb_ultraparallel(lam.leaves, n, strict=False, ref=x0) if len(lam) else []
    mu = FiniteLamination(moved, lam.weights)
    poly = build_right_angled_polygon(mu, x0, k, n)
    if radius is None:
        radius = k + n + 1.0
    orbit, gens, elements = reflection_orbit_lamination(mu, poly, radius)
    return mu, poly, orbit, gens, elements
