"""Projective-line algebra on RP^1.

Points of RP^1 are handled in two interchangeable forms: extended reals
(``float`` with ``math.inf`` for the point at infinity) and homogeneous
pairs ``(a, b)`` standing for ``a/b``.  The angle coordinate
``theta = 2*arctan(x)`` identifies RP^1 with the circle ``R / 2piZ``
(infinity sits at ``theta = pi``) and is what all cyclic-order and
interpolation logic uses.
"""

import math

import numpy as np

from .errors import DegenerateQuadruple, DegenerateTriple, NonMonotone, SchemaError

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# coordinates


def to_angle(x):
    """Angle coordinate in (-pi, pi]; infinity maps to pi."""
    x = np.asarray(x, dtype=float)
    out = 2.0 * np.arctan(x)
    return np.where(np.isinf(x), math.pi, out)


def from_angle(theta):
    """Inverse of :func:`to_angle`; angles are taken mod 2pi."""
    t = np.mod(np.asarray(theta, dtype=float) + math.pi, TWO_PI) - math.pi
    near_pi = np.abs(np.abs(t) - math.pi) < 1e-15
    with np.errstate(over="ignore"):
        val = np.tan(t / 2.0)
    return np.where(near_pi, math.inf, val)


def angular_distance(s, t):
    """Distance on the circle between angle coordinates."""
    d = np.mod(np.asarray(s, dtype=float) - np.asarray(t, dtype=float), TWO_PI)
    return np.minimum(d, TWO_PI - d)


def homogeneous(x):
    """Homogeneous pair(s) for extended reals; shape (..., 2)."""
    x = np.asarray(x, dtype=float)
    inf = np.isinf(x)
    a = np.where(inf, 1.0, x)
    b = np.where(inf, 0.0, 1.0)
    return np.stack([a, b], axis=-1)


def dehomogenize(v):
    """Extended real(s) from homogeneous pair(s)."""
    v = np.asarray(v, dtype=float)
    a, b = v[..., 0], v[..., 1]
    small = np.abs(b) <= 1e-300 + 1e-15 * np.abs(a)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = a / b
    return np.where(small, math.inf, val)


def parse_value(x):
    """JSON scalar ("inf" or number) to extended real."""
    if isinstance(x, str):
        if x.strip().lower() in ("inf", "infinity", "+inf", "-inf"):
            return math.inf
        raise SchemaError(f"not a point of RP^1: {x!r}")
    return float(x)


def format_value(x):
    """Extended real to a JSON scalar."""
    return "inf" if math.isinf(x) else float(x)


class CirclePoint:
    """A point ``a/b`` of RP^1 stored as a canonical unit vector.

    The representative has unit norm and its first nonzero coordinate
    positive, so equal points have identical coordinates.
    """

    __slots__ = ("a", "b")

    def __init__(self, a, b=1.0):
        a, b = float(a), float(b)
        r = math.hypot(a, b)
        if r == 0.0:
            raise ValueError("homogeneous pair (0, 0) is not a point")
        a, b = a / r, b / r
        if a < 0 or (a == 0 and b < 0):
            a, b = -a, -b
        self.a, self.b = a, b

    @classmethod
    def from_value(cls, x):
        x = parse_value(x)
        return cls(1.0, 0.0) if math.isinf(x) else cls(x, 1.0)

    @classmethod
    def from_angle(cls, theta):
        return cls(math.sin(theta / 2.0), math.cos(theta / 2.0))

    @property
    def value(self):
        return math.inf if abs(self.b) < 1e-300 else self.a / self.b

    @property
    def angle(self):
        return float(to_angle(self.value))

    def pair(self):
        return np.array([self.a, self.b])

    def isclose(self, other, tol=1e-12):
        return abs(self.a * other.b - self.b * other.a) <= tol

    def __eq__(self, other):
        return isinstance(other, CirclePoint) and self.isclose(other)

    def __hash__(self):
        return hash((round(self.a, 9), round(self.b, 9)))

    def __repr__(self):
        return f"CirclePoint({self.value!r})"


def _as_pairs(points):
    out = []
    for p in points:
        if isinstance(p, CirclePoint):
            out.append(p.pair())
        else:
            out.append(homogeneous(parse_value(p) if isinstance(p, str) else p))
    return out


# ---------------------------------------------------------------------------
# Möbius maps


def _canonical_sign(m):
    flat = m.ravel()
    k = np.flatnonzero(np.abs(flat) > 1e-300)[0]
    return -m if np.real(flat[k]) < 0 else m


class MobiusReal:
    """Element of PSL(2,R), stored with determinant 1 and a fixed sign."""

    __slots__ = ("matrix",)

    def __init__(self, matrix):
        m = np.array(matrix, dtype=float).reshape(2, 2)
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        if not det > 0:
            raise ValueError("a real Möbius map needs a positive determinant")
        self.matrix = _canonical_sign(m / math.sqrt(det))

    @classmethod
    def identity(cls):
        return cls(np.eye(2))

    def __call__(self, x):
        """Apply to extended reals, angle-free; accepts scalars, arrays or CirclePoints."""
        if isinstance(x, CirclePoint):
            v = self.matrix @ x.pair()
            return CirclePoint(v[0], v[1])
        h = homogeneous(x)
        v = h @ self.matrix.T
        out = dehomogenize(v)
        return float(out) if np.ndim(out) == 0 else out

    def __matmul__(self, other):
        return MobiusReal(self.matrix @ other.matrix)

    def inverse(self):
        a, b, c, d = self.matrix.ravel()
        return MobiusReal([[d, -b], [-c, a]])

    def trace(self):
        return float(self.matrix[0, 0] + self.matrix[1, 1])

    def isclose(self, other, tol=1e-10):
        return np.allclose(self.matrix, other.matrix, atol=tol) or np.allclose(
            self.matrix, -other.matrix, atol=tol
        )

    def __repr__(self):
        return f"MobiusReal({self.matrix.tolist()})"


class MobiusComplex:
    """Element of PSL(2,C) acting on CP^1 = C ∪ {inf}."""

    __slots__ = ("matrix",)

    def __init__(self, matrix):
        m = np.array(matrix, dtype=complex).reshape(2, 2)
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        if abs(det) == 0:
            raise ValueError("singular matrix")
        self.matrix = _canonical_sign(m / np.sqrt(det))

    @classmethod
    def from_real(cls, g):
        return cls(g.matrix.astype(complex))

    def apply_pair(self, v):
        return self.matrix @ np.asarray(v, dtype=complex)

    def __call__(self, z):
        if isinstance(z, (float, int)) and math.isinf(z):
            v = np.array([1.0, 0.0], dtype=complex)
        else:
            v = np.array([complex(z), 1.0])
        w = self.matrix @ v
        if abs(w[1]) <= 1e-15 * abs(w[0]):
            return math.inf
        return w[0] / w[1]

    def __matmul__(self, other):
        return MobiusComplex(self.matrix @ other.matrix)

    def inverse(self):
        a, b, c, d = self.matrix.ravel()
        return MobiusComplex([[d, -b], [-c, a]])

    def is_real(self, tol=1e-12):
        m = self.matrix
        phase = m.ravel()[np.argmax(np.abs(m.ravel()))]
        phase = phase / abs(phase)
        return np.allclose((m / phase).imag, 0.0, atol=tol)


def _det2(p, q):
    return p[0] * q[1] - p[1] * q[0]


def cross_ratio(a, b, c, d):
    """Cross-ratio ``(c-a)(d-b) / ((b-a)(d-c))`` evaluated projectively.

    Inputs may be CirclePoints, extended reals or homogeneous pairs.
    """
    pa, pb, pc, pd = _as_pairs((a, b, c, d))
    num = _det2(pc, pa) * _det2(pd, pb)
    den = _det2(pb, pa) * _det2(pd, pc)
    scale = max(np.linalg.norm(p) for p in (pa, pb, pc, pd)) ** 4
    if abs(den) <= 1e-14 * scale or abs(_det2(pc, pa)) <= 1e-14 * scale or abs(_det2(pd, pb)) <= 1e-14 * scale:
        raise DegenerateQuadruple("cross-ratio needs four distinct points")
    return float(num / den)


def cross_ratio_values(a, b, c, d):
    """Vectorised cross-ratio on arrays of extended reals (no degeneracy check)."""
    pa, pb, pc, pd = (homogeneous(v) for v in (a, b, c, d))

    def det(p, q):
        return p[..., 0] * q[..., 1] - p[..., 1] * q[..., 0]

    with np.errstate(divide="ignore", invalid="ignore"):
        return det(pc, pa) * det(pd, pb) / (det(pb, pa) * det(pd, pc))


def _to_zero_one_inf(triple):
    """Real matrix sending the triple to (0, 1, inf); may have negative determinant."""
    a, b, c = triple
    return np.array(
        [[a[1] * _det2(b, c), -a[0] * _det2(b, c)], [c[1] * _det2(b, a), -c[0] * _det2(b, a)]]
    )


def mobius_from_triples(src, dst):
    """The unique real Möbius map sending ``src[i]`` to ``dst[i]``.

    Both triples must consist of distinct points in the same cyclic order
    (otherwise no orientation-preserving map exists).
    """
    s = _as_pairs(src)
    d = _as_pairs(dst)
    for tri in (s, d):
        for i in range(3):
            p, q = tri[i], tri[(i + 1) % 3]
            if abs(_det2(p, q)) <= 1e-14 * np.linalg.norm(p) * np.linalg.norm(q):
                raise DegenerateTriple("triple has coincident points")
    ms = _to_zero_one_inf(s)
    md = _to_zero_one_inf(d)
    a, b, c, e = md.ravel()
    m = np.array([[e, -b], [-c, a]]) @ ms
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if not det > 0:
        raise DegenerateTriple("triples have opposite cyclic orientation")
    return MobiusReal(m)


def complex_mobius_from_triples(src, dst):
    """Complex Möbius map with ``src[i] -> dst[i]``; points are complex or inf."""

    def pair(z):
        if isinstance(z, (float, int)) and math.isinf(z):
            return np.array([1.0, 0.0], dtype=complex)
        return np.array([complex(z), 1.0])

    def to_std(tri):
        a, b, c = (pair(z) for z in tri)
        return np.array(
            [[a[1] * _det2(b, c), -a[0] * _det2(b, c)], [c[1] * _det2(b, a), -c[0] * _det2(b, a)]]
        )

    ms, md = to_std(src), to_std(dst)
    a, b, c, e = md.ravel()
    return MobiusComplex(np.array([[e, -b], [-c, a]]) @ ms)


def random_mobius(rng, spread=4.0):
    """Random element of PSL(2,R) as rotation * dilation * translation.

    ``g = K(phi) A(s, m)`` with ``A(z) = e^s z + m``; ``phi ~ U[0, pi)``,
    ``s ~ U[-spread, spread]``, ``m ~ U[-3, 3]``.  Every element of PSL(2,R)
    has this form, so pushing one symmetric quadruple covers its orbit.
    """
    phi = rng.uniform(0.0, math.pi)
    s = rng.uniform(-spread, spread)
    m = rng.uniform(-3.0, 3.0)
    k = np.array([[math.cos(phi), -math.sin(phi)], [math.sin(phi), math.cos(phi)]])
    a = np.array([[math.exp(s / 2), m * math.exp(-s / 2)], [0.0, math.exp(-s / 2)]])
    return MobiusReal(k @ a)


# ---------------------------------------------------------------------------
# cyclic order


def cyclically_increasing(angles, strict=True):
    """True if the angle sequence winds once around the circle positively."""
    t = np.asarray(angles, dtype=float)
    if len(t) < 2:
        return True
    gaps = np.mod(np.diff(np.append(t, t[0])), TWO_PI)
    if strict:
        if np.any(gaps <= 1e-13):
            return False
    return abs(gaps.sum() - TWO_PI) < 1e-9


def unwrap_increasing(angles):
    """Lift a cyclically increasing angle sequence to an increasing real one."""
    t = np.asarray(angles, dtype=float)
    gaps = np.mod(np.diff(t), TWO_PI)
    return t[0] + np.concatenate([[0.0], np.cumsum(gaps)])


# ---------------------------------------------------------------------------
# circle maps

INTERP_PL = "pl-angle"
INTERP_PW = "pw-moebius"


class CircleMap:
    """Finite description of an orientation-preserving homeomorphism of RP^1.

    Samples are pairs ``(x_i, y_i)`` of extended reals.  Between samples the
    map is linear in the angle coordinate (``interp="pl-angle"``).  When the
    map carries an exact earthquake description (``exact`` dict with
    ``kind="earthquake"``) evaluation is exact piecewise-Möbius instead.
    """

    def __init__(self, xs, ys, interp=INTERP_PL, exact=None):
        xs = np.array([parse_value(v) if isinstance(v, str) else float(v) for v in xs])
        ys = np.array([parse_value(v) if isinstance(v, str) else float(v) for v in ys])
        if len(xs) != len(ys) or len(xs) < 3:
            raise NonMonotone("a circle map needs at least three sample pairs")
        if interp not in (INTERP_PL, INTERP_PW):
            raise SchemaError(f"unknown interpolation {interp!r}")
        if interp == INTERP_PW and exact is None:
            raise SchemaError("piecewise-Möbius interpolation needs an exact earthquake description")
        tx, ty = to_angle(xs), to_angle(ys)
        order = np.argsort(tx, kind="stable")
        tx, ty, xs, ys = tx[order], ty[order], xs[order], ys[order]
        if not (cyclically_increasing(tx) and cyclically_increasing(ty)):
            raise NonMonotone("samples are not an orientation-preserving correspondence")
        self.xs, self.ys = xs, ys
        self._tx = tx
        self._ty = unwrap_increasing(ty)
        self.interp = interp
        self.exact = exact
        self._exact_map = None

    # construction helpers -------------------------------------------------
    @classmethod
    def from_function(cls, func, xs, interp=INTERP_PL, exact=None):
        xs = np.asarray(xs, dtype=float)
        return cls(xs, [func(float(x)) for x in xs], interp=interp, exact=exact)

    @classmethod
    def identity(cls, xs=(0.0, 1.0, math.inf, -1.0)):
        return cls(xs, xs)

    @classmethod
    def from_mobius(cls, g, xs):
        return cls(xs, g(np.asarray(xs, dtype=float)))

    @classmethod
    def from_json(cls, doc):
        try:
            samples = doc["samples"]
            xs = [parse_value(s[0]) for s in samples]
            ys = [parse_value(s[1]) for s in samples]
        except (KeyError, TypeError, IndexError) as exc:
            raise SchemaError(f"malformed circle map: {exc}") from exc
        return cls(xs, ys, interp=doc.get("interp", INTERP_PL), exact=doc.get("exact"))

    def to_json(self):
        return {
            "samples": [[format_value(x), format_value(y)] for x, y in zip(self.xs, self.ys)],
            "interp": self.interp,
            "exact": self.exact,
        }

    # evaluation -----------------------------------------------------------
    def _exact(self):
        # the exact description fixes the map up to post-composition;
        # the samples pin that down
        if self._exact_map is None:
            from .earthquake import earthquake_from_json

            quake = earthquake_from_json(self.exact)
            raw = np.atleast_1d(quake.boundary(self.xs))
            g = mobius_from_triples(raw[:3], self.ys[:3])
            if np.max(angular_distance(to_angle(g(raw)), to_angle(self.ys))) > 1e-7:
                raise SchemaError("exact earthquake description disagrees with the samples")
            self._exact_map = quake.post_compose(g)
        return self._exact_map

    def eval_angle(self, theta):
        """Evaluate on angle coordinates; returns angles (not reduced mod 2pi)."""
        theta = np.asarray(theta, dtype=float)
        if self.exact is not None:
            return to_angle(self._exact().boundary(from_angle(theta)))
        tx, ty = self._tx, self._ty
        n = len(tx)
        t = tx[0] + np.mod(theta - tx[0], TWO_PI)
        ext_x = np.append(tx, tx[0] + TWO_PI)
        ext_y = np.append(ty, ty[0] + TWO_PI)
        i = np.clip(np.searchsorted(ext_x, t, side="right") - 1, 0, n - 1)
        w = (t - ext_x[i]) / (ext_x[i + 1] - ext_x[i])
        return ext_y[i] + w * (ext_y[i + 1] - ext_y[i])

    def __call__(self, x):
        if self.exact is not None:
            out = self._exact().boundary(np.asarray(x, dtype=float))
        else:
            out = from_angle(self.eval_angle(to_angle(x)))
        return float(out) if np.ndim(out) == 0 else out

    def inverse(self):
        """Inverse map (sample pairs swapped); exact forms fall back to sampling."""
        if self.exact is not None:
            return CircleMap(self.ys, self.xs)
        return CircleMap(self.ys, self.xs)

    def inverse_eval(self, y):
        """Evaluate the inverse map, exactly for exact forms (bisection on the lift)."""
        if self.exact is None:
            return self.inverse()(y)
        ty = to_angle(np.atleast_1d(np.asarray(y, dtype=float)))
        out = np.empty_like(ty)
        grid = np.linspace(-math.pi, math.pi, 257)
        lift = unwrap_increasing(self.eval_angle(grid))
        for k, s in enumerate(ty):
            s = lift[0] + np.mod(s - lift[0], TWO_PI)
            j = int(np.clip(np.searchsorted(lift, s) - 1, 0, len(grid) - 2))
            lo, hi = grid[j], grid[j + 1]
            flo = lift[j]
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                fm = flo + np.mod(float(self.eval_angle(mid)) - flo, TWO_PI)
                if fm < s:
                    lo = mid
                else:
                    hi = mid
            out[k] = 0.5 * (lo + hi)
        res = from_angle(out)
        return float(res[0]) if np.ndim(y) == 0 else res

    def samples(self):
        return list(zip(self.xs.tolist(), self.ys.tolist()))

    def __len__(self):
        return len(self.xs)

    def __repr__(self):
        return f"CircleMap(n={len(self)}, interp={self.interp!r}, exact={'yes' if self.exact else 'no'})"


def normalize(h):
    """Post-compose with the Möbius map that makes h fix 0, 1 and inf.

    Samples at 0, 1 and inf are added first if missing, so the result is
    defined by its samples alone (piecewise-linear in angle).
    """
    xs = list(h.xs)
    for p in (0.0, 1.0, math.inf):
        if not any(np.isclose(to_angle(p), to_angle(x), atol=1e-14) for x in xs):
            xs.append(p)
    xs = np.array(xs)
    ys = np.array([h(x) for x in xs])
    g = mobius_from_triples((h(0.0), h(1.0), h(math.inf)), (0.0, 1.0, math.inf))
    return CircleMap(xs, g(ys))


def comparison_compose(f1, f2):
    """``f1^{-1} o f2`` as a circle map.

    The result is sampled on f2's source grid together with the preimages
    under f2 of f1's breakpoints, so for piecewise-linear inputs it is exact.
    """
    grid = [float(x) for x in f2.xs]
    if f1.exact is None:
        pulled = f2.inverse_eval(f1.ys) if f2.exact is not None else f2.inverse()(f1.ys)
        grid.extend(np.atleast_1d(pulled).tolist())
    ang = np.unique(np.round(to_angle(grid), 15))
    keep = np.append(True, np.diff(ang) > 1e-12)
    ang = ang[keep]
    if len(ang) > 1 and abs(ang[-1] - ang[0] - TWO_PI) < 1e-12:
        ang = ang[:-1]
    xs = from_angle(ang)
    ys = f1.inverse_eval(f2(xs)) if f1.exact is not None else f1.inverse()(f2(xs))
    ys = np.atleast_1d(ys)
    if not cyclically_increasing(to_angle(ys)):
        raise NonMonotone("composition lost monotonicity")
    return CircleMap(xs, ys)


def symmetric_quadruples(count, seed=0):
    """Seeded symmetric quadruples: random Möbius pushes of (0, 1, -1, inf).

    The first quadruple is always (0, 1, -1, inf) itself.  Returns an array
    of shape (count, 4) of extended reals.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    rng = np.random.default_rng(seed)
    base = np.array([0.0, 1.0, -1.0, math.inf])
    out = [base]
    for _ in range(count - 1):
        out.append(random_mobius(rng)(base))
    return np.array(out)


def qs_norm_estimate(h, count=4096, seed=0, quadruples=None):
    """Lower estimate of the symmetric cross-ratio distortion constant M.

    Maximum over sampled symmetric quadruples Q of ``max(|cr h(Q)|, 1/|cr h(Q)|)``.
    For Möbius maps this is 1.
    """
    if quadruples is None:
        quadruples = symmetric_quadruples(count, seed)
    q = np.asarray(quadruples, dtype=float)
    if q.ndim != 2 or q.shape[0] < 1:
        raise ValueError("at least one quadruple is required")
    img = h(q.ravel())
    img = np.asarray(img).reshape(q.shape)
    cr = np.abs(cross_ratio_values(img[:, 0], img[:, 1], img[:, 2], img[:, 3]))
    cr = cr[np.isfinite(cr) & (cr > 0)]
    if cr.size == 0:
        return math.inf
    return float(np.max(np.maximum(cr, 1.0 / cr)))
