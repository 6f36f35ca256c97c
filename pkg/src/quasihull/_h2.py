"""Hyperboloid-model primitives for H^2 (form x^2 + y^2 - t^2).

Boundary points are extended reals of the upper half-plane model; the
Cayley map ``w = (z - i)/(z + i)`` links them to the disk, where the
boundary point with angle coordinate ``theta`` sits at ``w = -exp(i theta)``.
"""

import math

import numpy as np

from .mobius import from_angle, to_angle

FORM = np.diag([1.0, 1.0, -1.0])


def minner(u, v):
    u, v = np.asarray(u, dtype=float), np.asarray(v, dtype=float)
    return u[..., 0] * v[..., 0] + u[..., 1] * v[..., 1] - u[..., 2] * v[..., 2]


def lcross(u, v):
    """Vector orthogonal (for the Lorentz form) to u and v."""
    return FORM @ np.cross(u, v)


def light_vector(x):
    """Light-cone vector of a boundary point (extended real)."""
    t = float(to_angle(x))
    return np.array([-math.cos(t), -math.sin(t), 1.0])


def boundary_value(light):
    """Extended real of a light-cone vector (either nappe)."""
    v = np.asarray(light, dtype=float)
    if v[2] < 0:
        v = -v
    theta = math.atan2(-v[1], -v[0])
    return float(from_angle(theta))


def from_upper(z):
    w = (z - 1j) / (z + 1j)
    r2 = abs(w) ** 2
    return np.array([2 * w.real, 2 * w.imag, 1 + r2]) / (1 - r2)


def to_upper(p):
    w = complex(p[0], p[1]) / (1.0 + p[2])
    return 1j * (1 + w) / (1 - w)


def normalize_point(p):
    p = np.asarray(p, dtype=float)
    q = -minner(p, p)
    if q <= 0:
        raise ValueError("not a timelike vector")
    p = p / math.sqrt(q)
    return p if p[2] > 0 else -p


def normalize_space(n):
    n = np.asarray(n, dtype=float)
    q = minner(n, n)
    if q <= 0:
        raise ValueError("not a spacelike vector")
    return n / math.sqrt(q)


def _half_sine(p, q):
    return math.sin((p - q) / 2.0)


def normal_from_angles(ta, tb):
    """Unit normal of the geodesic between boundary angles ta, tb.

    Closed form, well conditioned even for very short arcs.
    """
    m, h = (ta + tb) / 2.0, (tb - ta) / 2.0
    s = math.sin(h)
    if abs(s) < 1e-300:
        raise ValueError("geodesic endpoints must differ")
    return np.array([math.cos(m), math.sin(m), -math.cos(h)]) / s


def endpoint_angles(n):
    """Boundary angles (a, b) of the geodesic with normal n, b - a in (0, 2pi)."""
    n = np.asarray(n, dtype=float)
    m = math.atan2(n[1], n[0])
    r = math.hypot(n[0], n[1])
    h = math.atan2(1.0 / r, -n[2] / r)
    return m - h, m + h


def geodesic_normal(p, q):
    """Unit spacelike normal of the geodesic with ideal endpoints p, q."""
    return normal_from_angles(float(to_angle(p)), float(to_angle(q)))


def geodesic_endpoints(n):
    """Ideal endpoints (extended reals) of the geodesic with normal n."""
    a, b = endpoint_angles(n)
    return float(from_angle(a)), float(from_angle(b))


def perpendicular_angles(ta, tb, tc, td):
    """Endpoint angles of the common perpendicular of two ultraparallel geodesics."""
    gamma = _half_sine(tc, ta) / _half_sine(tc, tb)
    delta = _half_sine(td, ta) / _half_sine(td, tb)
    if not gamma * delta > 0:
        raise ValueError("geodesics are not ultraparallel")
    r = math.sqrt(gamma * delta)
    out = []
    for w in (r, -r):
        z0 = math.sin(ta / 2.0) - w * math.sin(tb / 2.0)
        z1 = math.cos(ta / 2.0) - w * math.cos(tb / 2.0)
        out.append(2.0 * math.atan2(z0, z1))
    return tuple(out)


def crossing_cosine(ta, tb, tc, td):
    """|cos| of the angle between two crossing geodesics, from endpoint angles."""
    gamma = _half_sine(tc, ta) / _half_sine(tc, tb)
    delta = _half_sine(td, ta) / _half_sine(td, tb)
    return abs((gamma + delta) / (delta - gamma))


def point_distance(p, q):
    return float(np.arccosh(max(1.0, -minner(p, q))))


def geodesic_distance(n1, n2):
    """Distance between disjoint geodesics (0 if they cross or are asymptotic)."""
    c = abs(float(minner(n1, n2)))
    return float(np.arccosh(c)) if c > 1.0 else 0.0


def crossing(n1, n2, tol=1e-12):
    return abs(float(minner(n1, n2))) < 1.0 - tol


def point_line_distance(p, n):
    return float(np.arcsinh(abs(float(minner(p, n)))))


def project(p, n):
    """Nearest point of the geodesic {<x, n> = 0} to p."""
    return normalize_point(p - minner(p, n) * n)


def intersect(n1, n2):
    """Intersection point of two crossing geodesics."""
    return normalize_point(lcross(n1, n2))


def common_perpendicular(n1, n2):
    """(normal, foot on first, foot on second) for ultraparallel geodesics."""
    m = normal_from_angles(*perpendicular_angles(*endpoint_angles(n1), *endpoint_angles(n2)))
    return m, intersect(n1, m), intersect(n2, m)


def line_through(p, q):
    """Normal of the geodesic through two points of H^2."""
    return normalize_space(lcross(p, q))


def reflection(n):
    """Matrix of the reflection in the geodesic with unit normal n."""
    n = np.asarray(n, dtype=float)
    return np.eye(3) - 2.0 * np.outer(n, FORM @ n)


def segment_point_distance(a, b, p):
    """Distance from p to the geodesic segment [a, b]."""
    n = line_through(a, b)
    f = project(p, n)
    # f lies between a and b iff d(a,f) + d(f,b) = d(a,b)
    dab = point_distance(a, b)
    if point_distance(a, f) + point_distance(f, b) <= dab + 1e-10:
        return point_line_distance(p, n)
    return min(point_distance(a, p), point_distance(b, p))


def segment_line_distance(a, b, n):
    """Distance from a geodesic segment [a, b] to a complete geodesic (0 if they meet)."""
    sa, sb = float(minner(a, n)), float(minner(b, n))
    if sa * sb <= 0:
        return 0.0
    # <x(t), n> along the unit-speed segment is A cosh t + B sinh t
    L = point_distance(a, b)
    if L < 1e-15:
        return float(np.arcsinh(abs(sa)))
    tangent = (b - math.cosh(L) * a) / math.sinh(L)
    A, B = sa, float(minner(tangent, n))
    best = min(abs(sa), abs(sb))
    if abs(B) < abs(A):
        t = math.atanh(-B / A)
        if 0.0 < t < L:
            best = min(best, abs(A * math.cosh(t) + B * math.sinh(t)))
    return float(np.arcsinh(best))


def segment_crosses(a, b, n, tol=1e-12):
    """True if the open segment (a, b) crosses the geodesic with normal n."""
    sa, sb = float(minner(a, n)), float(minner(b, n))
    return (sa > tol and sb < -tol) or (sa < -tol and sb > tol)


def mobius_to_lorentz(matrix):
    """SO+(2,1) matrix of a real Möbius map acting on the upper half-plane."""
    m = np.asarray(matrix, dtype=float)
    zs = [1j, 2j, 1 + 1j]
    src = np.array([from_upper(z) for z in zs]).T
    img = []
    for z in zs:
        w = (m[0, 0] * z + m[0, 1]) / (m[1, 0] * z + m[1, 1])
        img.append(from_upper(w))
    return np.array(img).T @ np.linalg.inv(src)


def boost_to_origin(p):
    """Lorentz matrix sending the point p to (0, 0, 1)."""
    z = to_upper(p)
    a, b = z.real, z.imag
    # z -> (z - a) / b sends z to i
    return mobius_to_lorentz(np.array([[1.0, -a], [0.0, b]]) / math.sqrt(b))
