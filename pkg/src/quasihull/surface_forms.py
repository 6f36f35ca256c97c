"""Pointwise fundamental-form algebra for surfaces in H^3, dS^3 and AdS^3.

A jet is the first fundamental form I (a positive-definite 2x2 matrix in
some coordinate frame) together with the shape operator B, self-adjoint
for I.  Bilinear forms are returned as matrices: ``II = I B``,
``III = B^T I B``.
"""

import math

import numpy as np

from .errors import CuspidalJet, DegenerateShape, InvalidJet, SchemaError, SingularProjection

HYP, DS, ADS = "hyp", "ds", "ads"
AMBIENTS = (HYP, DS, ADS)
# the dual surface of a surface in H^3 lives in de Sitter space and vice versa
_DUAL_AMBIENT = {HYP: DS, DS: HYP, ADS: ADS}
ROTATION = np.array([[0.0, -1.0], [1.0, 0.0]])


class SurfaceJet:
    def __init__(self, I, B, ambient=HYP, tol=1e-10):
        self.I = np.array(I, dtype=float).reshape(2, 2)
        self.B = np.array(B, dtype=float).reshape(2, 2)
        if ambient not in AMBIENTS:
            raise InvalidJet(f"unknown ambient {ambient!r}")
        self.ambient = ambient
        if not np.all(np.isfinite(self.I)) or not np.all(np.isfinite(self.B)):
            raise InvalidJet("non-finite entries")
        scale = max(1.0, float(np.abs(self.I).max()))
        if abs(self.I[0, 1] - self.I[1, 0]) > tol * scale:
            raise InvalidJet("I is not symmetric")
        self.I = (self.I + self.I.T) / 2.0
        if self.I[0, 0] <= 0 or np.linalg.det(self.I) <= 0:
            raise InvalidJet("I is not positive definite")
        ib = self.I @ self.B
        if abs(ib[0, 1] - ib[1, 0]) > tol * max(1.0, float(np.abs(ib).max())):
            raise InvalidJet("B is not self-adjoint for I")

    @classmethod
    def from_json(cls, doc):
        try:
            return cls(doc["I"], doc["B"], doc.get("ambient", HYP))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InvalidJet):
                raise
            raise SchemaError(f"malformed jet: {exc}") from exc

    def to_json(self):
        return {"ambient": self.ambient, "I": self.I.tolist(), "B": self.B.tolist()}

    @property
    def frame(self):
        """Upper-triangular S with I = S^T S (positive diagonal)."""
        return np.linalg.cholesky(self.I).T

    @property
    def J(self):
        """Rotation by +pi/2 for I, oriented by the coordinate frame."""
        s = self.frame
        return np.linalg.solve(s, ROTATION @ s)

    @property
    def E(self):
        return np.eye(2)

    @property
    def principal_curvatures(self):
        # B is similar to the symmetric matrix S B S^{-1}
        s = self.frame
        m = s @ self.B @ np.linalg.inv(s)
        mu = np.linalg.eigvalsh((m + m.T) / 2.0)
        return float(mu[1]), float(mu[0])

    @property
    def mean_curvature(self):
        return float(np.trace(self.B))

    @property
    def det_B(self):
        return float(np.linalg.det(self.B))


def random_jet(rng, ambient=HYP, curvatures=None, spread=2.0):
    """Random valid jet; ``curvatures`` fixes (mu1, mu2), otherwise they are N(0, spread)."""
    a = rng.normal(size=(2, 2))
    I = a @ a.T + 0.2 * np.eye(2)
    s = np.linalg.cholesky(I).T
    mu = np.sort(rng.normal(scale=spread, size=2))[::-1] if curvatures is None else np.asarray(curvatures)
    t = rng.uniform(0, math.pi)
    rot = np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]])
    m = rot @ np.diag(mu) @ rot.T
    return SurfaceJet(I, np.linalg.solve(s, m @ s), ambient)


def forms_from_jet(j):
    """(II, III) as matrices."""
    ii = j.I @ j.B
    iii = j.B.T @ j.I @ j.B
    return (ii + ii.T) / 2.0, (iii + iii.T) / 2.0


def gauss_curvature(j):
    """(K, det B).  Gauss equation: det B - 1 in H^3, 1 - det B in dS^3, -1 - det B in AdS^3."""
    d = j.det_B
    if j.ambient == HYP:
        return d - 1.0, d
    if j.ambient == DS:
        return 1.0 - d, d
    return -1.0 - d, d


def _require_invertible(j, tol=1e-12):
    if abs(j.det_B) <= tol * max(1.0, float(np.abs(j.B).max()) ** 2):
        raise DegenerateShape("shape operator is not invertible")


def third_form_curvature(j):
    """Curvature of the third fundamental form, from K alone."""
    _require_invertible(j)
    k, _ = gauss_curvature(j)
    if j.ambient == HYP:
        return k / (k + 1.0)
    if j.ambient == DS:
        return k / (1.0 - k)
    return -k / (k + 1.0)


def dual_jet(j):
    """Polar dual: I* = III, B* = B^{-1}; the ambient switches H^3 <-> dS^3, AdS^3 is self-dual."""
    _require_invertible(j)
    _, iii = forms_from_jet(j)
    return SurfaceJet(iii, np.linalg.inv(j.B), _DUAL_AMBIENT[j.ambient])


def projection_pullback_metrics(j, tol=1e-12):
    """Pullbacks of the hyperbolic metric by the left and right projections of an AdS jet.

    Returns ``(g_l, g_r, certificates)`` where the certificates hold the
    residuals of det(E + J B) = -K and tr_I(A^* A) = 2 + tr(B^2).
    """
    if j.ambient != ADS:
        raise InvalidJet("projections are defined for AdS jets")
    jb = j.J @ j.B
    out = []
    for a in (np.eye(2) + jb, np.eye(2) - jb):
        if abs(np.linalg.det(a)) <= tol:
            raise SingularProjection("E +- J B is singular")
        g = a.T @ j.I @ a
        out.append((g + g.T) / 2.0)
    k, _ = gauss_curvature(j)
    a = np.eye(2) + jb
    adjoint = np.linalg.solve(j.I, a.T @ j.I)
    cert = {
        "det_minus_K": float(np.linalg.det(a) + k),
        "trace_identity": float(np.trace(adjoint @ a) - 2.0 - np.trace(j.B @ j.B)),
    }
    return out[0], out[1], cert


def pullback_eigenvalue_bounds(D):
    """Interval containing the eigenvalues of I^{-1} g_l when the principal curvatures lie in [1/D, D].

    In a principal frame I^{-1} g_l has trace 2 + mu1^2 + mu2^2 and
    determinant (1 + mu1 mu2)^2.
    """
    if D < 1:
        raise ValueError("D must be at least 1")
    hi = 2.0 + 2.0 * D * D
    lo = (1.0 + 1.0 / D**2) ** 2 / hi
    return lo, hi


def horospherical_identity(j, tol=1e-12):
    """(I + 2 II + III, K / ((1 + mu1)(1 + mu2))) for a jet of a convex surface in H^3."""
    if j.ambient != HYP:
        raise InvalidJet("horospherical metric is defined for H^3 jets")
    mu1, mu2 = j.principal_curvatures
    if min(abs(1.0 + mu1), abs(1.0 + mu2)) <= tol:
        raise CuspidalJet("a principal curvature equals -1")
    if mu2 < -1.0:
        raise InvalidJet("principal curvature below -1 (not the convex side)")
    ii, iii = forms_from_jet(j)
    k, _ = gauss_curvature(j)
    return j.I + 2.0 * ii + iii, k / ((1.0 + mu1) * (1.0 + mu2))
