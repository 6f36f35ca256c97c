"""Search for finite convex hulls with a prescribed gluing map.

The unknowns are the second coordinates of the vertices, as angles
``beta_1 < ... < beta_n < beta_1 + 2 pi`` over a fixed first-coordinate
grid.  The marked entries are pinned, which removes the Möbius freedom of
the second coordinate (it does not change the normalized gluing map).

* AdS oracle: vertices ``(x_j, y_j)`` of an acausal polygon.
* H^3 oracle: ideal vertices in the disk model at argument
  ``(alpha_j + beta_j)/2`` and radius ``tan(pi/4 + (beta_j - alpha_j)/4)``,
  so that ``beta = alpha`` puts every vertex on the round circle.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import ads3, hyp3
from .errors import DomainError, InfeasibleParams, SchemaError
from .mobius import (
    TWO_PI,
    CircleMap,
    angular_distance,
    from_angle,
    mobius_from_triples,
    parse_value,
    to_angle,
    unwrap_increasing,
)

ORACLES = ("ads", "hyp")
MIN_GAP = 1e-6


class ForwardOracle:
    """Maps second-coordinate angles to the normalized gluing samples of the hull."""

    def __init__(self, tag, grid, marked=(0, 1, 2)):
        if tag not in ORACLES:
            raise SchemaError(f"unknown oracle {tag!r}")
        self.tag = tag
        self.grid = np.array([parse_value(g) if isinstance(g, str) else float(g) for g in grid])
        if len(self.grid) < 3:
            raise SchemaError("grid needs at least three points")
        self.alpha = to_angle(self.grid)
        if not _cyclic_ok(self.alpha):
            raise SchemaError("grid must be strictly cyclically increasing")
        self.alpha = unwrap_increasing(self.alpha)
        self.marked = tuple(marked)
        self.evaluations = 0

    @property
    def n(self):
        return len(self.grid)

    def identity_params(self):
        return self.alpha.copy()

    def check(self, beta):
        beta = np.asarray(beta, dtype=float)
        if beta.shape != (self.n,) or not np.all(np.isfinite(beta)):
            raise InfeasibleParams("parameter vector has the wrong shape")
        if not _cyclic_ok(beta):
            raise InfeasibleParams("parameters are not strictly cyclically increasing")
        if self.tag == "hyp":
            lag = np.abs(_centered(beta - self.alpha))
            if np.any(lag >= math.pi - MIN_GAP):
                raise InfeasibleParams("vertex leaves the disk chart")
        return beta

    def vertices(self, beta):
        beta = self.check(beta)
        if self.tag == "ads":
            return list(zip(self.grid.tolist(), from_angle(beta).tolist()))
        lag = _centered(beta - self.alpha)
        arg = self.alpha + lag / 2.0
        radius = np.tan(math.pi / 4.0 + lag / 4.0)
        w = -radius * np.exp(1j * arg)
        out = []
        for v in w:
            out.append(math.inf if abs(1.0 - v) < 1e-15 else 1j * (1.0 + v) / (1.0 - v))
        return out

    def evaluate(self, beta):
        """Normalized gluing samples as a CircleMap."""
        verts = self.vertices(beta)
        self.evaluations += 1
        if self.tag == "ads":
            hull = ads3.convex_hull_acausal(ads3.AcausalPolygon(verts, self.marked))
            return ads3.ads_gluing_samples(hull, route="development")
        hull = hyp3.convex_hull_ideal(verts, self.marked)
        return hyp3.hyp_gluing_samples(hull)


def _centered(t):
    return np.mod(np.asarray(t) + math.pi, TWO_PI) - math.pi


def _cyclic_ok(beta):
    gaps = np.diff(np.append(beta, beta[0] + TWO_PI))
    return bool(np.all(gaps >= MIN_GAP))


def forward_residual(oracle, params, target):
    """Sup over samples of the angular distance between target(a_i) and b_i."""
    achieved = oracle.evaluate(params)
    img = to_angle(np.atleast_1d(target(achieved.xs)))
    return float(np.max(angular_distance(img, to_angle(achieved.ys))))


@dataclass
class SolveReport:
    params: list
    residual: float
    iterations: int
    evaluations: int
    trace: list = field(default_factory=list)
    restart: int = 0
    budget_exhausted: bool = False

    def to_json(self):
        return {
            "params": [float(p) for p in self.params],
            "second_coordinates": [float(v) for v in np.atleast_1d(from_angle(np.array(self.params)))],
            "residual": self.residual,
            "iterations": self.iterations,
            "evaluations": self.evaluations,
            "restart": self.restart,
            "budget_exhausted": self.budget_exhausted,
            "trace": self.trace,
        }


def _mismatch(oracle, beta, target):
    """Per-sample signed angular mismatch (the residual is its sup norm)."""
    achieved = oracle.evaluate(beta)
    img = to_angle(np.atleast_1d(target(achieved.xs)))
    return _centered(img - to_angle(achieved.ys))


class _Objective:
    """Sum of squared mismatches (smooth away from face flips), counting evaluations."""

    def __init__(self, oracle, target, budget, chart):
        self.oracle, self.target, self.budget, self.chart = oracle, target, budget, chart
        self.used = 0

    @property
    def exhausted(self):
        return self.used >= self.budget

    def __call__(self, u):
        self.used += 1
        try:
            m = _mismatch(self.oracle, self.chart.decode(u), self.target)
        except DomainError:
            return math.inf, math.inf
        return float(m @ m), float(np.max(np.abs(m)))


class _GapChart:
    """Unconstrained coordinates for the monotone cone with the marked entries pinned.

    The free entries between two consecutive pinned ones are encoded by the
    logarithms of their gaps relative to the first gap (a softmax), so the
    cone boundary lies at infinity and the search cannot get stuck on it.
    """

    def __init__(self, anchor, marked):
        self.anchor = np.asarray(anchor, dtype=float)
        n = len(anchor)
        pins = sorted(set(marked))
        self.runs = []
        for a, b in zip(pins, pins[1:] + [pins[0] + n]):
            free = [k % n for k in range(a + 1, b)]
            if free:
                self.runs.append((a, b % n, b >= n, free))
        self.dim = sum(len(r[3]) for r in self.runs)

    def encode(self, beta):
        u = []
        for a, b, wraps, free in self.runs:
            pts = [beta[a]] + [beta[k] for k in free] + [beta[b] + (TWO_PI if wraps else 0.0)]
            pts = np.array(pts)
            pts[1:-1] += TWO_PI * np.array([k < a for k in free])
            logs = np.log(np.diff(pts))
            u.extend((logs[1:] - logs[0]).tolist())
        return np.array(u)

    def decode(self, u):
        beta = self.anchor.copy()
        pos = 0
        for a, b, wraps, free in self.runs:
            k = len(free)
            w = np.exp(np.concatenate([[0.0], u[pos:pos + k]]) - max(0.0, float(np.max(u[pos:pos + k]))))
            pos += k
            lo, hi = beta[a], beta[b] + (TWO_PI if wraps else 0.0)
            cuts = lo + (hi - lo) * np.cumsum(w / w.sum())[:-1]
            for idx, val in zip(free, cuts):
                beta[idx] = val - TWO_PI if (wraps and idx < a) else val
        return beta


def _explore(obj, u, value, step, basis):
    """Poll +-step along each basis direction."""
    for d in basis.T:
        for sgn in (1.0, -1.0):
            if obj.exhausted:
                return u, value
            cand = u + sgn * step * d
            val = obj(cand)
            if val[0] < value[0]:
                return cand, val
    return u, value


def _pattern_search(obj, start, goal, step, rng):
    """Hooke-Jeeves in gap coordinates; the poll basis is re-drawn at random each sweep."""
    base, value = start.copy(), obj(start)
    trace = [value[0]]
    iterations = 0
    k = len(start)
    while not obj.exhausted and value[1] > goal and step > 1e-12:
        iterations += 1
        basis, _ = np.linalg.qr(rng.normal(size=(k, k)))
        new, new_value = _explore(obj, base, value, step, basis)
        if new_value[0] >= value[0]:
            step /= 2.0
            continue
        while True:
            prev, base, value = base, new, new_value
            trace.append(value[0])
            if obj.exhausted or value[1] <= goal:
                break
            probe = 2.0 * base - prev
            new, new_value = _explore(obj, probe, obj(probe), step, basis)
            if new_value[0] >= value[0]:
                break
    return base, value, iterations, trace


def solve_gluing_inverse(oracle, target, budget=10_000, seed=0, restarts=4, goal=1e-10, step=0.5):
    """Derivative-free pattern search with seeded restarts; never claims optimality.

    The search minimizes the sum of squared mismatches; ``residual`` is the
    sup norm of the mismatch at the best point and ``trace`` lists the
    objective at accepted steps.  The first restart starts from the
    identity parameters, later ones from seeded random gap coordinates.
    The budget counts forward evaluations over all restarts.  A report is
    always returned; ``budget_exhausted`` records whether the goal was
    missed.
    """
    rng = np.random.default_rng(seed)
    base = oracle.identity_params()
    chart = _GapChart(base, oracle.marked)
    if chart.dim == 0:
        res = forward_residual(oracle, base, target)
        return SolveReport(base.tolist(), res, 0, 1, [res], 0, res > goal)
    per_restart = max(1, budget // max(1, restarts))
    best_report = None
    spent = 0
    for r in range(restarts):
        u0 = chart.encode(base)
        if r > 0:
            u0 = u0 + rng.normal(scale=1.0, size=chart.dim)
        allowance = budget - spent if r == restarts - 1 else min(per_restart, budget - spent)
        if allowance <= 0:
            break
        obj = _Objective(oracle, target, allowance, chart)
        u, value, its, trace = _pattern_search(obj, u0, goal, step, np.random.default_rng([seed, r]))
        spent += obj.used
        report = SolveReport(chart.decode(u).tolist(), value[1], its, obj.used, trace, r)
        if best_report is None or report.residual < best_report.residual:
            best_report = report
        if best_report.residual <= goal:
            break
    best_report.evaluations = spent
    best_report.budget_exhausted = best_report.residual > goal
    return best_report


def solve_from_config(doc):
    """Run a solve config ``{"oracle", "grid", "target", "budget", "seed"}``."""
    try:
        oracle = ForwardOracle(doc["oracle"], doc["grid"], doc.get("marked", (0, 1, 2)))
        target = CircleMap.from_json(doc["target"])
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed solve config: {exc}") from exc
    return solve_gluing_inverse(
        oracle, target, budget=int(doc.get("budget", 10_000)), seed=int(doc.get("seed", 0)),
        restarts=int(doc.get("restarts", 3)), goal=float(doc.get("goal", 1e-10)),
    )


def normalized_target(xs, ys, marked=(0, 1, 2)):
    """Sample pairs made to fix 0, 1 and inf by Möbius maps on both sides."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    m = list(marked)
    g1 = mobius_from_triples(xs[m], [0.0, 1.0, math.inf])
    g2 = mobius_from_triples(ys[m], [0.0, 1.0, math.inf])
    a, b = np.atleast_1d(g1(xs)).astype(float), np.atleast_1d(g2(ys)).astype(float)
    a[m] = b[m] = (0.0, 1.0, math.inf)
    return CircleMap(a, b)
