import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from quasihull import earthquake as eq
from quasihull.errors import ConstructionFailure, CrossingInput, OnWeightedLeaf
from quasihull.mobius import CircleMap, angular_distance, from_angle, qs_norm_estimate, to_angle

INF = math.inf


def leaves_from_angles(pairs):
    return [eq.GeodesicH2(from_angle(a), from_angle(b)) for a, b in pairs]


def nested_lamination(rng, count):
    """Non-crossing leaves with endpoints at random angles (nested or disjoint arcs)."""
    t = np.sort(rng.uniform(-math.pi, math.pi, 2 * count))
    pairs = [(t[i], t[2 * count - 1 - i]) for i in range(count)] if rng.random() < 0.5 else [
        (t[2 * i], t[2 * i + 1]) for i in range(count)
    ]
    return eq.FiniteLamination(leaves_from_angles(pairs), rng.uniform(0.1, 1.5, count))


@pytest.mark.parametrize("t", [0.3, 1.0, 2.5])
def test_single_leaf_anchor(t):
    lam = eq.FiniteLamination([eq.GeodesicH2(0.0, INF)], [t])
    left = eq.Earthquake(lam, eq.LEFT, base=-1.0)
    right = eq.Earthquake(lam, eq.RIGHT, base=-1.0)
    x = np.array([-3.0, -0.5, 0.5, 2.0])
    assert np.allclose(left.boundary(x), np.where(x > 0, math.exp(t) * x, x))
    assert np.allclose(right.boundary(x), np.where(x > 0, math.exp(-t) * x, x))
    assert left.eval_point(1 + 1j) == pytest.approx(math.exp(t) * (1 + 1j))
    assert left.eval_point(-1 + 1j) == pytest.approx(-1 + 1j)


def test_geodesic_relations():
    a = eq.GeodesicH2(0.0, INF)
    assert a.relation(eq.GeodesicH2(1.0, 2.0)) == "ultraparallel"
    assert a.relation(eq.GeodesicH2(0.0, 1.0)) == "asymptotic"
    assert a.relation(eq.GeodesicH2(-1.0, 1.0)) == "crossing"
    # cosh d = (b + a) / (b - a) for (0, inf) and (a, b) with 0 < a < b
    assert a.distance(eq.GeodesicH2(1.0, 2.0)) == pytest.approx(math.acosh(3.0))


def test_crossing_leaves_are_rejected():
    with pytest.raises(CrossingInput):
        eq.FiniteLamination([eq.GeodesicH2(0.0, INF), eq.GeodesicH2(-1.0, 1.0)], [1.0, 1.0])


def test_base_on_a_leaf_is_rejected():
    lam = eq.FiniteLamination([eq.GeodesicH2(0.0, INF)], [1.0])
    with pytest.raises(OnWeightedLeaf):
        eq.Earthquake(lam, eq.LEFT, base=2j)


@given(st.integers(0, 10_000), st.integers(1, 4))
def test_inverse_undoes_the_earthquake(seed, count):
    rng = np.random.default_rng(seed)
    quake = eq.Earthquake(nested_lamination(rng, count), eq.LEFT if seed % 2 else eq.RIGHT)
    x = from_angle(rng.uniform(-math.pi, math.pi, 12))
    back = quake.inverse().boundary(quake.boundary(x))
    assert np.max(angular_distance(to_angle(back), to_angle(x))) < 1e-9


@given(st.integers(0, 10_000), st.integers(1, 4))
def test_boundary_map_is_monotone(seed, count):
    rng = np.random.default_rng(seed)
    quake = eq.Earthquake(nested_lamination(rng, count), eq.LEFT)
    t = np.linspace(-math.pi, math.pi, 200, endpoint=False) + 1e-3
    y = to_angle(quake.boundary(from_angle(t)))
    assert np.all(np.diff(np.unwrap(y)) > 0)


def test_json_round_trip(rng):
    quake = eq.Earthquake(nested_lamination(rng, 3), eq.RIGHT)
    back = eq.earthquake_from_json(quake.to_json())
    x = from_angle(rng.uniform(-3, 3, 10))
    assert np.allclose(to_angle(back.boundary(x)), to_angle(quake.boundary(x)))
    assert back.lamination.matches(quake.lamination)


def test_exact_circle_map_evaluates_piecewise_mobius(rng):
    quake = eq.Earthquake(nested_lamination(rng, 2), eq.LEFT)
    xs = from_angle(np.linspace(-3, 3, 9))
    cmap = CircleMap(xs, quake.boundary(xs), interp="pw-moebius", exact=quake.to_json())
    probe = from_angle(rng.uniform(-3, 3, 20))
    assert np.max(angular_distance(to_angle(cmap(probe)), to_angle(quake.boundary(probe)))) < 1e-9


def test_qs_estimate_of_single_shear_exceeds_exp_weight():
    for t in (0.5, 1.5):
        lam = eq.FiniteLamination([eq.GeodesicH2(0.0, INF)], [t])
        quake = eq.Earthquake(lam, eq.LEFT, base=-1.0)
        assert qs_norm_estimate(quake.boundary, count=2048) >= math.exp(t) * (1 - 1e-9)


def test_thurston_norm_of_far_apart_leaves():
    lam = eq.FiniteLamination([eq.GeodesicH2(0.0, INF), eq.GeodesicH2(1.0, 2.0)], [0.7, 0.4])
    lo, hi = eq.thurston_norm_estimate(lam)
    assert lo == pytest.approx(0.7) and hi == pytest.approx(0.7)


def test_thurston_norm_of_close_leaves_adds_weights():
    # asymptotic leaves are crossed by arbitrarily short segments near the common endpoint
    near = eq.FiniteLamination([eq.GeodesicH2(0.0, INF), eq.GeodesicH2(0.0, -1.0)], [0.7, 0.4])
    lo, hi = eq.thurston_norm_estimate(near)
    assert lo == pytest.approx(1.1) and hi == pytest.approx(1.1)


@given(st.integers(0, 10_000))
def test_norm_bounds_are_ordered_and_scale(seed):
    rng = np.random.default_rng(seed)
    lam = nested_lamination(rng, int(rng.integers(1, 5)))
    lo, hi = eq.thurston_norm_estimate(lam)
    assert max(lam.weights) - 1e-12 <= lo <= hi + 1e-12 <= sum(lam.weights) + 1e-9
    lo2, hi2 = eq.thurston_norm_estimate(lam.scaled(2.0))
    assert lo2 == pytest.approx(2 * lo) and hi2 == pytest.approx(2 * hi)


@pytest.mark.parametrize("seed", range(10))
def test_perturbation_makes_leaves_ultraparallel(seed):
    rng = np.random.default_rng(seed)
    # asymptotic leaves sharing endpoints
    t = np.sort(rng.uniform(-3, 3, 4))
    leaves = leaves_from_angles([(t[0], t[1]), (t[1], t[2]), (t[2], t[3]), (t[3], t[0])])
    n = int(rng.integers(1, 6))
    moved = eq.perturb_ultraparallel(leaves, n)
    before = eq.FiniteLamination(leaves, [1.0] * 4).pairwise_distances()
    after = eq.FiniteLamination(moved, [1.0] * 4).pairwise_distances()
    off = ~np.eye(4, dtype=bool)
    assert np.all(after[off] > before[off])
    assert eq.FiniteLamination(moved, [1.0] * 4).is_ultraparallel()
    for a, b in zip(leaves, moved):
        assert eq.leaf_displacement(a, b) < 1.0 / n


def test_non_strict_perturbation_keeps_ultraparallel_input():
    leaves = [eq.GeodesicH2(0.0, 1.0), eq.GeodesicH2(2.0, 3.0)]
    assert eq.perturb_ultraparallel(leaves, 3, strict=False) == leaves


@pytest.mark.parametrize("k,n", [(1, 1), (2, 1), (1, 3)])
def test_right_angled_polygon_claims(k, n):
    # both leaves pass within distance 1 of i
    lam = eq.FiniteLamination([eq.GeodesicH2(-1.0, 1.0), eq.GeodesicH2(1.01, 100.0)], [0.5, 0.8])
    mu = eq.FiniteLamination(eq.perturb_ultraparallel(lam.leaves, n, strict=False, ref=1j), lam.weights)
    poly = eq.build_right_angled_polygon(mu, 1j, k, n)
    claims = eq.check_polygon_claims(poly, mu, eq.h2.from_upper(1j), k + n)
    assert all(claims.values()), claims
    assert max(poly.vertex_cosines()) < 1e-9


def test_polygon_without_leaves():
    poly = eq.build_right_angled_polygon(eq.FiniteLamination(), 1j, 1, 1)
    assert all(eq.check_polygon_claims(poly, eq.FiniteLamination(), eq.h2.from_upper(1j), 2.0).values())


def test_polygon_precondition():
    lam = eq.FiniteLamination([eq.GeodesicH2(100.0, 101.0)], [1.0])
    with pytest.raises(ConstructionFailure):
        eq.build_right_angled_polygon(lam, 1j, 1, 1)


def test_reflection_orbit_restriction_and_norm():
    lam = eq.FiniteLamination([eq.GeodesicH2(-1.0, 1.0)], [0.6])
    mu, poly, orbit, gens, elements = eq.approximate_lamination(lam, n=1, k=1, x0=1j)
    center = eq.h2.from_upper(1j)
    # inside B(x0, k + n) the orbit lamination is exactly the perturbed input
    inner = eq.restrict_to_ball(orbit, center, 2.0)
    assert inner.matches(eq.restrict_to_ball(mu, center, 2.0))
    # each generator is an involution
    for g in gens:
        assert np.allclose(g @ g, np.eye(3), rtol=0, atol=1e-9 * np.abs(g).max() ** 2)
    lo, hi = eq.thurston_norm_estimate(orbit)
    assert hi <= eq.thurston_norm_estimate(lam)[1] + 1e-12
