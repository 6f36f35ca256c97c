import math

import numpy as np
import pytest

from quasihull import inverse_solver as inv
from quasihull.earthquake import LEFT, Earthquake, FiniteLamination, GeodesicH2
from quasihull.errors import InfeasibleParams, SchemaError
from quasihull.mobius import CircleMap, from_angle

GRID = [-2.0, -1.0, -0.5, 0.0, 1.0, math.inf]


def random_params(oracle, rng, spread=0.6):
    """Feasible parameters: marked entries kept, the others jittered inside their gaps."""
    chart = inv._GapChart(oracle.identity_params(), oracle.marked)
    return chart.decode(chart.encode(oracle.identity_params()) + rng.normal(scale=spread, size=chart.dim))


@pytest.mark.parametrize("tag", ["ads", "hyp"])
def test_identity_parameters_give_the_identity(tag):
    oracle = inv.ForwardOracle(tag, GRID)
    res = inv.forward_residual(oracle, oracle.identity_params(), CircleMap.identity(GRID))
    assert res < 1e-12
    report = inv.solve_gluing_inverse(oracle, CircleMap.identity(GRID), budget=50)
    assert report.residual < 1e-12 and not report.budget_exhausted


def test_oracle_validation():
    with pytest.raises(SchemaError):
        inv.ForwardOracle("euclid", GRID)
    with pytest.raises(SchemaError):
        inv.ForwardOracle("ads", [0.0, 2.0, 1.0])
    oracle = inv.ForwardOracle("ads", GRID)
    with pytest.raises(InfeasibleParams):
        oracle.check(oracle.identity_params()[::-1])
    with pytest.raises(InfeasibleParams):
        oracle.check(oracle.identity_params()[:3])


@pytest.mark.parametrize("marked", [(0, 1, 2), (0, 2, 4), (1, 3, 5)])
def test_gap_chart_round_trip(marked, rng):
    oracle = inv.ForwardOracle("ads", GRID, marked)
    chart = inv._GapChart(oracle.identity_params(), marked)
    for _ in range(20):
        u = rng.normal(scale=2.0, size=chart.dim)
        beta = chart.decode(u)
        oracle.check(beta)
        assert np.allclose(chart.encode(beta), u, atol=1e-9)
        assert np.allclose(beta[list(marked)], oracle.identity_params()[list(marked)])


@pytest.mark.parametrize("tag,seed", [("ads", 0), ("ads", 1), ("hyp", 0)])
def test_recovers_a_reachable_target(tag, seed):
    oracle = inv.ForwardOracle(tag, GRID)
    target = oracle.evaluate(random_params(oracle, np.random.default_rng(seed)))
    report = inv.solve_gluing_inverse(oracle, target, budget=10_000, seed=seed, goal=1e-6)
    assert report.residual < 1e-5
    assert inv.forward_residual(oracle, report.params, target) == pytest.approx(report.residual, abs=1e-12)
    assert report.evaluations <= 10_000


def test_same_seed_same_report():
    oracle = inv.ForwardOracle("ads", GRID)
    target = oracle.evaluate(random_params(oracle, np.random.default_rng(5)))
    a = inv.solve_gluing_inverse(oracle, target, budget=600, seed=3).to_json()
    b = inv.solve_gluing_inverse(oracle, target, budget=600, seed=3).to_json()
    assert a == b


def test_trace_never_increases():
    oracle = inv.ForwardOracle("ads", GRID)
    target = oracle.evaluate(random_params(oracle, np.random.default_rng(8)))
    report = inv.solve_gluing_inverse(oracle, target, budget=800, seed=0, restarts=1)
    assert all(b <= a for a, b in zip(report.trace, report.trace[1:]))


def test_small_budget_is_reported_not_raised():
    oracle = inv.ForwardOracle("ads", GRID)
    target = oracle.evaluate(random_params(oracle, np.random.default_rng(2), spread=1.5))
    report = inv.solve_gluing_inverse(oracle, target, budget=10, seed=0)
    assert report.budget_exhausted
    assert report.evaluations <= 10


def test_earthquake_target():
    grid = from_angle(np.linspace(-math.pi, math.pi, 6, endpoint=False) + 0.3)
    lam = FiniteLamination([GeodesicH2(grid[0], grid[2]), GeodesicH2(grid[3], grid[5])], [0.3, 0.5])
    target = inv.normalized_target(grid, Earthquake(lam, LEFT).boundary(grid))
    oracle = inv.ForwardOracle("ads", inv.normalized_target(grid, grid).xs)
    report = inv.solve_gluing_inverse(oracle, target, budget=10_000, seed=0, goal=1e-6)
    assert report.residual < 1e-4


def test_solve_from_config():
    doc = {
        "oracle": "ads",
        "grid": [-2, -1, -0.5, 0, 1, "inf"],
        "target": CircleMap.identity(GRID).to_json(),
        "budget": 100,
        "seed": 1,
    }
    rep = inv.solve_from_config(doc).to_json()
    assert rep["residual"] < 1e-12
    with pytest.raises(SchemaError):
        inv.solve_from_config({"oracle": "ads"})
