import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sparserls.baselines import (OracleConfig, OracleNotConverged, SequentialEstimator,
                                 exact_linesearch, lasso_oracle, line_objective, rls_solve,
                                 sequential_step)
from sparserls.estimator import (EstimatorState, RegularizationSchedule, evaluate_objective,
                                 soft_threshold, stepsize_simplified)
from sparserls.invariants import _Raw, random_instance
from sparserls.signal import Scenario, ScenarioConfig, generate_signal
from sparserls.stats import SufficientStats


def test_sequential_two_steps():
    s = _Raw(np.eye(2), np.array([1.0, 0.0]))
    st1 = sequential_step(EstimatorState.initial(2), s, 0.1)
    assert np.allclose(st1.x, [0.9, 0.0])
    s.t = 2
    st2 = sequential_step(st1, s, 0.1)
    assert np.allclose(st2.x, [0.9, 0.0]) and st2.t == 3


def test_sequential_touches_one_coordinate_cyclically():
    cfg = ScenarioConfig(K=7, density=0.3, horizon=20, seed=1)
    est = SequentialEstimator(7, RegularizationSchedule(scale=0.01))
    stats = SufficientStats(7)
    for t, _, samples in Scenario(cfg):
        stats.update(samples)
        before = est.x.copy()
        est.step(stats)
        changed = np.flatnonzero(est.x != before)
        assert set(changed) <= {(t - 1) % 7}


def test_rls_singular_ridge():
    x = rls_solve(_Raw(np.diag([1.0, 0.0]), np.array([1.0, 0.0])))
    assert x == pytest.approx([1 / (1 + 1e-4), 0.0], abs=1e-15)


def test_rls_zero_stats():
    assert np.array_equal(rls_solve(_Raw(np.zeros((3, 3)), np.zeros(3))), np.zeros(3))


def test_rls_consistency():
    cfg = ScenarioConfig(K=20, density=0.2, horizon=2000, seed=2)
    stats = SufficientStats(20)
    for _, truth, samples in Scenario(cfg):
        stats.update(samples)
    err = np.sum((rls_solve(stats) - truth.values) ** 2) / np.sum(truth.values**2)
    assert err <= 0.05


def test_oracle_mu_zero_is_least_squares():
    rng = np.random.default_rng(3)
    A = rng.standard_normal((30, 6))
    s = _Raw(A.T @ A / 30, rng.standard_normal(6))
    x = lasso_oracle(s, 0.0, OracleConfig(objective_tol=1e-15))
    assert np.allclose(x, np.linalg.solve(s.G, s.b), atol=1e-6)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_oracle_vs_proximal_gradient(seed):
    # independent full-gradient proximal iteration, 10^5 steps on a 5x5 problem
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((10, 5))
    s = _Raw(A.T @ A / 10, rng.standard_normal(5))
    mu = 0.2
    L = np.linalg.eigvalsh(s.G)[-1]
    z = np.zeros(5)
    for _ in range(100_000):
        z = soft_threshold(mu / L, z - (s.G @ z - s.b) / L)
    x = lasso_oracle(s, mu)
    assert evaluate_objective(s, mu, x) == pytest.approx(evaluate_objective(s, mu, z), abs=1e-6)


def test_oracle_warns_when_not_converged():
    rng = np.random.default_rng(4)
    A = rng.standard_normal((10, 8))
    s = _Raw(A.T @ A / 10, rng.standard_normal(8))
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        lasso_oracle(s, 0.01, OracleConfig(max_sweeps=1))
    assert any(issubclass(i.category, OracleNotConverged) for i in w)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_exact_linesearch_vs_grid(seed):
    s, x, xh, mu = random_instance(np.random.default_rng(seed))
    g = exact_linesearch(s, x, xh, mu)
    grid = np.linspace(0.0, 1.0, 10_001)
    best = min(line_objective(s, x, xh, mu, v) for v in grid)
    assert line_objective(s, x, xh, mu, g) <= best + 1e-12
    assert 0.0 <= g <= 1.0


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_exact_equals_simplified_without_l1(seed):
    s, x, xh, _ = random_instance(np.random.default_rng(seed))
    assert exact_linesearch(s, x, xh, 0.0) == pytest.approx(
        stepsize_simplified(s, x, xh, 0.0), abs=1e-10)
