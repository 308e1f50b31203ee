import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from sparserls.signal import RegressionSample, Scenario, ScenarioConfig
from sparserls.stats import (NodePartialStats, SufficientStats, batch_stats, max_eigenvalue,
                             update_partial)


def _sample(g, y, t=1, n=1):
    return RegressionSample(g=np.asarray(g, dtype=float), y=float(y), sensor_id=n, time=t)


def test_first_update_outer_product():
    s = SufficientStats(2).update([_sample([1, 2], 3)])
    assert np.array_equal(s.G, [[1, 2], [2, 4]])
    assert np.array_equal(s.b, [3, 6])
    assert s.t == 1


def test_two_instances_equal_batch_average():
    s = SufficientStats(2)
    a, b = [_sample([1, 2], 3, t=1)], [_sample([0, 1], -1, t=2)]
    s.update(a).update(b)
    G, bb = batch_stats([a, b], 2)
    assert np.allclose(s.G, G, rtol=0, atol=1e-15)
    assert np.allclose(s.b, bb, rtol=0, atol=1e-15)


def test_beta_zero_discards_history():
    s = SufficientStats(2, beta=0.0)
    s.update([_sample([1, 2], 3, t=1)]).update([_sample([0, 1], -1, t=2)])
    assert np.array_equal(s.G, np.outer([0, 1], [0, 1]) / 2)
    assert np.array_equal(s.b, np.array([0, -1]) / 2)


@pytest.mark.parametrize("beta", [1.0, 0.9, 0.5])
def test_recursion_matches_definition(beta):
    cfg = ScenarioConfig(K=6, N=3, density=0.5, horizon=40, seed=beta.hex().__hash__() % 1000)
    s = SufficientStats(cfg.K, beta)
    hist = []
    for _, _, samples in Scenario(cfg):
        s.update(samples)
        hist.append(samples)
        G, b = batch_stats(hist, cfg.K, beta)
        assert np.linalg.norm(s.G - G) <= 1e-12 * np.linalg.norm(G)
        assert np.linalg.norm(s.b - b) <= 1e-12 * np.linalg.norm(b)
        assert np.array_equal(s.G, s.G.T)
        assert np.linalg.eigvalsh(s.G)[0] >= -1e-10 * np.linalg.norm(s.G)


def test_rejects_bad_input():
    s = SufficientStats(3)
    with pytest.raises(ValueError, match="does not match"):
        s.update([_sample([1, 2], 0)])
    with pytest.raises(ValueError, match="next instance"):
        s.update([_sample([1, 2, 3], 0, t=2)])
    with pytest.raises(ValueError):
        SufficientStats(3, beta=1.5)


def test_partial_single_node_equals_central():
    cfg = ScenarioConfig(K=5, N=1, density=0.4, horizon=10, seed=1)
    c, p = SufficientStats(5), NodePartialStats(1, 5)
    for _, _, samples in Scenario(cfg):
        c.update(samples)
        update_partial(p, samples)
    assert np.array_equal(c.G, p.G) and np.array_equal(c.b, p.b)


@pytest.mark.parametrize("N,T", [(2, 5), (3, 50)])
def test_partials_sum_to_central(N, T):
    cfg = ScenarioConfig(K=8, N=N, density=0.25, horizon=T, seed=2)
    c = SufficientStats(8)
    nodes = [NodePartialStats(n, 8) for n in range(1, N + 1)]
    for _, _, samples in Scenario(cfg):
        c.update(samples)
        for node in nodes:
            node.update([s for s in samples if s.sensor_id == node.sensor_id])
    G = sum(n.G for n in nodes)
    b = sum(n.b for n in nodes)
    assert np.linalg.norm(G - c.G) <= 1e-12 * np.linalg.norm(c.G)
    assert np.linalg.norm(b - c.b) <= 1e-12 * np.linalg.norm(c.b)


def test_node_refuses_foreign_samples():
    node = NodePartialStats(2, 2)
    with pytest.raises(ValueError, match="sensor 1"):
        node.update([_sample([1, 1], 0, n=1)])


def test_large_sample_covariance():
    K, N = 5, 2
    cfg = ScenarioConfig(K=K, N=N, density=0.2, horizon=2500, seed=3)
    s = SufficientStats(K)
    for _, _, samples in Scenario(cfg):
        s.update(samples)
    target = N * np.eye(K)
    assert np.linalg.norm(s.G - target) / np.linalg.norm(target) <= 0.1


@pytest.mark.parametrize("G,expected", [(np.eye(3), 1.0), (np.diag([1.0, 2.0, 5.0]), 5.0)])
def test_max_eigenvalue_simple(G, expected):
    assert max_eigenvalue(G) == expected


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_max_eigenvalue_vs_general_eigensolver(seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((10, 10))
    G = A @ A.T
    # general nonsymmetric solver as an independent route
    ref = np.max(scipy.linalg.eigvals(G).real)
    assert max_eigenvalue(G) == pytest.approx(ref, rel=1e-9)


def test_snapshot_roundtrip(tmp_path):
    cfg = ScenarioConfig(K=7, N=2, density=0.3, horizon=12, seed=4)
    s = SufficientStats(7, beta=0.9)
    for _, _, samples in Scenario(cfg):
        s.update(samples)
    p = tmp_path / "stats.csv"
    s.dump(p)
    header = p.read_text().splitlines()[0]
    assert header == "K=7,t=12,beta=0.9"
    r = SufficientStats.load(p)
    assert (r.K, r.t, r.beta) == (7, 12, 0.9)
    assert np.array_equal(r.G, s.G) and np.array_equal(r.b, s.b)
