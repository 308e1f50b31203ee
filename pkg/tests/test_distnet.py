import numpy as np
import pytest

from sparserls.distnet import SignalingLedger, run_centralized, run_fusion_center, run_fusion_free
from sparserls.estimator import EstimatorConfig, RegularizationSchedule
from sparserls.signal import ScenarioConfig

CFG = ScenarioConfig(K=20, N=3, density=0.2, horizon=30, seed=5)
EST = EstimatorConfig()


def test_fusion_free_matches_centralized():
    central = run_centralized(CFG, EST)
    ff = run_fusion_free(CFG, EST)
    assert ff.node_trajectories.shape == (3, 31, 20)
    scale = np.maximum(np.max(np.abs(central), axis=1), 1e-300)
    dev = np.max(np.abs(ff.node_trajectories - central), axis=2) / scale
    assert np.max(dev) <= 1e-12


def test_fusion_center_matches_centralized():
    assert np.array_equal(run_fusion_center(CFG, EST).trajectory, run_centralized(CFG, EST))


def test_fusion_free_ledger():
    ff = run_fusion_free(CFG, EST)
    assert len(ff.ledger.rows) == 3 * 30
    assert all(r[2:] == (40, 40, 80) for r in ff.ledger.rows)
    assert ff.ledger.per_node(1) == {1: 80, 2: 80, 3: 80}


def test_fusion_center_ledger_totals():
    fc = run_fusion_center(CFG, EST)
    up = sum(r[2] for r in fc.ledger.rows)
    down = sum(r[3] for r in fc.ledger.rows)
    assert up == 30 * 3 * 21 and down == 30 * 3 * 20
    assert fc.ledger.total == 30 * 3 * (2 * 20 + 1)


def test_threaded_identical():
    a = run_fusion_free(CFG, EST)
    b = run_fusion_free(CFG, EST, threaded=True)
    assert np.array_equal(a.node_trajectories, b.node_trajectories)


def test_single_node():
    cfg = ScenarioConfig(K=10, N=1, density=0.2, horizon=15, seed=6)
    ff = run_fusion_free(cfg, EST)
    assert np.allclose(ff.trajectory, run_centralized(cfg, EST), rtol=0, atol=1e-12)
    assert all(r[4] == 40 for r in ff.ledger.rows)


def test_nonnegative_fusion_free():
    cfg = ScenarioConfig(K=10, N=2, density=0.3, horizon=20, seed=7, nonnegative=True)
    est = EstimatorConfig(nonnegative=True)
    ff = run_fusion_free(cfg, est)
    assert np.all(ff.node_trajectories >= 0)
    assert np.allclose(ff.trajectory, run_centralized(cfg, est), rtol=0, atol=1e-12)


@pytest.mark.parametrize("est", [EstimatorConfig(schedule=RegularizationSchedule(weighted=True)),
                                 EstimatorConfig(stepsize_rule="exact"),
                                 EstimatorConfig(prox=lambda t, s: 1.0)])
def test_fusion_free_rejects_unsupported(est):
    with pytest.raises(ValueError):
        run_fusion_free(CFG, est)


def test_ledger_csv(tmp_path):
    led = SignalingLedger("x")
    led.record(1, 1, 3, 2)
    p = tmp_path / "l.csv"
    led.write_csv(p)
    assert p.read_text().splitlines() == ["t,node,phase1_reals,phase2_reals,total_reals", "1,1,3,2,5"]
