"""Round-based simulation of the fusion-center and fusion-free architectures.

Inter-sensor sums are modelled as exact reductions performed in a fixed node
order, so every run is bitwise reproducible. What is simulated faithfully is
who holds which data and how many reals cross the network per instance.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
import csv

import numpy as np

from .estimator import AssumptionViolation, EstimatorState, soft_threshold, step as estimator_step
from .signal import Scenario
from .stats import NodePartialStats, SufficientStats


class NodeDisagreement(RuntimeError):
    """Nodes ended a round with different iterates."""


@dataclass(frozen=True, eq=False)
class NodeMessage:
    phase: int
    sensor_id: int
    payload: np.ndarray

    @property
    def n_reals(self):
        return int(self.payload.size)


@dataclass
class SignalingLedger:
    """Reals sent per node per instance.

    In fusion-center mode phase 1 is the uplink sample (K+1 reals) and phase 2
    the broadcast estimate (K reals).
    """

    mode: str
    rows: list = field(default_factory=list)

    CSV_HEADER = ("t", "node", "phase1_reals", "phase2_reals", "total_reals")

    def record(self, t, node, phase1, phase2):
        self.rows.append((t, node, phase1, phase2, phase1 + phase2))

    def per_node(self, t):
        return {r[1]: r[4] for r in self.rows if r[0] == t}

    def instance_total(self, t):
        return sum(r[4] for r in self.rows if r[0] == t)

    @property
    def total(self):
        return sum(r[4] for r in self.rows)

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(self.CSV_HEADER)
            w.writerows(self.rows)


class SensorNode:
    """A sensor holding only its own partial statistics and a replica of the iterate."""

    def __init__(self, sensor_id, K, beta=1.0):
        self.sensor_id = sensor_id
        self._stats = NodePartialStats(sensor_id, K, beta)
        self.x = np.zeros(K)

    def ingest(self, samples):
        self._stats.update(s for s in samples if s.sensor_id == self.sensor_id)

    def phase1(self):
        G, b = self._stats.G, self._stats.b
        return NodeMessage(1, self.sensor_id, np.concatenate([np.diag(G), G @ self.x - b]))

    def phase2(self, x_hat):
        G = self._stats.G
        return NodeMessage(2, self.sensor_id, np.concatenate([G @ self.x, G @ x_hat]))

    def best_response(self, agg1, mu, c, nonnegative, c_floor=1e-8):
        K = self.x.shape[0]
        diag, grad = agg1[:K], agg1[K:]
        if np.any(diag + c < c_floor):
            raise AssumptionViolation(f"node {self.sensor_id}: G_kk + c_k below {c_floor:.1e}")
        # r_k = b_k - sum_{j != k} G_kj x_j
        v = diag * self.x - grad + c * self.x
        if nonnegative:
            return np.maximum(v - mu, 0.0) / (diag + c)
        return soft_threshold(mu, v) / (diag + c)

    def finish(self, agg1, agg2, x_hat, mu, nonnegative):
        """Stepsize, tentative point and reset from the two aggregates.

        Returns the reconstructed loss of the tentative point.
        """
        K = self.x.shape[0]
        x = self.x
        grad = agg1[K:]
        Gx, Gxh = agg2[:K], agg2[K:]
        d = x_hat - x
        Gd = Gxh - Gx
        den = d @ Gd
        if not den > 0.0:
            gamma = 0.0
        else:
            if nonnegative:
                num = (grad + mu) @ d
            else:
                num = grad @ d + mu @ (np.abs(x_hat) - np.abs(x))
            gamma = float(np.clip(-num / den, 0.0, 1.0))
        x_tilde = x + gamma * d
        loss = 0.5 * x_tilde @ (2.0 * grad - Gx + gamma * Gd) + mu @ np.abs(x_tilde)
        self.x = x_tilde if loss <= 0.0 else np.zeros(K)
        return float(loss), gamma


def _reduce(messages):
    # fixed node order keeps floating point sums deterministic
    out = np.zeros_like(messages[0].payload)
    for m in sorted(messages, key=lambda m: m.sensor_id):
        out = out + m.payload
    return out


@dataclass
class DistributedRun:
    trajectory: np.ndarray          # (T+1, K), row t-1 holds x^(t)
    ledger: SignalingLedger
    node_trajectories: np.ndarray | None = None   # (N, T+1, K)
    reconstructed_loss: list = field(default_factory=list)
    gammas: list = field(default_factory=list)


def _scalar_prox(cfg):
    if callable(cfg.prox):
        raise ValueError("distributed runs need a constant proximal weight")
    return float(cfg.prox)


def run_centralized(scenario_cfg, est_cfg, T=None, beta=1.0):
    """Single-process reference run; returns the (T+1, K) trajectory."""
    T = T or scenario_cfg.horizon
    scenario_cfg = replace(scenario_cfg, horizon=T)
    stats = SufficientStats(scenario_cfg.K, beta)
    state = EstimatorState.initial(scenario_cfg.K)
    traj = [state.x]
    for t, _, samples in Scenario(scenario_cfg):
        stats.update(samples)
        state = estimator_step(state, stats, est_cfg)
        traj.append(state.x)
    return np.array(traj)


def run_fusion_center(scenario_cfg, est_cfg, T=None, beta=1.0):
    """All samples go to a fusion center that runs the estimator and broadcasts x."""
    T = T or scenario_cfg.horizon
    scenario_cfg = replace(scenario_cfg, horizon=T)
    K, N = scenario_cfg.K, scenario_cfg.N
    ledger = SignalingLedger("fusion_center")
    stats = SufficientStats(K, beta)
    state = EstimatorState.initial(K)
    traj = [state.x]
    gammas = []
    for t, _, samples in Scenario(scenario_cfg):
        stats.update(samples)
        state = estimator_step(state, stats, est_cfg)
        traj.append(state.x)
        gammas.append(state.last.gamma)
        for s in samples:
            ledger.record(t, s.sensor_id, s.g.size + 1, state.x.size)
    return DistributedRun(trajectory=np.array(traj), ledger=ledger, gammas=gammas)


def run_fusion_free(scenario_cfg, est_cfg, T=None, beta=1.0, threaded=False):
    """Every sensor computes the update itself from two rounds of aggregate exchange."""
    if est_cfg.schedule.weighted:
        raise ValueError("the weighted schedule needs the global RLS estimate; use a fusion center")
    if est_cfg.stepsize_rule != "simplified":
        raise ValueError("fusion-free runs support the simplified stepsize only")
    T = T or scenario_cfg.horizon
    scenario_cfg = replace(scenario_cfg, horizon=T)
    K, N = scenario_cfg.K, scenario_cfg.N
    c = np.full(K, _scalar_prox(est_cfg))
    nodes = [SensorNode(n, K, beta) for n in range(1, N + 1)]
    ledger = SignalingLedger("fusion_free")
    node_traj = [[n.x.copy()] for n in nodes]
    losses, gammas = [], []
    pool = ThreadPoolExecutor(max_workers=N) if threaded else None
    run = pool.map if pool else map

    try:
        for t, _, samples in Scenario(scenario_cfg):
            list(run(lambda n: n.ingest(samples), nodes))
            mu = np.full(K, est_cfg.schedule.mu(t))

            msg1 = list(run(SensorNode.phase1, nodes))
            agg1 = _reduce(msg1)
            x_hats = list(run(lambda n: n.best_response(agg1, mu, c, est_cfg.nonnegative,
                                                         est_cfg.c_floor), nodes))
            msg2 = list(run(SensorNode.phase2, nodes, x_hats))
            agg2 = _reduce(msg2)
            out = list(run(lambda p: p[0].finish(agg1, agg2, p[1], mu, est_cfg.nonnegative),
                           zip(nodes, x_hats)))

            for node, m1, m2 in zip(nodes, msg1, msg2):
                ledger.record(t, node.sensor_id, m1.n_reals, m2.n_reals)
            ref = nodes[0].x
            for node in nodes[1:]:
                if not np.array_equal(node.x, ref):
                    raise NodeDisagreement(f"t={t}: node {node.sensor_id} diverged from node 1")
            for tr, node in zip(node_traj, nodes):
                tr.append(node.x.copy())
            losses.append(out[0][0])
            gammas.append(out[0][1])
    finally:
        if pool:
            pool.shutdown()

    node_traj = np.array(node_traj)
    return DistributedRun(trajectory=node_traj[0], ledger=ledger, node_trajectories=node_traj,
                          reconstructed_loss=losses, gammas=gammas)
