"""Experiment presets, metrics and the CSV dataset writer.

Every run produces long-format rows ``(t, algorithm, run, metric_name, value)``.
Online algorithms are scored with the iterate x^(t) they hold when instance
t arrives, against the instance-t loss, truth and oracle. Run ``r`` uses
scenario seed ``seed + r``.
"""

from dataclasses import dataclass, field, replace
import csv
import logging
import math

import numpy as np

from .baselines import OracleConfig, lasso_oracle, rls_solve, sequential_step
from .estimator import (EstimatorConfig, EstimatorState, RegularizationSchedule,
                        evaluate_objective, step, stepsize_exact, weight_factor)
from .signal import Scenario, ScenarioConfig
from .stats import SufficientStats

log = logging.getLogger(__name__)

ALGORITHMS = ("parallel", "parallel_exact_ls", "sequential", "rls", "lasso_oracle")
METRICS = ("objective_error", "square_error", "stepsize_error", "weight_factor", "signal")

_BASE = dict(K=100, N=1, density=0.1, noise_variance=0.2)

# parameter blocks of the reference experiments; horizon/runs are desk-scale
PRESETS = {
    "fig1_objective_error": dict(
        scenario=dict(_BASE, horizon=1000), schedule=dict(scale=10.0, decay=1.0),
        algorithms=("parallel", "parallel_exact_ls", "sequential"),
        metrics=("objective_error",)),
    "fig2_square_error": dict(
        scenario=dict(_BASE, horizon=1000), schedule=dict(scale=10.0, decay=1.0),
        algorithms=("parallel", "sequential", "lasso_oracle", "rls"),
        metrics=("square_error",)),
    "fig3_signal_recovery": dict(
        scenario=dict(_BASE, horizon=1000), schedule=dict(scale=10.0, decay=1.0),
        algorithms=("parallel",), metrics=("signal",)),
    "fig4_stepsize_error": dict(
        scenario=dict(_BASE, horizon=1000), schedule=dict(scale=10.0, decay=1.0),
        algorithms=("parallel",), metrics=("stepsize_error",)),
    "fig5_weight_factor": dict(
        scenario=dict(_BASE, horizon=2000, leading_support=True),
        schedule=dict(scale=1.0, decay=0.4, weighted=True, a=2.0),
        algorithms=("parallel",), metrics=("weight_factor",)),
    "fig6_time_varying": dict(
        scenario=dict(_BASE, horizon=2000, alpha=0.99), schedule=dict(scale=10.0, decay=1.0),
        beta=0.9, algorithms=("parallel", "sequential", "lasso_oracle"),
        metrics=("square_error",)),
}

PAPER_RUNS = 100
DESK_RUNS = 20


class MetricUndefined(ValueError):
    pass


@dataclass
class ExperimentSpec:
    preset: str = "custom"
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    schedule: RegularizationSchedule = field(default_factory=RegularizationSchedule)
    algorithms: tuple = ("parallel",)
    metrics: tuple = ("square_error",)
    runs: int = DESK_RUNS
    beta: float = 1.0
    prox: float = 1e-6
    oracle: OracleConfig = field(default_factory=OracleConfig)
    output_path: str | None = None

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        bad = set(self.algorithms) - set(ALGORITHMS)
        if bad:
            raise ValueError(f"unknown algorithms {sorted(bad)}")
        bad = set(self.metrics) - set(METRICS)
        if bad:
            raise ValueError(f"unknown metrics {sorted(bad)}")
        if "weight_factor" in self.metrics and not self.schedule.weighted:
            raise ValueError("weight_factor metric needs the weighted schedule")
        if "stepsize_error" in self.metrics and "parallel" not in self.algorithms:
            raise ValueError("stepsize_error needs the parallel algorithm")
        if self.preset == "fig5_weight_factor" and not self.schedule.weighted:
            raise ValueError("fig5_weight_factor runs with the weighted schedule only")

    @classmethod
    def from_preset(cls, name, **overrides):
        """Spec for a named preset; ``overrides`` may hold scenario fields too."""
        if name not in PRESETS:
            raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
        p = PRESETS[name]
        scen_keys = set(ScenarioConfig.__dataclass_fields__)
        scen = dict(p["scenario"])
        scen.update({k: v for k, v in overrides.items() if k in scen_keys and v is not None})
        sched = dict(p["schedule"])
        sched.update(overrides.pop("schedule", None) or {})
        kwargs = dict(preset=name, scenario=ScenarioConfig(**scen),
                      schedule=RegularizationSchedule(**sched),
                      algorithms=tuple(p["algorithms"]), metrics=tuple(p["metrics"]),
                      beta=p.get("beta", 1.0))
        kwargs.update({k: v for k, v in overrides.items() if k not in scen_keys and v is not None})
        return cls(**kwargs)


@dataclass
class ExperimentResult:
    rows: list
    skipped: dict = field(default_factory=dict)

    def curves(self, metric, algorithm):
        """Array (runs, T) of one metric; NaN where a row was skipped."""
        sel = [(r[0], r[2], r[4]) for r in self.rows if r[3] == metric and r[1] == algorithm]
        if not sel:
            return np.empty((0, 0))
        T = max(s[0] for s in sel)
        R = max(s[1] for s in sel) + 1
        out = np.full((R, T), np.nan)
        for t, run, v in sel:
            out[run, t - 1] = v
        return out

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("t", "algorithm", "run", "metric_name", "value"))
            for t, alg, run, name, v in self.rows:
                w.writerow((t, alg, run, name, repr(float(v))))


def metric_relative_objective_error(x, stats, mu, oracle_x, signed=False):
    """|L(x) - L(opt)| / |L(opt)|, or the raw signed ratio when ``signed``."""
    opt = evaluate_objective(stats, mu, oracle_x)
    if abs(opt) <= 1e-14:
        raise MetricUndefined("oracle objective is zero")
    cur = evaluate_objective(stats, mu, x)
    if signed:
        return (cur - opt) / opt
    return abs(cur - opt) / abs(opt)


def metric_relative_square_error(x, x_true):
    den = float(x_true @ x_true)
    if den == 0.0:
        raise MetricUndefined("true signal is zero")
    diff = x - x_true
    return float(diff @ diff) / den


def metric_stepsize_error(gamma_simplified, gamma_optimal):
    """Signed percentage deviation of the simplified stepsize from the optimal one."""
    if gamma_optimal == 0.0:
        raise MetricUndefined("optimal stepsize is zero")
    return (gamma_simplified - gamma_optimal) / gamma_optimal * 100.0


def run_single(spec, run):
    """Rows and skip counts of one Monte-Carlo repetition."""
    cfg = replace(spec.scenario, seed=spec.scenario.seed + run)
    K, T = cfg.K, cfg.horizon
    algs, metrics = spec.algorithms, spec.metrics
    sched = spec.schedule
    est = {
        "parallel": EstimatorConfig(schedule=sched, prox=spec.prox, nonnegative=cfg.nonnegative),
        "parallel_exact_ls": EstimatorConfig(schedule=sched, prox=spec.prox,
                                             nonnegative=cfg.nonnegative, stepsize_rule="exact"),
    }
    states = {a: EstimatorState.initial(K) for a in algs if a in ("parallel", "parallel_exact_ls", "sequential")}
    need_oracle = "lasso_oracle" in algs or "objective_error" in metrics
    need_rls = "rls" in algs or "weight_factor" in metrics or sched.weighted
    stats = SufficientStats(K, spec.beta)
    rows, skipped = [], {}
    x_lasso = np.zeros(K)

    def emit(t, alg, name, fn):
        try:
            rows.append((t, alg, run, name, fn()))
        except MetricUndefined:
            skipped[name] = skipped.get(name, 0) + 1

    for t, truth, samples in Scenario(cfg):
        stats.update(samples)
        x_rls = rls_solve(stats, spec.oracle.ridge_eps_numerator) if need_rls else None
        mu = sched.mu(t) if not sched.weighted else sched.mu(t) * weight_factor(
            sched.mu(t), sched.a, np.abs(x_rls))
        mu = np.broadcast_to(np.asarray(mu, dtype=float), (K,))
        if need_oracle:
            x_lasso = lasso_oracle(stats, mu, spec.oracle, warm_start=x_lasso)

        current = {a: s.x for a, s in states.items()}
        if "lasso_oracle" in algs:
            current["lasso_oracle"] = x_lasso
        if "rls" in algs:
            current["rls"] = x_rls

        for alg in algs:
            x = current[alg]
            if "objective_error" in metrics:
                emit(t, alg, "objective_error",
                     lambda: metric_relative_objective_error(x, stats, mu, x_lasso))
                emit(t, alg, "objective_error_signed",
                     lambda: metric_relative_objective_error(x, stats, mu, x_lasso, signed=True))
            if "square_error" in metrics:
                emit(t, alg, "square_error", lambda: metric_relative_square_error(x, truth.values))
            if "signal" in metrics and t == T:
                for k in range(K):
                    rows.append((t, alg, run, f"x[{k}]", float(x[k])))

        if "signal" in metrics and t == T:
            for k in range(K):
                rows.append((t, "truth", run, f"x[{k}]", float(truth.values[k])))
        if "weight_factor" in metrics:
            w = weight_factor(sched.mu(t), sched.a, np.abs(x_rls))
            for k in range(K):
                rows.append((t, "rls", run, f"weight_factor[{k}]", float(w[k])))

        for alg, s in states.items():
            x_prev = s.x
            if alg == "sequential":
                states[alg] = sequential_step(s, stats, mu)
                continue
            states[alg] = new = step(s, stats, est[alg])
            if "stepsize_error" in metrics and alg == "parallel":
                rec = new.last
                g_opt = stepsize_exact(stats, x_prev, rec.x_hat, rec.mu)
                emit(t, alg, "stepsize_error", lambda: metric_stepsize_error(rec.gamma, g_opt))
    return rows, skipped


def run_experiment(spec):
    """Run all repetitions; writes the CSV when ``spec.output_path`` is set."""
    rows, skipped = [], {}
    for run in range(spec.runs):
        r, s = run_single(spec, run)
        rows.extend(r)
        for k, v in s.items():
            skipped[k] = skipped.get(k, 0) + v
    if skipped:
        log.warning("metric rows skipped as undefined: %s", skipped)
    result = ExperimentResult(rows=rows, skipped=skipped)
    if spec.output_path:
        result.write_csv(spec.output_path)
    return result


def first_passage(curve, threshold):
    """First t (1-based) with curve[t-1] < threshold, or ``math.inf``."""
    hit = np.flatnonzero(np.asarray(curve) < threshold)
    return int(hit[0]) + 1 if hit.size else math.inf
