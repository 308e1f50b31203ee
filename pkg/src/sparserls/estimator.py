"""Online parallel estimator for l1-regularized recursive least squares.

At every instance all coordinates move together: each one computes its
best response with the others frozen at the current iterate, a closed-form
stepsize is taken along the joint direction, and the result is discarded in
favour of the origin whenever its loss is positive.
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import kernels
from .stats import max_eigenvalue


class AssumptionViolation(ValueError):
    """Raised when G_kk + c_k drops below the configured floor."""


class InvariantViolation(AssertionError):
    pass


def soft_threshold(a, b):
    """(b - a)^+ - (-b - a)^+, elementwise."""
    return np.maximum(b - a, 0.0) - np.maximum(-b - a, 0.0)


def weight_factor(mu, a, xabs):
    """Piecewise-linear weight: 1 below mu, 0 above a*mu, linear in between."""
    xabs = np.asarray(xabs, dtype=float)
    w = np.clip((a * mu - xabs) / ((a - 1.0) * mu), 0.0, 1.0)
    return w if w.ndim else float(w)


@dataclass
class RegularizationSchedule:
    """mu(t) = scale / t**decay, optionally reweighted per element.

    In weighted mode the gain of element k is ``mu(t) * W(|x_rls_k|)`` with
    W the :func:`weight_factor` of parameter ``a``.
    """

    scale: float = 10.0
    decay: float = 1.0
    weighted: bool = False
    a: float = 2.0

    def __post_init__(self):
        if self.scale <= 0 or self.decay <= 0:
            raise ValueError("scale and decay must be positive")
        if self.weighted and self.a <= 1:
            raise ValueError("weight parameter a must exceed 1")

    def mu(self, t):
        return self.scale / t**self.decay


def effective_regularizer(schedule, t, K, rls_estimate=None):
    """Per-element regularization gains at instance ``t``."""
    mu = schedule.mu(t)
    if not schedule.weighted:
        return np.full(K, mu)
    if rls_estimate is None:
        raise ValueError("weighted schedule needs the current RLS estimate")
    return mu * weight_factor(mu, schedule.a, np.abs(rls_estimate))


@dataclass
class EstimatorConfig:
    schedule: RegularizationSchedule = field(default_factory=RegularizationSchedule)
    # constant, or callable (t, stats) -> per-element weights
    prox: float | Callable = 1e-6
    nonnegative: bool = False
    stepsize_rule: str = "simplified"
    c_floor: float = 1e-8
    rls_ridge: float = 1e-4
    check_invariants: bool = False

    def __post_init__(self):
        if self.stepsize_rule not in ("simplified", "exact"):
            raise ValueError(f"unknown stepsize rule {self.stepsize_rule!r}")

    def prox_weights(self, t, stats):
        c = self.prox(t, stats) if callable(self.prox) else self.prox
        c = np.broadcast_to(np.asarray(c, dtype=float), (stats.K,))
        if np.any(c < 0):
            raise ValueError("proximal weights must be nonnegative")
        return c


@dataclass
class StepRecord:
    t: int
    gamma: float
    step_norm: float
    objective_before: float
    objective_after: float
    reset_taken: bool
    objective_tilde: float = np.nan
    mu: np.ndarray | None = None
    x_hat: np.ndarray | None = None

    CSV_HEADER = ("t", "gamma", "step_norm", "objective_before", "objective_after", "reset_taken")

    def to_row(self):
        return (self.t, self.gamma, self.step_norm, self.objective_before,
                self.objective_after, int(self.reset_taken))


@dataclass
class EstimatorState:
    x: np.ndarray
    t: int = 1
    last: StepRecord | None = None

    @classmethod
    def initial(cls, K):
        return cls(x=np.zeros(K), t=1)


def _gains(mu, K):
    return np.broadcast_to(np.asarray(mu, dtype=float), (K,))


def best_response(stats, x, mu, c, nonnegative=False, c_floor=1e-8):
    """Jacobi best response of every coordinate at the frozen point ``x``."""
    G, b = stats.G, stats.b
    diag = np.diag(G)
    denom = diag + c
    if np.any(denom < c_floor):
        k = int(np.argmin(denom))
        raise AssumptionViolation(
            f"G_kk + c_k = {denom[k]:.3e} < {c_floor:.1e} at k={k}; raise the proximal weights")
    r = b - G @ x + diag * x
    v = r + c * x
    mu = _gains(mu, x.shape[0])
    if nonnegative:
        return np.maximum(v - mu, 0.0) / denom
    return soft_threshold(mu, v) / denom


def stepsize_simplified(stats, x, x_hat, mu, nonnegative=False):
    """Minimizer on [0, 1] of the quadratic upper bound with linearized l1 term.

    Returns 0 when the curvature d'Gd vanishes.
    """
    G, b = stats.G, stats.b
    d = x_hat - x
    den = d @ G @ d
    if not den > 0.0:
        return 0.0
    mu = _gains(mu, x.shape[0])
    if nonnegative:
        num = (G @ x - b + mu) @ d
    else:
        num = (G @ x - b) @ d + mu @ (np.abs(x_hat) - np.abs(x))
    return float(np.clip(-num / den, 0.0, 1.0))


def stepsize_exact(stats, x, x_hat, mu):
    """Exact minimizer of the loss along ``x_hat - x`` on [0, 1]."""
    G, b = stats.G, stats.b
    d = x_hat - x
    if not np.any(d):
        return 0.0
    return kernels.exact_linesearch(d @ G @ d, (G @ x - b) @ d, x, d, _gains(mu, x.shape[0]))


def evaluate_objective(stats, mu, x):
    """0.5 x'Gx - b'x + sum_k mu_k |x_k|."""
    mu = _gains(mu, x.shape[0])
    return float(0.5 * x @ stats.G @ x - stats.b @ x + mu @ np.abs(x))


def reset_step(stats, mu, x_tilde):
    """Keep ``x_tilde`` if its loss is nonpositive, else fall back to the origin.

    Returns ``(x_next, objective_of_x_next, reset_taken)``.
    """
    val = evaluate_objective(stats, mu, x_tilde)
    if val <= 0.0:
        return x_tilde, val, False
    return np.zeros_like(x_tilde), 0.0, True


def step(state, stats, cfg):
    """One instance of the online parallel algorithm; returns the new state."""
    if stats.t != state.t:
        raise ValueError(f"statistics are at instance {stats.t}, estimator at {state.t}")
    t, x = state.t, state.x
    rls = None
    if cfg.schedule.weighted:
        from .baselines import rls_solve
        rls = rls_solve(stats, cfg.rls_ridge)
    mu = effective_regularizer(cfg.schedule, t, stats.K, rls)
    c = cfg.prox_weights(t, stats)

    x_hat = best_response(stats, x, mu, c, cfg.nonnegative, cfg.c_floor)
    if cfg.stepsize_rule == "exact":
        gamma = stepsize_exact(stats, x, x_hat, mu)
    else:
        gamma = stepsize_simplified(stats, x, x_hat, mu, cfg.nonnegative)
    d = x_hat - x
    x_tilde = x + gamma * d
    before = evaluate_objective(stats, mu, x)
    x_next, after, reset = reset_step(stats, mu, x_tilde)
    tilde = after if not reset else evaluate_objective(stats, mu, x_tilde)

    if cfg.check_invariants:
        _check_step(stats, x, x_hat, x_next, mu, c, gamma, before, tilde, after, cfg)

    rec = StepRecord(t=t, gamma=gamma, step_norm=float(np.linalg.norm(d)),
                     objective_before=before, objective_after=after,
                     reset_taken=reset, objective_tilde=tilde, mu=mu, x_hat=x_hat)
    return EstimatorState(x=x_next, t=t + 1, last=rec)


def descent_bound(stats, x, x_hat, c, gamma):
    """Right-hand side of the guaranteed decrease for stepsize ``gamma``."""
    c_min = float(np.min(np.diag(stats.G) + c))
    lam = max_eigenvalue(stats.G)
    d = x_hat - x
    return -gamma * (c_min - 0.5 * lam * gamma) * float(d @ d)


def _check_step(stats, x, x_hat, x_next, mu, c, gamma, before, tilde, after, cfg, slack=1e-9):
    bound = descent_bound(stats, x, x_hat, c, gamma)
    if tilde - before > bound + slack:
        raise InvariantViolation(
            f"t={stats.t}: descent violated, change {tilde - before:.3e} > bound {bound:.3e}")
    if after > 0.0:
        raise InvariantViolation(f"t={stats.t}: loss after reset is {after:.3e} > 0")
    if cfg.nonnegative:
        if np.any(x_next < 0):
            raise InvariantViolation(f"t={stats.t}: negative entry in nonnegative mode")
        g1 = stepsize_simplified(stats, x, x_hat, mu, nonnegative=False)
        g2 = stepsize_simplified(stats, x, x_hat, mu, nonnegative=True)
        if abs(g1 - g2) > 1e-12:
            raise InvariantViolation(f"t={stats.t}: stepsize formulas disagree ({g1!r} vs {g2!r})")


class OnlineParallelEstimator:
    """Stateful wrapper: feed one instance's statistics per call to :meth:`step`.

    ``history`` keeps every :class:`StepRecord` when ``keep_history`` is set;
    otherwise only the most recent one is available as ``last``.
    """

    def __init__(self, K, config=None, keep_history=False):
        self.config = config or EstimatorConfig()
        self.state = EstimatorState.initial(K)
        self.history = [] if keep_history else None

    @property
    def x(self):
        return self.state.x

    @property
    def t(self):
        return self.state.t

    @property
    def last(self):
        return self.state.last

    def step(self, stats):
        self.state = step(self.state, stats, self.config)
        if self.history is not None:
            self.history.append(self.state.last)
        return self.state.x

    def write_history(self, path):
        import csv
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(StepRecord.CSV_HEADER)
            for rec in self.history or ():
                w.writerow(rec.to_row())
