"""Reference solvers the online estimator is compared against."""

from dataclasses import dataclass
import warnings

import numpy as np

from . import kernels
from .estimator import (AssumptionViolation, EstimatorState, StepRecord,
                        evaluate_objective, soft_threshold, stepsize_exact, _gains)


class OracleNotConverged(RuntimeWarning):
    pass


@dataclass
class OracleConfig:
    objective_tol: float = 1e-12
    max_sweeps: int = 100_000
    ridge_eps_numerator: float = 1e-4

    def __post_init__(self):
        if self.objective_tol <= 0 or self.max_sweeps < 1:
            raise ValueError("objective_tol must be > 0 and max_sweeps >= 1")


def sequential_step(state, stats, mu, c_floor=1e-8):
    """Online coordinate descent: minimize the loss in one cyclically chosen coordinate."""
    if stats.t != state.t:
        raise ValueError(f"statistics are at instance {stats.t}, estimator at {state.t}")
    t, x = state.t, state.x
    K = x.shape[0]
    k = (t - 1) % K
    G, b = stats.G, stats.b
    gkk = G[k, k]
    if gkk < c_floor:
        raise AssumptionViolation(f"G_kk = {gkk:.3e} < {c_floor:.1e} at k={k}")
    mu = _gains(mu, K)
    before = evaluate_objective(stats, mu, x)
    r = b[k] - G[k] @ x + gkk * x[k]
    new = x.copy()
    new[k] = soft_threshold(mu[k], r) / gkk
    after = evaluate_objective(stats, mu, new)
    rec = StepRecord(t=t, gamma=1.0, step_norm=abs(new[k] - x[k]), objective_before=before,
                     objective_after=after, reset_taken=False, objective_tilde=after, mu=mu)
    return EstimatorState(x=new, t=t + 1, last=rec)


def rls_solve(stats, ridge=1e-4):
    """Minimizer of 0.5 x'Gx - b'x.

    Uses the pseudo-inverse when G is well conditioned, otherwise solves
    (G + (ridge/t) I) x = b.
    """
    G, b = stats.G, stats.b
    w = np.linalg.eigvalsh(G)
    lam_max = w[-1]
    if lam_max <= 0.0:
        return np.zeros_like(b)
    if w[0] < 1e-10 * lam_max:
        eps = ridge / max(stats.t, 1)
        return np.linalg.solve(G + eps * np.eye(G.shape[0]), b)
    return np.linalg.pinv(G, hermitian=True) @ b


def lasso_oracle(stats, mu, cfg=None, warm_start=None):
    """High-precision minimizer of the l1-regularized loss by cyclic coordinate descent.

    Emits :class:`OracleNotConverged` if ``max_sweeps`` is reached; the best
    iterate found is still returned.
    """
    cfg = cfg or OracleConfig()
    K = stats.K
    mu = _gains(mu, K)
    if np.any(mu < 0):
        raise ValueError("regularization gains must be nonnegative")
    x0 = np.zeros(K) if warm_start is None else warm_start
    x, sweeps, converged, obj = kernels.cd_lasso(stats.G, stats.b, mu, x0,
                                                 cfg.objective_tol, cfg.max_sweeps)
    if not converged:
        warnings.warn(f"lasso oracle stopped after {sweeps} sweeps without meeting tolerance",
                      OracleNotConverged, stacklevel=2)
    return x


def exact_linesearch(stats, x, x_hat, mu):
    """Exact minimizer on [0, 1] of the loss change along ``x_hat - x``.

    The l1 term is piecewise linear in the stepsize, so the restriction is a
    convex piecewise quadratic; segments are scanned in order of their
    breakpoints and the first zero of the derivative is returned.
    """
    return stepsize_exact(stats, x, x_hat, mu)


def line_objective(stats, x, x_hat, mu, gamma):
    """Loss change L(x + gamma*d) - L(x), evaluated directly."""
    mu = _gains(mu, x.shape[0])
    return evaluate_objective(stats, mu, x + gamma * (x_hat - x)) - evaluate_objective(stats, mu, x)


class SequentialEstimator:
    """Stateful wrapper around :func:`sequential_step`."""

    def __init__(self, K, schedule, c_floor=1e-8):
        self.schedule = schedule
        self.c_floor = c_floor
        self.state = EstimatorState.initial(K)

    @property
    def x(self):
        return self.state.x

    def step(self, stats):
        self.state = sequential_step(self.state, stats, self.schedule.mu(self.state.t), self.c_floor)
        return self.state.x
