"""Online parallel and distributed recursive estimation of sparse signals."""

from .kernels import BACKEND
from .signal import (RegressionSample, Scenario, ScenarioConfig, SparseSignal,
                     evolve_signal, generate_instance, generate_signal)
from .stats import NodePartialStats, SufficientStats, max_eigenvalue
from .estimator import (EstimatorConfig, EstimatorState, OnlineParallelEstimator,
                        RegularizationSchedule, best_response, effective_regularizer,
                        evaluate_objective, reset_step, soft_threshold, step,
                        stepsize_simplified, weight_factor)
from .baselines import (OracleConfig, SequentialEstimator, exact_linesearch, lasso_oracle,
                        rls_solve, sequential_step)

__version__ = "0.1.0"
