"""Covert communication analysis for greedy amplify-and-forward relays.

Closed-form warden detection limits and effective covert rates for the
rate-control and power-control covert transmission schemes, a Monte Carlo
cross-validation oracle, covert-constrained rate maximization, and a CLI for
scenario sweeps.
"""

from .covert_rate import RateReport, covert_sinr, effective_rate, exp_integral
from .detection import (
    DetectionReport,
    Hypothesis,
    ThresholdBreakpoints,
    breakpoints,
    covert_power_bound,
    detection_error_prob,
    error_rates,
    optimal_threshold,
    statistic_mean,
)
from .errors import (
    ConditionBViolated,
    ConvergenceFailure,
    CovertRelayError,
    DegenerateSample,
    DomainError,
    InfeasibleRate,
    PowerBudgetExceeded,
)
from .kernels import BACKEND, NUMBA_ENABLED
from .montecarlo import (
    EmpiricalReport,
    SimConfig,
    quadrature_rate_oracle,
    simulate_detection,
    simulate_effective_rate,
)
from .optimizer import asymptotics, maximize_power_control, maximize_rate_control
from .scenario import (
    ChannelDraw,
    DerivedConstants,
    PowerControl,
    RateControl,
    SchemeConfig,
    SystemParams,
    compute_mu,
    derived_constants,
    opportunity_probs,
    relay_forward_power,
    relay_power_under_alt,
)

__version__ = "0.1.0"
