"""Stochastic oracle: replay the relay policy and warden detector on sampled fades.

Each trial draws the relay-destination gain from the unit-mean exponential
distribution via inverse CDF on a counter-based stream (stream index = trial
number), flips an independent fair coin on a second substream for the covert
hypothesis, evaluates the infinite-blocklength statistic mean, and compares
it against the threshold. Estimates come back with binomial standard errors.

Also hosts the adaptive-quadrature oracle for the power-control rate integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate

from . import kernels
from .detection import optimal_threshold
from .errors import ConvergenceFailure, DegenerateSample, PowerBudgetExceeded
from .scenario import (
    DerivedConstants,
    PowerControl,
    RateControl,
    SchemeConfig,
    SystemParams,
    derived_constants,
)


@dataclass(frozen=True)
class SimConfig:
    n_trials: int
    seed: int
    scheme: SchemeConfig
    tau: Optional[float] = None  # defaults to the warden's optimal threshold

    def __post_init__(self):
        if self.n_trials < 1000:
            raise ValueError("n_trials must be at least 1000")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")


@dataclass(frozen=True)
class EmpiricalReport:
    alpha_hat: float
    beta_hat: float
    xi_hat: float
    p_b_hat: float
    p_c_hat: float
    r_c_hat: float
    omega_hat: float
    std_errs: dict


def _binom_se(p: float, n: int) -> float:
    if n <= 0:
        return math.nan
    return math.sqrt(max(p * (1.0 - p), 0.0) / n)


def _run(params: SystemParams, sim: SimConfig, h_sr_sq: float, h_rs_sq: float):
    dc = derived_constants(params, h_sr_sq)
    scheme = sim.scheme
    tau = sim.tau
    if tau is None:
        tau = optimal_threshold(scheme, params, dc, h_rs_sq).tau_star
    if isinstance(scheme, RateControl):
        is_rate, qp = True, scheme.q
    else:
        is_rate, qp = False, scheme.p_delta
        if (dc.mu + 1.0) * qp >= params.p_r_max:
            raise PowerBudgetExceeded("covert power leaves no forwarding budget")
    eta_h = dc.eta * h_sr_sq
    n_b, n_c, n_act, n_coin1, fa, miss, rc_sum, rc_sq = kernels.mc_trials(
        sim.seed, sim.n_trials, is_rate, dc.mu, dc.phi, qp,
        params.sigma_d_sq, params.sigma_s_sq, params.p_r_max, h_rs_sq, eta_h, tau,
    )
    if n_b < 100:
        raise DegenerateSample(
            f"only {n_b} of {sim.n_trials} draws satisfied the forwarding condition"
        )
    n = sim.n_trials
    n_h0 = n_b - n_coin1
    alpha_hat = fa / n_h0
    beta_hat = miss / n_coin1
    omega_hat = n_act / n_b
    xi_hat = (1.0 - omega_hat) * alpha_hat + omega_hat * beta_hat
    p_b_hat = n_b / n
    p_c_hat = n_c / n
    r_c_hat = rc_sum / n
    se = {
        "alpha_hat": _binom_se(alpha_hat, n_h0),
        "beta_hat": _binom_se(beta_hat, n_coin1),
        "omega_hat": _binom_se(omega_hat, n_b),
        "p_b_hat": _binom_se(p_b_hat, n),
        "p_c_hat": _binom_se(p_c_hat, n),
        "r_c_hat": math.sqrt(max(rc_sq / n - r_c_hat**2, 0.0) / n),
    }
    se["xi_hat"] = math.sqrt(
        ((beta_hat - alpha_hat) * se["omega_hat"]) ** 2
        + ((1.0 - omega_hat) * se["alpha_hat"]) ** 2
        + (omega_hat * se["beta_hat"]) ** 2
    )
    return EmpiricalReport(
        alpha_hat, beta_hat, xi_hat, p_b_hat, p_c_hat, r_c_hat, omega_hat, se
    )


def simulate_detection(
    params: SystemParams,
    sim: SimConfig,
    h_sr_sq: float = 1.0,
    h_rs_sq: Optional[float] = None,
) -> EmpiricalReport:
    """Empirical detector error rates under the scheme's hypothesis model.

    Every forwarding draw carries the fair covert coin; under the covert
    hypothesis the statistic follows the covert-power policy, which is the
    model the closed-form alpha/beta rates describe. omega_hat counts the
    draws where covert transmission is actually possible and chosen.
    """
    if h_rs_sq is None:
        h_rs_sq = h_sr_sq  # channel reciprocity
    return _run(params, sim, h_sr_sq, h_rs_sq)


def simulate_effective_rate(
    params: SystemParams,
    sim: SimConfig,
    h_sr_sq: float = 1.0,
    h_rs_sq: Optional[float] = None,
) -> EmpiricalReport:
    """Empirical effective covert rate (per-draw covert rate over all trials)."""
    if h_rs_sq is None:
        h_rs_sq = h_sr_sq
    return _run(params, sim, h_sr_sq, h_rs_sq)


def quadrature_rate_oracle(
    params: SystemParams, p_delta: float, h_sr_sq: float = 1.0
) -> float:
    """Adaptive quadrature of the power-control rate integral.

    Independent of the exponential-integral closed form: integrates
    ln((beta1 + alpha1 x)/(beta2 + alpha2 x)) e^{-x} on [0, inf) directly.
    """
    dc = derived_constants(params, h_sr_sq)
    mu = dc.mu
    budget = params.p_r_max - (mu + 1.0) * p_delta
    if budget <= 0.0:
        raise PowerBudgetExceeded("covert power leaves no forwarding budget")
    if p_delta == 0.0:
        return 0.0
    g = dc.eta * h_sr_sq + mu + 1.0
    sd = params.sigma_d_sq
    beta1 = g * (params.p_r_max - p_delta) * sd
    beta2 = (g * budget + mu * mu * p_delta) * sd
    alpha1 = p_delta * g * budget
    alpha2 = mu * p_delta * budget

    def integrand(x):
        return math.log((beta1 + alpha1 * x) / (beta2 + alpha2 * x)) * math.exp(-x)

    value, err, info = integrate.quad(
        integrand, 0.0, np.inf, epsabs=1e-12, epsrel=1e-12, limit=200, full_output=True
    )[:3]
    if err > 1e-10:
        raise ConvergenceFailure(f"quadrature error estimate {err:g} above 1e-10")
    prefactor = math.exp(-mu * sd / budget) / math.log(2.0)
    return prefactor * value
