"""Warden-side radiometer analysis.

The warden observes the per-symbol average energy of its received signal; in
the infinite-blocklength limit the test statistic collapses to its mean, and
the false-alarm and miss-detection rates become piecewise closed forms in the
threshold tau. This module evaluates those closed forms, the total detection
error probability, and the threshold that minimizes it for both covert
transmission schemes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from . import kernels
from .errors import ConditionBViolated, PowerBudgetExceeded
from .scenario import (
    ChannelDraw,
    DerivedConstants,
    PowerControl,
    RateControl,
    SchemeConfig,
    SystemParams,
    covert_thresholds,
    relay_forward_power,
    relay_power_under_alt,
    opportunity_probs,
)


class Hypothesis(Enum):
    H0 = "h0"
    H1 = "h1"


@dataclass(frozen=True)
class ThresholdBreakpoints:
    """Knots of the piecewise error-rate curves (statistic units).

    rho1/rho2 bound the rate-control branches, rho1/rho3/rho4 the
    power-control ones; fields not used by a scheme are NaN.
    """

    rho1: float
    rho2: float
    rho3: float
    rho4: float
    sigma_s_sq: float


@dataclass(frozen=True)
class DetectionReport:
    tau_star: float
    alpha: float
    beta: float
    xi_star: float
    omega: float
    scheme: SchemeConfig


def breakpoints(
    scheme: SchemeConfig, params: SystemParams, dc: DerivedConstants, h_rs_sq: float
) -> ThresholdBreakpoints:
    s = params.sigma_s_sq
    pm = dc.phi * dc.mu
    rho1 = params.p_r_max * h_rs_sq * dc.phi + s
    if isinstance(scheme, RateControl):
        if dc.mu * params.sigma_d_sq > 0.0:
            rho2 = (
                params.p_r_max
                * h_rs_sq
                * (dc.phi + (pm + 1.0) * scheme.q / (dc.mu * params.sigma_d_sq))
                + s
            )
        else:
            rho2 = math.inf
        return ThresholdBreakpoints(rho1, rho2, math.nan, math.nan, s)
    rho3 = (pm + 1.0) * scheme.p_delta * h_rs_sq + s
    rho4 = (params.p_r_max * dc.phi + (pm + 1.0) * scheme.p_delta) * h_rs_sq + s
    return ThresholdBreakpoints(rho1, math.nan, rho3, rho4, s)


def statistic_mean(
    params: SystemParams,
    dc: DerivedConstants,
    h: ChannelDraw,
    scheme: SchemeConfig,
    hypothesis: Hypothesis,
) -> float:
    """Infinite-blocklength mean of the warden's energy statistic."""
    t_b = dc.mu * params.sigma_d_sq / params.p_r_max
    if h.h_rd_sq < t_b:
        raise ConditionBViolated(
            f"h_rd_sq = {h.h_rd_sq:g} below the forwarding threshold {t_b:g}"
        )
    if hypothesis is Hypothesis.H0:
        p_r0 = relay_forward_power(params, dc.mu, h.h_rd_sq)
        return p_r0 * h.h_rs_sq * dc.phi + params.sigma_s_sq
    p_r1, p_delta_eff, _ = relay_power_under_alt(scheme, params, dc.mu, h.h_rd_sq)
    return p_r1 * h.h_rs_sq * dc.phi + p_delta_eff * h.h_rs_sq + params.sigma_s_sq


def _rate_coeffs(scheme: RateControl, params: SystemParams, dc: DerivedConstants,
                 h_rs_sq: float):
    b = dc.mu * params.sigma_d_sq / params.p_r_max
    c1 = dc.phi * dc.mu * params.sigma_d_sq * h_rs_sq
    c2 = c1 + (dc.phi * dc.mu + 1.0) * scheme.q * h_rs_sq
    return b, c1, c2


def error_rates(
    scheme: SchemeConfig,
    params: SystemParams,
    dc: DerivedConstants,
    h_rs_sq: float,
    tau: float,
) -> tuple[float, float]:
    """False alarm and miss detection rates at threshold tau, given forwarding."""
    bp = breakpoints(scheme, params, dc, h_rs_sq)
    if isinstance(scheme, RateControl):
        b, c1, c2 = _rate_coeffs(scheme, params, dc, h_rs_sq)
        alpha = kernels.rate_alpha(tau, bp.sigma_s_sq, bp.rho1, b, c1)
        beta = kernels.rate_beta(tau, bp.sigma_s_sq, bp.rho2, b, c2)
        return alpha, beta
    # the power-control thresholds must exist for the miss rate to be defined
    covert_thresholds(scheme, params, dc.mu)
    b = dc.mu * params.sigma_d_sq / params.p_r_max
    c1 = dc.phi * dc.mu * params.sigma_d_sq * h_rs_sq
    alpha = kernels.rate_alpha(tau, bp.sigma_s_sq, bp.rho1, b, c1)
    beta = kernels.power_beta(tau, bp.rho3, bp.rho4, b, c1)
    return alpha, beta


def detection_error_prob(
    scheme: SchemeConfig,
    params: SystemParams,
    dc: DerivedConstants,
    h_rs_sq: float,
    tau: float,
) -> float:
    """xi(tau) = (1-omega) alpha + omega beta for the configured scheme."""
    _, _, omega = opportunity_probs(scheme, params, dc.mu)
    alpha, beta = error_rates(scheme, params, dc, h_rs_sq, tau)
    return (1.0 - omega) * alpha + omega * beta


def covert_power_bound(params: SystemParams, dc: DerivedConstants) -> float:
    """Largest covert power the warden cannot detect with certainty."""
    return dc.phi * params.p_r_max / (dc.phi * dc.mu + 1.0)


def optimal_threshold(
    scheme: SchemeConfig,
    params: SystemParams,
    dc: DerivedConstants,
    h_rs_sq: float,
) -> DetectionReport:
    """Warden's best threshold and the resulting minimum detection error.

    Rate-control uses the closed-form interior stationary point clipped to
    rho1. Power-control runs a coarse-grid-seeded golden-section search on
    [rho3, rho1]; covert power above the certainty bound yields xi_star = 0
    with any threshold in the dead zone between rho1 and rho3.
    """
    if isinstance(scheme, RateControl):
        tau, xi, alpha, beta, omega = kernels.rate_detector_optimum(
            dc.mu, dc.phi, scheme.q, params.sigma_d_sq, params.sigma_s_sq,
            params.p_r_max, h_rs_sq,
        )
        return DetectionReport(tau, alpha, beta, xi, omega, scheme)
    if (dc.mu + 1.0) * scheme.p_delta >= params.p_r_max:
        raise PowerBudgetExceeded(
            f"(mu+1)*p_delta = {(dc.mu + 1.0) * scheme.p_delta:g} "
            f">= p_r_max = {params.p_r_max:g}"
        )
    tau, xi, alpha, beta, omega = kernels.power_threshold_search(
        dc.mu, dc.phi, scheme.p_delta, params.sigma_d_sq, params.sigma_s_sq,
        params.p_r_max, h_rs_sq,
    )
    return DetectionReport(tau, alpha, beta, xi, omega, scheme)
