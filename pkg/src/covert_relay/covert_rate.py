"""Covert-link SINRs and closed-form effective covert rates."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from . import kernels
from .errors import DomainError, PowerBudgetExceeded
from .scenario import (
    ChannelDraw,
    DerivedConstants,
    PowerControl,
    RateControl,
    SchemeConfig,
    SystemParams,
    opportunity_probs,
)


@dataclass(frozen=True)
class RateReport:
    """Covert rate summary; gamma_delta and r_delta apply to rate-control
    only, where the SINR is constant across channel realizations."""

    gamma_delta: Optional[float]
    r_delta: Optional[float]
    p_c: float
    r_c: float


def exp_integral(x: float) -> float:
    """Exponential integral Ei(x) on the negative axis.

    Power series with the Euler-Mascheroni constant for small |x|, modified
    Lentz continued fraction beyond the crossover; both sides hold better
    than 1e-13 relative accuracy at the switch.
    """
    if x >= 0.0:
        raise DomainError("exp_integral is defined here for x < 0 only")
    return float(kernels.ei_neg(x))


def covert_sinr(
    scheme: SchemeConfig, params: SystemParams, dc: DerivedConstants, h: ChannelDraw
) -> float:
    """Destination SINR of the covert stream for one channel draw."""
    eta_h = dc.eta * h.h_sr_sq
    s = params.sigma_d_sq
    if isinstance(scheme, RateControl):
        return scheme.q / (dc.mu * (scheme.q + s) / (eta_h + 1.0) + s)
    num = scheme.p_delta * (eta_h + 1.0) * h.h_rd_sq
    den = dc.mu * scheme.p_delta * h.h_rd_sq + (eta_h + dc.mu + 1.0) * s
    return num / den


def effective_rate(
    scheme: SchemeConfig, params: SystemParams, dc: DerivedConstants
) -> RateReport:
    """Effective covert rate: the covert rate averaged over the relay-destination fade.

    Rate-control: the constant per-draw rate times the covert opportunity
    probability. Power-control: the exponential-integral closed form of the
    expectation over the covert region.
    """
    eta_h = dc.eta_h_sr
    if isinstance(scheme, RateControl):
        gamma, r_delta, p_c, r_c = kernels.rc_rate(
            scheme.q, dc.mu, eta_h, params.sigma_d_sq, params.p_r_max
        )
        return RateReport(float(gamma), float(r_delta), float(p_c), float(r_c))
    if (dc.mu + 1.0) * scheme.p_delta >= params.p_r_max:
        raise PowerBudgetExceeded(
            f"(mu+1)*p_delta = {(dc.mu + 1.0) * scheme.p_delta:g} "
            f">= p_r_max = {params.p_r_max:g}"
        )
    _, p_c, _ = opportunity_probs(scheme, params, dc.mu)
    r_c = kernels.rc_power(
        scheme.p_delta, dc.mu, eta_h, params.sigma_d_sq, params.p_r_max
    )
    return RateReport(None, None, float(p_c), float(r_c))
