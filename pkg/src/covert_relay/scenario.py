"""Scenario quantities: parameters, channel draws, relay power policies.

Everything here is in linear units relative to a unit noise floor; dB enters
only at the CLI boundary. Channel gains are squared magnitudes of Rayleigh
fading coefficients, so they are unit-mean exponential when sampled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .errors import InfeasibleRate, PowerBudgetExceeded


@dataclass(frozen=True)
class SystemParams:
    """Static scenario quantities, all linear.

    p_s: source transmit power; p_r_max: relay maximum total transmit power;
    sigma_r_sq / sigma_d_sq / sigma_s_sq: relay, destination and source noise
    variances; r_sd: source-to-destination rate in bits per channel use;
    epsilon: covertness slack in [0, 1].
    """

    p_s: float
    p_r_max: float
    sigma_r_sq: float
    sigma_d_sq: float
    sigma_s_sq: float
    r_sd: float
    epsilon: float

    def __post_init__(self):
        for name in ("p_s", "p_r_max", "sigma_r_sq", "sigma_d_sq", "sigma_s_sq"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be strictly positive")
        if self.r_sd < 0.0:
            raise ValueError("r_sd must be nonnegative")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")


@dataclass(frozen=True)
class ChannelDraw:
    """One realization of the squared channel gains."""

    h_sr_sq: float
    h_rd_sq: float
    h_rs_sq: float

    def __post_init__(self):
        for name in ("h_sr_sq", "h_rd_sq", "h_rs_sq"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be nonnegative")

    @classmethod
    def reciprocal(cls, h_sr_sq: float, h_rd_sq: float) -> "ChannelDraw":
        """Draw with the relay-source gain tied to the source-relay gain."""
        return cls(h_sr_sq=h_sr_sq, h_rd_sq=h_rd_sq, h_rs_sq=h_sr_sq)


@dataclass(frozen=True)
class RateControl:
    """Fixed received covert power product Q = P_delta * |h_rd|^2."""

    q: float

    def __post_init__(self):
        if self.q < 0.0:
            raise ValueError("q must be nonnegative")


@dataclass(frozen=True)
class PowerControl:
    """Fixed covert transmit power P_delta."""

    p_delta: float

    def __post_init__(self):
        if self.p_delta < 0.0:
            raise ValueError("p_delta must be nonnegative")


SchemeConfig = Union[RateControl, PowerControl]


@dataclass(frozen=True)
class DerivedConstants:
    """Per-draw constants derived from the source-relay link.

    mu: required-SNR factor; phi: noise leakage factor
    sigma_r^2/(p_s*h_sr_sq + sigma_r^2); eta: p_s/sigma_r^2.
    """

    mu: float
    phi: float
    eta: float

    @property
    def eta_h_sr(self) -> float:
        """eta * h_sr_sq, recovered exactly from phi."""
        return 1.0 / self.phi - 1.0


def compute_mu(params: SystemParams, h_sr_sq: float) -> float:
    """Required-SNR factor converting the rate target into relay power.

    Raises InfeasibleRate when the source-relay link cannot support r_sd at
    any relay power; callers treat the whole transmission as failed.
    """
    t = 2.0 ** (2.0 * params.r_sd) - 1.0
    num = (params.p_s * h_sr_sq + params.sigma_r_sq) * t
    den = params.p_s * h_sr_sq - params.sigma_r_sq * t
    if den <= 0.0:
        raise InfeasibleRate(
            f"p_s*h_sr_sq = {params.p_s * h_sr_sq:g} cannot support r_sd = {params.r_sd:g}"
        )
    return num / den


def derived_constants(params: SystemParams, h_sr_sq: float) -> DerivedConstants:
    mu = compute_mu(params, h_sr_sq)
    phi = params.sigma_r_sq / (params.p_s * h_sr_sq + params.sigma_r_sq)
    return DerivedConstants(mu=mu, phi=phi, eta=params.p_s / params.sigma_r_sq)


def relay_forward_power(params: SystemParams, mu: float, h_rd_sq: float) -> float:
    """Relay transmit power without a covert message (zero below the outage threshold)."""
    if mu < 0.0:
        raise ValueError("mu must be nonnegative")
    if h_rd_sq * params.p_r_max >= mu * params.sigma_d_sq and h_rd_sq > 0.0:
        return mu * params.sigma_d_sq / h_rd_sq if mu > 0.0 else 0.0
    return 0.0


def covert_thresholds(scheme: SchemeConfig, params: SystemParams, mu: float):
    """(forwarding threshold, covert threshold) on h_rd_sq for a scheme."""
    t_b = mu * params.sigma_d_sq / params.p_r_max
    if isinstance(scheme, RateControl):
        t_c = (mu * params.sigma_d_sq + (mu + 1.0) * scheme.q) / params.p_r_max
    else:
        budget = params.p_r_max - (mu + 1.0) * scheme.p_delta
        if budget <= 0.0:
            raise PowerBudgetExceeded(
                f"(mu+1)*p_delta = {(mu + 1.0) * scheme.p_delta:g} "
                f">= p_r_max = {params.p_r_max:g}"
            )
        t_c = mu * params.sigma_d_sq / budget
    return t_b, t_c


def relay_power_under_alt(
    scheme: SchemeConfig, params: SystemParams, mu: float, h_rd_sq: float
):
    """Relay powers when a covert message is intended.

    Returns (p_r1, p_delta_effective, covert_active). Boundary equalities
    resolve to the higher-power branch. The total never exceeds p_r_max.
    """
    if mu < 0.0:
        raise ValueError("mu must be nonnegative")
    t_b, t_c = covert_thresholds(scheme, params, mu)
    sig = mu * params.sigma_d_sq
    if h_rd_sq >= t_c and h_rd_sq > 0.0:
        if isinstance(scheme, RateControl):
            return mu * (scheme.q + params.sigma_d_sq) / h_rd_sq, scheme.q / h_rd_sq, True
        return mu * scheme.p_delta + sig / h_rd_sq, scheme.p_delta, True
    if h_rd_sq >= t_b and h_rd_sq > 0.0:
        return (sig / h_rd_sq if mu > 0.0 else 0.0), 0.0, False
    return 0.0, 0.0, False


def opportunity_probs(scheme: SchemeConfig, params: SystemParams, mu: float):
    """(P_B, P_C, omega): forwarding and covert opportunity probabilities.

    omega is the prior on the covert hypothesis: the relay flips a fair coin
    when the covert condition holds, so omega = P_C / (2 P_B).
    """
    if mu < 0.0:
        raise ValueError("mu must be nonnegative")
    t_b, t_c = covert_thresholds(scheme, params, mu)
    p_b = math.exp(-t_b)
    p_c = math.exp(-t_c)
    return p_b, p_c, 0.5 * p_c / p_b
