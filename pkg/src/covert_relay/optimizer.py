"""Covert-constrained maximization of the effective covert rate.

Both searches scan a 512-point candidate grid (logarithmic in Q for
rate-control, linear in P_delta up to the certainty bound for power-control),
then refine around the best feasible cell with a golden-section pass and a
bisection onto the constraint boundary when it is active. The covert
constraint xi_star >= omega - epsilon is re-evaluated at every candidate
because the prior omega moves with the covert power.
"""

from __future__ import annotations

import math
from typing import Optional, Tuple

import numpy as np

from . import kernels
from .detection import DetectionReport, optimal_threshold
from .errors import DomainError, InfeasibleRate
from .scenario import (
    ChannelDraw,
    DerivedConstants,
    PowerControl,
    RateControl,
    SystemParams,
    derived_constants,
)

_SLACK_TOL = 1e-9
_GRID_POINTS = 512
# pragmatic cap on the Q search range; the covert opportunity probability
# decays exponentially well before it
_Q_SPAN = (1e-4, 1e2)


def _golden_max(f, lo, hi, iters=80):
    inv = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv * (b - a)
    d = a + inv * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def _bisect_feasible(slack, x_ok, x_bad, iters=70):
    for _ in range(iters):
        mid = 0.5 * (x_ok + x_bad)
        if slack(mid) >= -_SLACK_TOL:
            x_ok = mid
        else:
            x_bad = mid
    return x_ok


def _refine(point, grid, rc, feas, log_domain):
    """Candidate values near the best feasible grid cell.

    point(x) -> (rc, слack)... returns list of (x, rc) candidates including
    the best grid point, a golden-section refinement and, when the constraint
    clips a neighbor, the bisected constraint boundary.
    """
    idx = np.flatnonzero(feas)
    best = idx[np.argmax(rc[idx])]
    x_best = grid[best]
    cands = [(x_best, rc[best])]

    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, len(grid) - 1)]

    def obj(x):
        r, s = point(x)
        return r if s >= -_SLACK_TOL else -1.0

    if log_domain:
        xg, fg = _golden_max(lambda t: obj(math.exp(t)), math.log(lo), math.log(hi))
        xg = math.exp(xg)
    else:
        xg, fg = _golden_max(obj, lo, hi)
    if fg >= 0.0:
        cands.append((xg, fg))

    for nb in (best - 1, best + 1):
        if 0 <= nb < len(grid) and not feas[nb]:
            xb = _bisect_feasible(lambda x: point(x)[1], grid[best], grid[nb])
            cands.append((xb, point(xb)[0]))
    return max(cands, key=lambda t: t[1])


def maximize_rate_control(
    params: SystemParams, h: ChannelDraw
) -> Tuple[float, float, Optional[DetectionReport]]:
    """Best covert power product Q under the covertness constraint.

    Returns (q_star, r_c_star, report); (0, 0, None) when the source-relay
    link cannot carry the rate or no probed Q satisfies the constraint.
    """
    try:
        dc = derived_constants(params, h.h_sr_sq)
    except InfeasibleRate:
        return 0.0, 0.0, None
    eta_h = dc.eta * h.h_sr_sq
    sd = params.sigma_d_sq
    grid = np.geomspace(_Q_SPAN[0] * sd, _Q_SPAN[1] * sd, _GRID_POINTS)
    rc, xi, om, feas = kernels.rate_scan(
        grid, dc.mu, dc.phi, sd, params.sigma_s_sq, params.p_r_max,
        h.h_rs_sq, eta_h, params.epsilon,
    )
    if not np.any(feas):
        return 0.0, 0.0, None

    def point(q):
        tau, x, a, bt, w = kernels.rate_detector_optimum(
            dc.mu, dc.phi, q, sd, params.sigma_s_sq, params.p_r_max, h.h_rs_sq
        )
        r = kernels.rc_rate(q, dc.mu, eta_h, sd, params.p_r_max)[3]
        return r, x - (w - params.epsilon)

    q_star, r_star = _refine(point, grid, rc, feas, log_domain=True)
    report = optimal_threshold(RateControl(q_star), params, dc, h.h_rs_sq)
    return float(q_star), float(r_star), report


def maximize_power_control(
    params: SystemParams, h: ChannelDraw
) -> Tuple[float, float, Optional[DetectionReport]]:
    """Best covert transmit power P_delta in [0, P_delta_u] under the constraint."""
    try:
        dc = derived_constants(params, h.h_sr_sq)
    except InfeasibleRate:
        return 0.0, 0.0, None
    eta_h = dc.eta * h.h_sr_sq
    sd = params.sigma_d_sq
    pdu = dc.phi * params.p_r_max / (dc.phi * dc.mu + 1.0)
    grid = np.linspace(0.0, pdu * (1.0 - 1e-6), _GRID_POINTS)
    rc, xi, om, feas = kernels.power_scan(
        grid, dc.mu, dc.phi, sd, params.sigma_s_sq, params.p_r_max,
        h.h_rs_sq, eta_h, params.epsilon,
    )
    if not np.any(feas):
        return 0.0, 0.0, None

    def point(pd):
        tau, x, a, bt, w = kernels.power_threshold_search(
            dc.mu, dc.phi, pd, sd, params.sigma_s_sq, params.p_r_max, h.h_rs_sq
        )
        r = kernels.rc_power(pd, dc.mu, eta_h, sd, params.p_r_max)
        return r, x - (w - params.epsilon)

    pd_star, r_star = _refine(point, grid, rc, feas, log_domain=False)
    if pd_star <= 0.0:
        return 0.0, 0.0, None
    report = optimal_threshold(PowerControl(pd_star), params, dc, h.h_rs_sq)
    return float(pd_star), float(r_star), report


def asymptotics(
    params: SystemParams, dc: DerivedConstants, q: float
) -> Tuple[float, float]:
    """Large-relay-power limit of xi_star and the covertness-saturating Q.

    xi_limit is the fixed value xi_star approaches as p_r_max grows; q_epsilon
    is the closed-form Q at which the limit meets the covert constraint
    (requires epsilon < 1/2).
    """
    pm = dc.phi * dc.mu
    pms = pm * params.sigma_d_sq
    a_gap = (pm + 1.0) * q
    f1 = a_gap / (pms + a_gap) if pms + a_gap > 0.0 else 0.0
    y = pms / a_gap if a_gap > 0.0 else math.inf
    if y == 0.0:
        f2 = 1.0
    elif math.isinf(y):
        f2 = 0.0 if q > 0.0 else 1.0
    else:
        f2 = math.exp(-y * math.log1p(1.0 / y))
    xi_limit = 0.5 * (1.0 - f1 * f2)

    if params.epsilon >= 0.5:
        raise DomainError("q_epsilon requires epsilon < 1/2")
    q_eps = pms / (pm + 1.0) * (1.0 / (1.0 - 2.0 * params.epsilon) - 1.0)
    return xi_limit, q_eps
