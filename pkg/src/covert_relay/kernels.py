"""Numeric kernels behind the analytic and Monte Carlo front ends.

Two interchangeable backends compute the hot paths (detector threshold
searches, optimizer grid scans, Monte Carlo trial loops):

* ``numba`` -- scalar loops compiled with ``@njit`` (default when numba
  imports cleanly),
* ``numpy`` -- vectorized array implementations of the same algorithms.

Select explicitly with the environment variable ``COVERT_RELAY_BACKEND``
set to ``numba``, ``numpy`` or ``auto`` before the package is imported.
``benchmarks/bench_backends.py`` times one against the other.

All randomness is counter based: a trial index hashed together with the
seed yields the draw, so results are reproducible for a fixed seed at any
parallelism level and chunking.
"""

import math
import os

import numpy as np

_choice = os.environ.get("COVERT_RELAY_BACKEND", "auto").strip().lower()
if _choice not in ("auto", "numba", "numpy"):
    raise RuntimeError(
        "COVERT_RELAY_BACKEND must be 'auto', 'numba' or 'numpy', got %r" % (_choice,)
    )

NUMBA_ENABLED = False
if _choice in ("auto", "numba"):
    try:
        from numba import njit as _njit

        NUMBA_ENABLED = True
    except ImportError:
        if _choice == "numba":
            raise

BACKEND = "numba" if NUMBA_ENABLED else "numpy"


def _jit(func):
    if NUMBA_ENABLED:
        return _njit(cache=True)(func)
    return func


_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_LN2 = math.log(2.0)
_EULER_GAMMA = 0.57721566490153286061
# power series / continued fraction crossover for Ei; at larger |x| the
# alternating series loses more than 1e-13 relative accuracy to cancellation
_EI_SWITCH = 3.0

# golden-section iteration counts: shrink factor 0.618^44 < 1e-9 of the
# initial bracket, a few extra for slack
_N_COARSE = 256
_N_GOLDEN = 64


# ---------------------------------------------------------------------------
# counter-based uniforms (splitmix64-style finalizer)
# ---------------------------------------------------------------------------

_C_SEED = np.uint64(0x9E3779B97F4A7C15)
_C_SUB = np.uint64(0xD1B54A32D192ED03)
_C_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_C_MIX2 = np.uint64(0x94D049BB133111EB)
_TO_U01 = 1.0 / 9007199254740992.0  # 2**-53


@_jit
def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _C_MIX1
    z = (z ^ (z >> np.uint64(27))) * _C_MIX2
    return z ^ (z >> np.uint64(31))


@_jit
def _stream_u01(seed, index, sub):
    """Uniform in [0, 1) fully determined by (seed, trial index, substream)."""
    z = _mix64((seed + np.uint64(1)) * _C_SEED + index)
    z = _mix64(z ^ ((sub + np.uint64(1)) * _C_SUB))
    return (z >> np.uint64(11)) * _TO_U01


def _stream_u01_vec(seed, index, sub):
    # same construction as _stream_u01, on uint64 arrays
    z = (np.uint64(seed) + np.uint64(1)) * _C_SEED + index
    z = (z ^ (z >> np.uint64(30))) * _C_MIX1
    z = (z ^ (z >> np.uint64(27))) * _C_MIX2
    z = z ^ (z >> np.uint64(31))
    z = z ^ ((np.uint64(sub) + np.uint64(1)) * _C_SUB)
    z = (z ^ (z >> np.uint64(30))) * _C_MIX1
    z = (z ^ (z >> np.uint64(27))) * _C_MIX2
    z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)) * _TO_U01


# ---------------------------------------------------------------------------
# exponential integral Ei on the negative axis
# ---------------------------------------------------------------------------


@_jit
def _e1_scaled(z):
    """exp(z)*E1(z) by modified Lentz continued fraction, for z >= ~1."""
    tiny = 1e-300
    b = z + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    f = d
    for n in range(1, 400):
        a = -(n * n * 1.0)
        b += 2.0
        d = b + a * d
        if abs(d) < tiny:
            d = tiny
        c = b + a / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return f


@_jit
def _ei_series(x):
    """gamma + ln|x| + sum x^k/(k k!), accurate for -EI_SWITCH < x < 0."""
    acc = 0.0
    term = 1.0
    for k in range(1, 400):
        term *= x / k
        delta = term / k
        acc += delta
        if abs(delta) < 1e-18 * (abs(acc) + 1e-30):
            break
    return _EULER_GAMMA + np.log(-x) + acc


@_jit
def ei_neg(x):
    """Ei(x) = -int_{-x}^inf exp(-t)/t dt for x < 0."""
    if x > -_EI_SWITCH:
        return _ei_series(x)
    return -np.exp(x) * _e1_scaled(-x)


@_jit
def exp_ei_neg(theta):
    """exp(theta)*Ei(-theta) for theta > 0, overflow-free for large theta."""
    if theta < _EI_SWITCH:
        return np.exp(theta) * _ei_series(-theta)
    return -_e1_scaled(theta)


def _exp_ei_neg_vec(theta):
    out = np.empty_like(theta)
    small = theta < _EI_SWITCH
    if np.any(small):
        x = -theta[small]
        acc = np.zeros_like(x)
        term = np.ones_like(x)
        for k in range(1, 80):
            term *= x / k
            acc += term / k
        ei = _EULER_GAMMA + np.log(-x) + acc
        out[small] = np.exp(theta[small]) * ei
    big = ~small
    if np.any(big):
        z = theta[big]
        tiny = 1e-300
        b = z + 1.0
        c = np.full_like(z, 1.0 / tiny)
        d = 1.0 / b
        f = d.copy()
        for n in range(1, 400):
            a = -float(n * n)
            b = b + 2.0
            d = b + a * d
            d[np.abs(d) < tiny] = tiny
            c = b + a / c
            c[np.abs(c) < tiny] = tiny
            d = 1.0 / d
            delta = c * d
            f *= delta
            if np.max(np.abs(delta - 1.0)) < 1e-16:
                break
        out[big] = -f
    return out


# ---------------------------------------------------------------------------
# detector error-rate pieces; P_B^{-1} is folded into every exponential so
# nothing overflows even when mu*sigma_d/p_r_max is huge
# ---------------------------------------------------------------------------


@_jit
def _pbinv_kappa(b, c, tau, floor):
    """P_B^{-1} * exp(-c/(tau-floor)); 0 at or below the floor."""
    if tau <= floor:
        return 0.0
    return np.exp(b - c / (tau - floor))


@_jit
def rate_alpha(tau, sigma_s, rho1, b, c1):
    if tau > rho1:
        return 0.0
    v = 1.0 - _pbinv_kappa(b, c1, tau, sigma_s)
    return min(max(v, 0.0), 1.0)


@_jit
def rate_beta(tau, sigma_s, rho2, b, c2):
    if tau > rho2:
        return 1.0
    v = _pbinv_kappa(b, c2, tau, sigma_s)
    return min(max(v, 0.0), 1.0)


@_jit
def power_beta(tau, rho3, rho4, b, c1):
    if tau > rho4:
        return 1.0
    v = _pbinv_kappa(b, c1, tau, rho3)
    return min(max(v, 0.0), 1.0)


@_jit
def power_xi_mid(tau, sigma_s, rho3, b, c1, omega2):
    """Detection error probability on the bracket [rho3, rho1]."""
    t1 = _pbinv_kappa(b, c1, tau, sigma_s)
    t3 = _pbinv_kappa(b, c1, tau, rho3)
    v = 1.0 - omega2 - (1.0 - omega2) * t1 + omega2 * t3
    return min(max(v, 0.0), 1.0)


# ---------------------------------------------------------------------------
# closed-form optimal detector, rate-control scheme
# ---------------------------------------------------------------------------


@_jit
def rate_detector_optimum(mu, phi, q, sigma_d, sigma_s, p_r_max, h_rs):
    """Optimal threshold and minimum detection error, rate-control.

    Returns (tau_star, xi_star, alpha, beta, omega1).  The interior
    stationary point is used when it exists below rho1, otherwise the
    detector sits at rho1. All exponentials carry the P_B^{-1} factor in the
    exponent; the interior branch is assembled fully in log space.
    """
    b = mu * sigma_d / p_r_max
    c1 = phi * mu * sigma_d * h_rs
    a_gap = (phi * mu + 1.0) * q * h_rs  # c2 - c1
    c2 = c1 + a_gap
    rho1 = p_r_max * phi * h_rs + sigma_s
    ln_omega1 = -_LN2 - (mu + 1.0) * q / p_r_max
    omega1 = 0.5 * np.exp(-(mu + 1.0) * q / p_r_max)

    interior = False
    tau_star = rho1
    ln_arg = 0.0
    if c1 > 0.0 and a_gap > 0.0:
        ln_arg = ln_omega1 - np.log1p(-omega1) + np.log(c2 / c1)
        if ln_arg > 0.0:
            tau_dd = sigma_s + a_gap / ln_arg
            if tau_dd <= rho1:
                tau_star = tau_dd
                interior = True

    if interior:
        big_l = b + np.log(a_gap / c2) - (c1 / a_gap) * ln_arg
        if big_l > 0.0:
            big_l = 0.0
        xi_star = -(1.0 - omega1) * np.expm1(big_l)
    else:
        xi_star = omega1 * np.exp(-(phi * mu + 1.0) * q / (phi * p_r_max))
    if xi_star < 0.0:
        xi_star = 0.0

    if mu * sigma_d > 0.0:
        rho2 = p_r_max * h_rs * (phi + (phi * mu + 1.0) * q / (mu * sigma_d)) + sigma_s
    else:
        rho2 = np.inf
    alpha = rate_alpha(tau_star, sigma_s, rho1, b, c1)
    beta = rate_beta(tau_star, sigma_s, rho2, b, c2)
    return tau_star, xi_star, alpha, beta, omega1


# ---------------------------------------------------------------------------
# numeric optimal detector, power-control scheme
# ---------------------------------------------------------------------------


@_jit
def power_detector_optimum(
    mu, phi, pd, sigma_d, sigma_s, p_r_max, h_rs, n_coarse, n_golden
):
    """Bounded threshold search on [rho3, rho1], power-control.

    Returns (tau_star, xi_star, alpha, beta, omega2).  A coarse grid seeds a
    golden-section refinement; unimodality of the bracketed branch is not
    assumed. Covert power above phi*p_r_max/(phi*mu+1) is detectable with
    certainty: xi_star = 0 with any threshold between rho1 and rho3.
    """
    b = mu * sigma_d / p_r_max
    c1 = phi * mu * sigma_d * h_rs
    rho1 = p_r_max * phi * h_rs + sigma_s
    rho3 = (phi * mu + 1.0) * pd * h_rs + sigma_s
    rho4 = (p_r_max * phi + (phi * mu + 1.0) * pd) * h_rs + sigma_s
    budget = p_r_max - (mu + 1.0) * pd
    omega2 = 0.5 * np.exp(-mu * (mu + 1.0) * sigma_d * pd / (p_r_max * budget))
    p_delta_u = phi * p_r_max / (phi * mu + 1.0)
    if pd > p_delta_u:
        return 0.5 * (rho1 + rho3), 0.0, 0.0, 0.0, omega2

    lo = rho3
    hi = rho1
    best_tau = lo
    best_val = power_xi_mid(lo, sigma_s, rho3, b, c1, omega2)
    best_j = 0
    for j in range(1, n_coarse):
        tau = lo + (hi - lo) * j / (n_coarse - 1)
        v = power_xi_mid(tau, sigma_s, rho3, b, c1, omega2)
        if v < best_val:
            best_val = v
            best_tau = tau
            best_j = j
    a = lo + (hi - lo) * max(best_j - 1, 0) / (n_coarse - 1)
    bb = lo + (hi - lo) * min(best_j + 1, n_coarse - 1) / (n_coarse - 1)
    c = bb - _INV_PHI * (bb - a)
    d = a + _INV_PHI * (bb - a)
    fc = power_xi_mid(c, sigma_s, rho3, b, c1, omega2)
    fd = power_xi_mid(d, sigma_s, rho3, b, c1, omega2)
    for _ in range(n_golden):
        if fc <= fd:
            bb = d
            d = c
            fd = fc
            c = bb - _INV_PHI * (bb - a)
            fc = power_xi_mid(c, sigma_s, rho3, b, c1, omega2)
        else:
            a = c
            c = d
            fc = fd
            d = a + _INV_PHI * (bb - a)
            fd = power_xi_mid(d, sigma_s, rho3, b, c1, omega2)
    if fc <= fd:
        tau_g, val_g = c, fc
    else:
        tau_g, val_g = d, fd
    if val_g < best_val:
        best_tau, best_val = tau_g, val_g

    alpha = rate_alpha(best_tau, sigma_s, rho1, b, c1)
    beta = power_beta(best_tau, rho3, rho4, b, c1)
    return best_tau, best_val, alpha, beta, omega2


# ---------------------------------------------------------------------------
# closed-form effective covert rates
# ---------------------------------------------------------------------------


@_jit
def rc_rate(q, mu, eta_h, sigma_d, p_r_max):
    """Rate-control scheme: (gamma_delta, r_delta, p_c, r_c)."""
    gamma = q / (mu * (q + sigma_d) / (eta_h + 1.0) + sigma_d)
    r_delta = np.log2(1.0 + gamma)
    p_c = np.exp(-(mu * sigma_d + (mu + 1.0) * q) / p_r_max)
    return gamma, r_delta, p_c, r_delta * p_c


@_jit
def rc_power(pd, mu, eta_h, sigma_d, p_r_max):
    """Power-control scheme closed form (exponential-integral based)."""
    if pd <= 0.0:
        return 0.0
    budget = p_r_max - (mu + 1.0) * pd
    g = eta_h + mu + 1.0
    beta1 = g * (p_r_max - pd) * sigma_d
    beta2 = (g * budget + mu * mu * pd) * sigma_d
    alpha1 = pd * g * budget
    alpha2 = mu * pd * budget
    p_c = np.exp(-mu * sigma_d / budget)
    if alpha2 <= 0.0:
        # mu == 0: integrand reduces to ln((beta1 + alpha1 x)/beta2)
        integral = np.log(beta1 / beta2) - exp_ei_neg(beta1 / alpha1)
    else:
        integral = (
            np.log(beta1 / beta2)
            + exp_ei_neg(beta2 / alpha2)
            - exp_ei_neg(beta1 / alpha1)
        )
    if integral < 0.0:
        integral = 0.0
    return p_c * integral / _LN2


# ---------------------------------------------------------------------------
# optimizer grid scans: per-candidate (r_c, xi_star, omega, feasible)
# ---------------------------------------------------------------------------


@_jit
def _rate_scan_loop(q_grid, mu, phi, sigma_d, sigma_s, p_r_max, h_rs, eta_h, epsilon):
    n = q_grid.shape[0]
    rc = np.empty(n)
    xi = np.empty(n)
    om = np.empty(n)
    feas = np.empty(n, np.bool_)
    for i in range(n):
        q = q_grid[i]
        tau, x, a, bt, w = rate_detector_optimum(
            mu, phi, q, sigma_d, sigma_s, p_r_max, h_rs
        )
        g, rd, pc, r = rc_rate(q, mu, eta_h, sigma_d, p_r_max)
        rc[i] = r
        xi[i] = x
        om[i] = w
        feas[i] = x - (w - epsilon) >= -1e-9
    return rc, xi, om, feas


@_jit
def _power_scan_loop(
    pd_grid, mu, phi, sigma_d, sigma_s, p_r_max, h_rs, eta_h, epsilon, n_coarse, n_golden
):
    n = pd_grid.shape[0]
    rc = np.empty(n)
    xi = np.empty(n)
    om = np.empty(n)
    feas = np.empty(n, np.bool_)
    for i in range(n):
        pd = pd_grid[i]
        tau, x, a, bt, w = power_detector_optimum(
            mu, phi, pd, sigma_d, sigma_s, p_r_max, h_rs, n_coarse, n_golden
        )
        rc[i] = rc_power(pd, mu, eta_h, sigma_d, p_r_max)
        xi[i] = x
        om[i] = w
        feas[i] = x - (w - epsilon) >= -1e-9
    return rc, xi, om, feas


def _rate_scan_vec(q_grid, mu, phi, sigma_d, sigma_s, p_r_max, h_rs, eta_h, epsilon):
    q = np.asarray(q_grid, dtype=np.float64)
    b = mu * sigma_d / p_r_max
    c1 = phi * mu * sigma_d * h_rs
    a_gap = (phi * mu + 1.0) * q * h_rs
    c2 = c1 + a_gap
    rho1 = p_r_max * phi * h_rs + sigma_s
    ln_omega1 = -_LN2 - (mu + 1.0) * q / p_r_max
    omega1 = 0.5 * np.exp(-(mu + 1.0) * q / p_r_max)

    with np.errstate(divide="ignore", invalid="ignore"):
        ln_arg = ln_omega1 - np.log1p(-omega1) + np.log(c2 / c1) if c1 > 0 else np.full_like(q, np.inf)
        tau_dd = sigma_s + np.where(ln_arg > 0.0, a_gap / ln_arg, np.inf)
        interior = (c1 > 0.0) & (a_gap > 0.0) & (ln_arg > 0.0) & (tau_dd <= rho1)
        big_l = b + np.log(a_gap / c2) - (c1 / np.where(a_gap > 0, a_gap, 1.0)) * ln_arg
        big_l = np.minimum(big_l, 0.0)
        xi_in = -(1.0 - omega1) * np.expm1(big_l)
        xi_rho1 = omega1 * np.exp(-(phi * mu + 1.0) * q / (phi * p_r_max))
    xi = np.where(interior, xi_in, xi_rho1)
    xi = np.maximum(xi, 0.0)

    gamma = q / (mu * (q + sigma_d) / (eta_h + 1.0) + sigma_d)
    rc = np.log2(1.0 + gamma) * np.exp(-(mu * sigma_d + (mu + 1.0) * q) / p_r_max)
    feas = xi - (omega1 - epsilon) >= -1e-9
    return rc, xi, omega1, feas


def _power_mid_vec(tau, sigma_s, rho3, b, c1, omega2):
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = np.exp(b - c1 / (tau - sigma_s))
        t3 = np.exp(b - c1 / (tau - rho3))
    t1 = np.where(tau > sigma_s, t1, 0.0)
    t3 = np.where(tau > rho3, t3, 0.0)
    return np.clip(1.0 - omega2 - (1.0 - omega2) * t1 + omega2 * t3, 0.0, 1.0)


def _power_tau_xi_vec(pd, mu, phi, sigma_d, sigma_s, p_r_max, h_rs, n_coarse, n_golden):
    """Vectorized threshold search over an array of covert powers."""
    b = mu * sigma_d / p_r_max
    c1 = phi * mu * sigma_d * h_rs
    rho1 = p_r_max * phi * h_rs + sigma_s
    rho3 = (phi * mu + 1.0) * pd * h_rs + sigma_s
    span = rho1 - rho3
    frac = np.linspace(0.0, 1.0, n_coarse)
    budget = p_r_max - (mu + 1.0) * pd
    omega2 = 0.5 * np.exp(-mu * (mu + 1.0) * sigma_d * pd / (p_r_max * budget))

    tau = rho3[:, None] + span[:, None] * frac[None, :]
    val = _power_mid_vec(tau, sigma_s, rho3[:, None], b, c1, omega2[:, None])
    j = np.argmin(val, axis=1)
    rows = np.arange(pd.shape[0])
    best_tau = tau[rows, j]
    best_val = val[rows, j]

    a = rho3 + span * np.clip(j - 1, 0, n_coarse - 1) / (n_coarse - 1)
    bb = rho3 + span * np.clip(j + 1, 0, n_coarse - 1) / (n_coarse - 1)
    c = bb - _INV_PHI * (bb - a)
    d = a + _INV_PHI * (bb - a)
    fc = _power_mid_vec(c, sigma_s, rho3, b, c1, omega2)
    fd = _power_mid_vec(d, sigma_s, rho3, b, c1, omega2)
    for _ in range(n_golden):
        left = fc <= fd
        bb = np.where(left, d, bb)
        a = np.where(left, a, c)
        c = bb - _INV_PHI * (bb - a)
        d = a + _INV_PHI * (bb - a)
        fc = _power_mid_vec(c, sigma_s, rho3, b, c1, omega2)
        fd = _power_mid_vec(d, sigma_s, rho3, b, c1, omega2)
    tau_g = np.where(fc <= fd, c, d)
    val_g = np.minimum(fc, fd)
    use_g = val_g < best_val
    best_tau = np.where(use_g, tau_g, best_tau)
    best_val = np.where(use_g, val_g, best_val)

    p_delta_u = phi * p_r_max / (phi * mu + 1.0)
    certain = pd > p_delta_u
    best_tau = np.where(certain, 0.5 * (rho1 + rho3), best_tau)
    best_val = np.where(certain, 0.0, best_val)
    return best_tau, best_val, omega2


def _power_scan_vec(
    pd_grid, mu, phi, sigma_d, sigma_s, p_r_max, h_rs, eta_h, epsilon, n_coarse, n_golden
):
    pd = np.asarray(pd_grid, dtype=np.float64)
    tau, xi, om = _power_tau_xi_vec(
        pd, mu, phi, sigma_d, sigma_s, p_r_max, h_rs, n_coarse, n_golden
    )
    budget = p_r_max - (mu + 1.0) * pd
    g = eta_h + mu + 1.0
    beta1 = g * (p_r_max - pd) * sigma_d
    beta2 = (g * budget + mu * mu * pd) * sigma_d
    alpha1 = pd * g * budget
    alpha2 = mu * pd * budget
    pos = pd > 0.0
    rc = np.zeros_like(pd)
    if np.any(pos):
        with np.errstate(divide="ignore"):
            th1 = beta1[pos] / alpha1[pos]
        intg = np.log(beta1[pos] / beta2[pos]) - _exp_ei_neg_vec(th1)
        if mu > 0.0:
            th2 = beta2[pos] / alpha2[pos]
            intg = intg + _exp_ei_neg_vec(th2)
        rc[pos] = np.exp(-mu * sigma_d / budget[pos]) * np.maximum(intg, 0.0) / _LN2
    feas = xi - (om - epsilon) >= -1e-9
    return rc, xi, om, feas


def rate_scan(q_grid, mu, phi, sigma_d, sigma_s, p_r_max, h_rs, eta_h, epsilon):
    if NUMBA_ENABLED:
        return _rate_scan_loop(
            np.asarray(q_grid, dtype=np.float64),
            mu, phi, sigma_d, sigma_s, p_r_max, h_rs, eta_h, epsilon,
        )
    return _rate_scan_vec(
        q_grid, mu, phi, sigma_d, sigma_s, p_r_max, h_rs, eta_h, epsilon
    )


def power_scan(
    pd_grid, mu, phi, sigma_d, sigma_s, p_r_max, h_rs, eta_h, epsilon,
    n_coarse=_N_COARSE, n_golden=_N_GOLDEN,
):
    if NUMBA_ENABLED:
        return _power_scan_loop(
            np.asarray(pd_grid, dtype=np.float64),
            mu, phi, sigma_d, sigma_s, p_r_max, h_rs, eta_h, epsilon,
            n_coarse, n_golden,
        )
    return _power_scan_vec(
        pd_grid, mu, phi, sigma_d, sigma_s, p_r_max, h_rs, eta_h, epsilon,
        n_coarse, n_golden,
    )


def power_threshold_search(mu, phi, pd, sigma_d, sigma_s, p_r_max, h_rs,
                           n_coarse=_N_COARSE, n_golden=_N_GOLDEN):
    """Scalar wrapper used by the detection module."""
    return power_detector_optimum(
        mu, phi, pd, sigma_d, sigma_s, p_r_max, h_rs, n_coarse, n_golden
    )


# ---------------------------------------------------------------------------
# Monte Carlo trial loops
# ---------------------------------------------------------------------------
#
# Trials replay the hypothesis model behind the detector closed forms: every
# forwarding draw carries an independent fair coin deciding whether the relay
# runs the covert-power policy, and the warden statistic is the infinite
# blocklength mean. Draws below the forwarding threshold are skipped (no node
# transmits on outage). The covert-rate tally instead follows the physical
# policy: it accrues exactly on draws where covert transmission is possible.


@_jit
def _mc_loop(seed, n, is_rate, mu, phi, qp, sigma_d, sigma_s, p_r_max, h_rs, eta_h, tau):
    t_b = mu * sigma_d / p_r_max
    if is_rate:
        t_c = (mu * sigma_d + (mu + 1.0) * qp) / p_r_max
        gam = qp / (mu * (qp + sigma_d) / (eta_h + 1.0) + sigma_d)
        log_rate = np.log2(1.0 + gam)
    else:
        t_c = mu * sigma_d / (p_r_max - (mu + 1.0) * qp)
        log_rate = 0.0

    n_b = 0
    n_c = 0
    n_act = 0
    n_coin1 = 0
    fa = 0
    miss = 0
    rc_sum = 0.0
    rc_sq = 0.0
    for i in range(n):
        u = _stream_u01(seed, np.uint64(i), np.uint64(0))
        h_rd = -np.log1p(-u)
        in_c = h_rd >= t_c
        if in_c:
            n_c += 1
            if is_rate:
                r = log_rate
            else:
                r = np.log2(
                    1.0
                    + qp * (eta_h + 1.0) * h_rd
                    / (mu * qp * h_rd + (eta_h + mu + 1.0) * sigma_d)
                )
            rc_sum += r
            rc_sq += r * r
        if h_rd < t_b:
            continue
        n_b += 1
        coin = _stream_u01(seed, np.uint64(i), np.uint64(1)) < 0.5
        if mu > 0.0:
            fwd = mu * sigma_d * phi * h_rs / h_rd
        else:
            fwd = 0.0
        if coin:
            n_coin1 += 1
            if in_c:
                n_act += 1
            if is_rate:
                if mu > 0.0:
                    stat = mu * (qp + sigma_d) * phi * h_rs / h_rd + qp * h_rs / h_rd + sigma_s
                else:
                    stat = qp * h_rs / h_rd + sigma_s
            else:
                stat = mu * qp * phi * h_rs + fwd + qp * h_rs + sigma_s
            if stat < tau:
                miss += 1
        else:
            if fwd + sigma_s >= tau:
                fa += 1
    return n_b, n_c, n_act, n_coin1, fa, miss, rc_sum, rc_sq


def _mc_vec(seed, n, is_rate, mu, phi, qp, sigma_d, sigma_s, p_r_max, h_rs, eta_h, tau):
    idx = np.arange(n, dtype=np.uint64)
    u = _stream_u01_vec(seed, idx, 0)
    h_rd = -np.log1p(-u)
    coin = _stream_u01_vec(seed, idx, 1) < 0.5

    t_b = mu * sigma_d / p_r_max
    if is_rate:
        t_c = (mu * sigma_d + (mu + 1.0) * qp) / p_r_max
    else:
        t_c = mu * sigma_d / (p_r_max - (mu + 1.0) * qp)

    in_b = h_rd >= t_b
    in_c = h_rd >= t_c

    if is_rate:
        gam = qp / (mu * (qp + sigma_d) / (eta_h + 1.0) + sigma_d)
        r = np.where(in_c, np.log2(1.0 + gam), 0.0)
    else:
        r = np.where(
            in_c,
            np.log2(
                1.0
                + qp * (eta_h + 1.0) * h_rd
                / (mu * qp * h_rd + (eta_h + mu + 1.0) * sigma_d)
            ),
            0.0,
        )
    rc_sum = float(np.sum(r))
    rc_sq = float(np.sum(r * r))

    with np.errstate(divide="ignore"):
        if mu > 0.0:
            fwd = mu * sigma_d * phi * h_rs / h_rd
        else:
            fwd = np.zeros_like(h_rd)
        if is_rate:
            if mu > 0.0:
                stat1 = (mu * (qp + sigma_d) * phi + qp) * h_rs / h_rd + sigma_s
            else:
                stat1 = qp * h_rs / h_rd + sigma_s
        else:
            stat1 = mu * qp * phi * h_rs + fwd + qp * h_rs + sigma_s
    stat0 = fwd + sigma_s

    h0 = in_b & ~coin
    h1 = in_b & coin
    n_b = int(np.count_nonzero(in_b))
    n_c = int(np.count_nonzero(in_c))
    n_act = int(np.count_nonzero(h1 & in_c))
    n_coin1 = int(np.count_nonzero(h1))
    fa = int(np.count_nonzero(h0 & (stat0 >= tau)))
    miss = int(np.count_nonzero(h1 & (stat1 < tau)))
    return n_b, n_c, n_act, n_coin1, fa, miss, rc_sum, rc_sq


def mc_trials(seed, n, is_rate, mu, phi, qp, sigma_d, sigma_s, p_r_max, h_rs, eta_h, tau):
    seed = np.uint64(seed)
    if NUMBA_ENABLED:
        return _mc_loop(
            seed, n, is_rate, mu, phi, qp, sigma_d, sigma_s, p_r_max, h_rs, eta_h, tau
        )
    return _mc_vec(
        seed, n, is_rate, mu, phi, qp, sigma_d, sigma_s, p_r_max, h_rs, eta_h, tau
    )


def exponential_draws(seed, n, sub):
    """Unit-mean exponential draws from the counter-based stream."""
    idx = np.arange(n, dtype=np.uint64)
    return -np.log1p(-_stream_u01_vec(np.uint64(seed), idx, sub))
