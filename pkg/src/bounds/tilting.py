# src/bounds/tilting.py - Optimized tilting measures: DS2 fixed point and 1961 Gallager families
"""
DS2 tilting (one measure per channel, shared constant k):

    psi(y; j) = beta_j p(y|0; j) [1 + k L_j(y)^lambda]^rho,   L_j = p(y|1; j)/p(y|0; j)

with beta_j the normalizer and k the fixed point of

    k = delta/(1-delta) * sum_j alpha_j beta_j^{1-1/rho} sum_y p0 [1 + k L^lambda]^{rho-1}
                        / sum_j alpha_j beta_j^{1-1/rho} sum_y p0 L^lambda [1 + k L^lambda]^{rho-1}

The iteration runs on ln k for a whole batch of (lambda, rho) points; entries
that do not settle are solved by bracketing the same equation with brentq.

Gallager tilting (even functions f(y; j)), on the unit cube (rho, s, c):

    f = {[(1-c)(p0^a - p1^a)^2 + 2c (p0 p1)^a] / (p0^{1-s} + p1^{1-s})}^{rho/s},
    r = s(1 - 1/rho),  a = (1 - r)/2
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from config.settings import CONFIG
from src.bounds.results import TiltingSolution
from src.bounds.stack import ChannelStack, as_column, channel_stack, log_pow, smul
from src.channels.mbios import MbiosChannel, ParallelChannelSet
from src.core.errors import NoConvergenceError
from src.numerics.logmath import LN2, LOG_ZERO
from src.numerics.quadrature import QuadratureConfig
from src.numerics.solvers import fixed_point

_DELTA_CAP = 1.0 - 1e-12
_BRACKET_STEP = 10.0
_BRACKET_LIMIT = 400.0


@dataclass(frozen=True)
class FixedPointConfig:
    """Damped iteration settings for the DS2 tilting constant"""
    damping: float = 0.5
    tol: float = 1e-10
    max_iter: int = 500

    @classmethod
    def from_config(cls) -> "FixedPointConfig":
        return cls(
            damping=float(CONFIG.get('optimizer.fixed_point.damping', 0.5)),
            tol=float(CONFIG.get('optimizer.fixed_point.tol', 1e-10)),
            max_iter=int(CONFIG.get('optimizer.fixed_point.max_iter', 500)),
        )


# =============================================================================
# DS2 CHANNEL SUMS
# =============================================================================

def ds2_channel_sums(stack: ChannelStack, lam, rho, log_k) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Per-channel sums of the un-normalized DS2 measure g = [1 + k L^lambda]^rho

    Args:
        stack: channel tables
        lam, rho, log_k: (P,) parameter vectors

    Returns:
        (log_gs, log_v, log_gr), each (P, J):
            gs = sum_y p0 g
            v  = sum_y p0^{1-lambda} p1^lambda g^{1-1/rho}
            gr = sum_y p0 g^{1-1/rho}
    """
    lam3, rho3, lk3 = as_column(lam), as_column(rho), as_column(log_k)
    a, b = stack.lp0[None], stack.lp1[None]
    forward, mirror = stack.forward[None], stack.mirror[None]

    with np.errstate(invalid='ignore', over='ignore'):
        llr = np.where(forward, b - a, 0.0)
        lam_llr = smul(lam3, llr)
        ell = np.logaddexp(0.0, lk3 + lam_llr)
        gs_f = a + rho3 * ell
        gr_f = a + (rho3 - 1.0) * ell
        v_f = a + lam_llr + (rho3 - 1.0) * ell

        # outputs with p0 = 0 < p1: limits of the same integrands, p0^e read as 0, 1 or inf
        lam_rho = lam3 * rho3
        b_m = np.where(mirror, b, 0.0)
        tilted = np.isfinite(lk3) & (lam3 > 0)
        gs_m = np.where(tilted, smul(1.0 - lam_rho, a) + rho3 * lk3 + lam_rho * b_m, LOG_ZERO)
        v_untilted = np.where(lam3 > 0, smul(1.0 - lam3, a) + lam3 * b_m, LOG_ZERO)
        v_m = np.where(tilted, (rho3 - 1.0) * lk3 + smul(1.0 - lam_rho, a) + lam_rho * b_m, v_untilted)

        def pick(f_part, m_part):
            return np.where(forward, f_part, np.where(mirror, m_part, LOG_ZERO))

        log_gs = stack.integrate(pick(gs_f, gs_m))
        log_v = stack.integrate(pick(v_f, v_m))
        log_gr = stack.integrate(pick(gr_f, LOG_ZERO))
    return log_gs, log_v, log_gr


def ds2_mixtures(stack: ChannelStack, lam, rho, log_k) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    alpha-averaged DS2 quantities for the normalized measure psi

    Returns:
        (log_t1, log_t2, log_gs): ln T1_bar, ln T2_bar (P,) and ln sum_y p0 g (P, J), where
        T1_j = beta_j^{1-1/rho} v_j and T2_j = beta_j^{1-1/rho} gr_j with beta_j = 1/gs_j
    """
    log_gs, log_v, log_gr = ds2_channel_sums(stack, lam, rho, log_k)
    coef = 1.0 / np.asarray(rho, dtype=float).reshape(-1, 1) - 1.0
    with np.errstate(invalid='ignore'):
        scale = smul(coef, log_gs)
        log_t1 = stack.mix(log_v + scale)
        log_t2 = stack.mix(log_gr + scale)
    return log_t1, log_t2, log_gs


# =============================================================================
# DS2 FIXED POINT
# =============================================================================

def _log_ratio(delta: float) -> float:
    d = min(delta, _DELTA_CAP)
    return math.log(d / (1.0 - d))


def _k_map(stack: ChannelStack, log_ratio: float, lam, rho):
    def mapping(log_k):
        log_t1, log_t2, _ = ds2_mixtures(stack, lam, rho, log_k)
        with np.errstate(invalid='ignore'):
            return log_ratio + log_t2 - log_t1
    return mapping


def _bracket_log_k(stack: ChannelStack, log_ratio: float, lam: float, rho: float, guess: float) -> float:
    """Solve map(x) = x by brentq, widening the bracket around the last iterate"""
    mapping = _k_map(stack, log_ratio, np.array([lam]), np.array([rho]))

    def residual(x: float) -> float:
        return float(mapping(np.array([x]))[0]) - x

    center = guess if math.isfinite(guess) else log_ratio
    width = _BRACKET_STEP
    while width <= _BRACKET_LIMIT:
        lo, hi = center - width, center + width
        r_lo, r_hi = residual(lo), residual(hi)
        if math.isfinite(r_lo) and math.isfinite(r_hi) and r_lo * r_hi <= 0:
            return brentq(residual, lo, hi, xtol=1e-12)
        width *= 2.0

    logging.debug(f"[DS2] Tilting constant not bracketed | lambda={lam:.6g} | rho={rho:.6g}")
    return guess


def solve_log_k(stack: ChannelStack, delta: float, lam, rho,
                fp: Optional[FixedPointConfig] = None) -> Tuple[np.ndarray, int]:
    """
    ln k for a batch of (lambda, rho) points

    Returns:
        (log_k (P,), number of entries resolved by bracketing)
    """
    lam = np.asarray(lam, dtype=float).reshape(-1)
    rho = np.asarray(rho, dtype=float).reshape(-1)
    if delta <= 0.0:
        return np.full(lam.shape, LOG_ZERO), 0

    fp = fp or FixedPointConfig.from_config()
    log_ratio = _log_ratio(delta)
    init = np.full(lam.shape, log_ratio)
    try:
        return fixed_point(_k_map(stack, log_ratio, lam, rho), init, tol=fp.tol,
                           max_iter=fp.max_iter, damping=fp.damping), 0
    except NoConvergenceError as e:
        log_k = np.array(e.last, dtype=float)
        stuck = np.flatnonzero(e.unconverged)
        logging.debug(f"[DS2] Fixed point unsettled for {stuck.size} points | bracketing with brentq")
        for i in stuck:
            log_k[i] = _bracket_log_k(stack, log_ratio, lam[i], rho[i], log_k[i])
        return log_k, int(stuck.size)


def ds2_tilting_solve(delta: float, lam: float, rho: float, channel_set: ParallelChannelSet,
                      config: Optional[QuadratureConfig] = None,
                      fp: Optional[FixedPointConfig] = None) -> TiltingSolution:
    """
    Optimized DS2 tilting measures for normalized weight delta

    Raises:
        ValueError: parameters outside delta in [0, 1], lambda >= 0, rho in (0, 1]
    """
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta must lie in [0, 1], got {delta}")
    if lam < 0.0 or not 0.0 < rho <= 1.0:
        raise ValueError(f"DS2 needs lambda >= 0 and 0 < rho <= 1, got lambda={lam}, rho={rho}")

    stack = channel_stack(channel_set, config)
    log_k, bracketed = solve_log_k(stack, delta, [lam], [rho], fp)
    _, _, log_gs = ds2_mixtures(stack, [lam], [rho], log_k)
    betas = np.exp(-log_gs[0])
    k = float(np.exp(log_k[0]))
    return TiltingSolution(delta=delta, lam=lam, rho=rho, k=k, betas=betas, bracketed=bool(bracketed))


def ds2_k_slope_at_zero(lam: float, channel_set: ParallelChannelSet,
                        config: Optional[QuadratureConfig] = None) -> float:
    """dk/d(delta) at delta = 0: 1 / sum_j alpha_j sum_y p0^{1-lambda} p1^lambda"""
    stack = channel_stack(channel_set, config)
    _, log_v, _ = ds2_channel_sums(stack, [lam], [1.0], [LOG_ZERO])
    return float(np.exp(-stack.mix(log_v)[0]))


def induced_gallager_tilting(solution: TiltingSolution, channel: MbiosChannel, s: float, outputs) -> np.ndarray:
    """
    f(y) = p0(y) [1 + k L(y)^lambda]^{rho/s} implied by the DS2 measure through g = (f/p0)^s

    Up to a constant; not an even function in general.
    """
    y = np.asarray(outputs, dtype=float)
    lp0 = channel.log_density(y, 0)
    lp1 = channel.log_density(y, 1)
    log_k = math.log(solution.k) if solution.k > 0 else LOG_ZERO
    with np.errstate(invalid='ignore'):
        ell = np.logaddexp(0.0, log_k + smul(solution.lam, lp1 - lp0))
    return np.exp(lp0 + (solution.rho / s) * ell)


# =============================================================================
# 1961 GALLAGER TILTING
# =============================================================================

def log_cube_tilting(lp0, lp1, rho, s, c) -> np.ndarray:
    """ln f of the unit-cube family (elementwise, broadcasting)"""
    rho = np.asarray(rho, dtype=float)
    s = np.asarray(s, dtype=float)
    c = np.asarray(c, dtype=float)
    r = s * (1.0 - 1.0 / rho)
    a = 0.5 * (1.0 - r)

    with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
        high = np.maximum(lp0, lp1)
        gap = np.abs(lp0 - lp1)
        log_square = 2.0 * log_pow(high, a) + 2.0 * np.log(-np.expm1(-a * gap))
        log_cross = np.log(2.0 * c) + log_pow(lp0, a) + log_pow(lp1, a)
        numerator = np.logaddexp(np.log1p(-c) + log_square, log_cross)
        denominator = np.logaddexp(log_pow(lp0, 1.0 - s), log_pow(lp1, 1.0 - s))
        return (rho / s) * (numerator - denominator)


def log_random_tilting(lp0, lp1, r, s) -> np.ndarray:
    """ln f = (1/(s-r)) ln[(p0^a + p1^a)^2 / (p0^{1-s} + p1^{1-s})], a = (1-r)/2"""
    a = 0.5 * (1.0 - np.asarray(r, dtype=float))
    with np.errstate(divide='ignore', invalid='ignore'):
        numerator = 2.0 * np.logaddexp(log_pow(lp0, a), log_pow(lp1, a))
        denominator = np.logaddexp(log_pow(lp0, 1.0 - s), log_pow(lp1, 1.0 - s))
        return (numerator - denominator) / (s - r)


def _per_channel(channel_set: ParallelChannelSet, config, log_f_fn) -> List[np.ndarray]:
    return [np.exp(log_f_fn(t.lp0, t.lp1)) for t in channel_set.tables(config)]


def gallager_cube_tilting(channel_set: ParallelChannelSet, rho: float, s: float, c: float,
                          config: Optional[QuadratureConfig] = None) -> List[np.ndarray]:
    """Unit-cube Gallager tilting f(y; j) on each channel table's outputs"""
    if not (0.0 < rho <= 1.0 and 0.0 < s <= 1.0 and 0.0 <= c <= 1.0):
        raise ValueError(f"(rho, s, c) must lie in the unit cube with rho, s > 0, got {(rho, s, c)}")
    return _per_channel(channel_set, config, lambda lp0, lp1: log_cube_tilting(lp0, lp1, rho, s, c))


def gallager_random_tilting(channel_set: ParallelChannelSet, r: float, s: float,
                            config: Optional[QuadratureConfig] = None) -> List[np.ndarray]:
    """
    Random-coding Gallager tilting f(y; j) with the scale factor dropped

    Raises:
        ValueError: unless r <= 0 <= s and s > r
    """
    if not (r <= 0.0 <= s and s > r):
        raise ValueError(f"Random-coding tilting needs r <= 0 <= s with s > r, got r={r}, s={s}")
    return _per_channel(channel_set, config, lambda lp0, lp1: log_random_tilting(lp0, lp1, r, s))


def gallager_sums(stack: ChannelStack, log_f: np.ndarray, r, s) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    alpha-averaged Gallager quantities for even tilting functions

    Args:
        log_f: (P, J, Y) ln f on the stacked outputs
        r, s: (P,) with r <= 0 <= s

    Returns:
        (ln Z_bar(r), ln G_bar(r), ln G_bar(s)), each (P,):
            Z(r) = sum_y (p0 p1)^{(1-r)/2} f^r
            G(x) = (1/2) sum_y (p0^{1-x} + p1^{1-x}) f^x
    """
    r3, s3 = as_column(r), as_column(s)
    a, b = stack.lp0[None], stack.lp1[None]
    half = 0.5 * (1.0 - r3)
    with np.errstate(invalid='ignore', over='ignore'):
        f_r = smul(r3, log_f)
        log_z = log_pow(a, half) + log_pow(b, half) + f_r
        log_gr = np.logaddexp(log_pow(a, 1.0 - r3), log_pow(b, 1.0 - r3)) - LN2 + f_r
        log_gs = np.logaddexp(log_pow(a, 1.0 - s3), log_pow(b, 1.0 - s3)) - LN2 + smul(s3, log_f)
        log_z = np.where(np.isnan(log_z), np.inf, log_z)
        return (
            stack.mix(stack.integrate(log_z)),
            stack.mix(stack.integrate(log_gr)),
            stack.mix(stack.integrate(log_gs)),
        )
