# src/bounds/sf.py - Shulman-Feder bounds and the modified SF (MSF) partition bound
"""
SF bounds compare the spectrum with the binomial (random-code) spectrum
through the maximal ratio

    max_h  A_h / (2^{-n(1-R)} C(n, h))

and bound the rest in closed form with

    I_j(rho) = sum_y [ (1/2) p0^{1/(1+rho)} + (1/2) p1^{1/(1+rho)} ]^{1+rho}

Two variants are offered: 'gallager78' (alpha-mixture inside, 2^{h(rho)} factor)
and 'ds2_81' (mixture of I_j^{1/rho}, no entropy factor, looser unless J = 1).

The MSF bound splits the weights: a union bound on psi_plus, the SF bound on
the weights psi_minus where the spectrum is close to binomial.
"""

import logging
import math
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from config.settings import CONFIG
from src.bounds.results import BoundResult, MsfPartition, SubcodeTerm
from src.bounds.stack import ChannelStack, as_column, channel_stack, log_pow
from src.bounds.subcode import BoundConfig
from src.bounds.union import log_avg_gamma, union_log_terms
from src.channels.information import avg_mutual_info
from src.channels.mbios import ParallelChannelSet
from src.core.errors import NonFiniteError
from src.numerics.logmath import LN2, LOG_ZERO, binary_entropy, log_binomial
from src.numerics.solvers import maximize_box
from src.spectra.iowe import DistanceSpectrum

SF_VARIANTS = ('gallager78', 'ds2_81')

_ROOT_FLOOR = 1e-15


def log_sf_tilting(stack: ChannelStack, rho) -> np.ndarray:
    """ln[(p0^{1/(1+rho)} + p1^{1/(1+rho)})/2]^{1+rho} on the stacked outputs; (P,) -> (P, J, Y)"""
    rho3 = as_column(rho)
    e = 1.0 / (1.0 + rho3)
    with np.errstate(invalid='ignore'):
        mixed = np.logaddexp(log_pow(stack.lp0[None], e), log_pow(stack.lp1[None], e)) - LN2
        return (1.0 + rho3) * mixed


def log_sf_integrals(stack: ChannelStack, rho) -> np.ndarray:
    """ln I_j(rho), shape (P, J)"""
    return stack.integrate(log_sf_tilting(stack, rho))


def spectral_ratio_terms(spectrum: DistanceSpectrum, target: str = 'block') -> np.ndarray:
    """ln A_h - ln(C(n, h) 2^{-n(1-R)}) for h = 0..n, LOG_ZERO where A_h = 0 and at h = 0"""
    n = spectrum.n
    h = np.arange(n + 1)
    log_mult = np.asarray(spectrum.multiplicities(target), dtype=float)
    reference = log_binomial(n, h) - n * (1.0 - spectrum.rate) * LN2
    ratio = np.where(np.isfinite(log_mult), log_mult - reference, LOG_ZERO)
    ratio[0] = LOG_ZERO
    return ratio


def max_spectral_ratio(spectrum: DistanceSpectrum, target: str = 'block', h_lo: int = 1,
                       h_hi: Optional[int] = None) -> float:
    """ln max_{h_lo <= h <= h_hi} A_h / (2^{-n(1-R)} C(n, h)); LOG_ZERO on an empty range"""
    h_hi = spectrum.n if h_hi is None else min(h_hi, spectrum.n)
    h_lo = max(h_lo, 1)
    if h_lo > h_hi:
        return LOG_ZERO
    return float(np.max(spectral_ratio_terms(spectrum, target)[h_lo:h_hi + 1]))


def sf_base(stack: ChannelStack, n: int, rate: float, rho, variant: str = 'gallager78') -> np.ndarray:
    """The SF bound without the ratio term rho * ln max_ratio; vectorized over rho"""
    if variant not in SF_VARIANTS:
        raise ValueError(f"Unknown SF variant '{variant}', expected one of {SF_VARIANTS}")
    rho = np.asarray(rho, dtype=float).reshape(-1)
    log_i = log_sf_integrals(stack, rho)
    with np.errstate(invalid='ignore', divide='ignore'):
        if variant == 'gallager78':
            return binary_entropy(rho) + n * rate * rho * LN2 + n * stack.mix(log_i)
        return n * rate * rho * LN2 + n * rho * stack.mix(log_i / rho[:, None])


def _minimize_rho(stack: ChannelStack, n: int, rate: float, log_ratio: float, variant: str,
                  config: BoundConfig) -> Tuple[float, float]:
    """(min over rho of the SF bound, argmin rho)"""
    grid = config.grid_for('sf')

    def objective(points: np.ndarray) -> np.ndarray:
        rho = points[:, 0]
        return -(sf_base(stack, n, rate, rho, variant) + rho * log_ratio)

    try:
        best = maximize_box(objective, [[config.rho_min, 1.0]], grid.coarse, grid.refine_rounds,
                            vectorized=True, chunk_points=config.chunk_points)
    except NonFiniteError:
        return math.inf, 1.0
    return -float(best.max), float(best.argmax[0])


def sf_bound(spectrum: DistanceSpectrum, channel_set: ParallelChannelSet, variant: str = 'gallager78',
             target: str = 'block', h_max: Optional[int] = None,
             config: Optional[BoundConfig] = None) -> BoundResult:
    """
    SF bound on the whole code, optimized over rho in [rho_min, 1]

    Args:
        variant: 'gallager78' or 'ds2_81'
    """
    config = config or BoundConfig.from_config()
    if variant not in SF_VARIANTS:
        raise ValueError(f"Unknown SF variant '{variant}', expected one of {SF_VARIANTS}")
    stack = channel_stack(channel_set, config.quadrature)
    n = spectrum.n
    log_ratio = max_spectral_ratio(spectrum, target, 1, h_max)
    if not math.isfinite(log_ratio):
        return BoundResult.from_terms('sf', [], target=target)

    value, rho = _minimize_rho(stack, n, spectrum.rate, log_ratio, variant, config)
    term = SubcodeTerm(h=None, log_value=value, method='sf',
                       params={"rho": rho, "log_max_ratio": log_ratio})
    logging.info(f"[SF] {variant} | n={n} | rho={rho:.4g} | log_max_ratio={log_ratio:.6g} | "
                 f"log10_P={value / math.log(10.0):.4f}")
    return BoundResult.from_terms('sf', [term], target=target)


# =============================================================================
# MSF
# =============================================================================

def msf_crossing_function(channel_set: ParallelChannelSet, config: Optional[BoundConfig] = None):
    """
    f(delta) = -delta ln gamma_bar - H(delta) + (1 - I_bar) ln 2

    Weights with f >= 0 go to the union bound. f is convex with its minimum
    at delta* = gamma_bar / (1 + gamma_bar).
    """
    config = config or BoundConfig.from_config()
    log_gamma = log_avg_gamma(channel_set, config.quadrature)
    info = avg_mutual_info(channel_set, config.quadrature)

    def crossing(delta):
        return -np.asarray(delta, dtype=float) * log_gamma - binary_entropy(delta) + (1.0 - info) * LN2

    gamma = math.exp(log_gamma)
    return crossing, gamma / (1.0 + gamma)


def msf_initial_range(channel_set: ParallelChannelSet, config: Optional[BoundConfig] = None
                      ) -> Optional[Tuple[float, float]]:
    """(delta_l0, delta_r0) where f changes sign, None when f >= 0 everywhere"""
    crossing, delta_star = msf_crossing_function(channel_set, config)
    if float(crossing(delta_star)) >= 0.0:
        return None

    def root(lo: float, hi: float, edge: float) -> float:
        if float(crossing(edge)) <= 0.0:
            return edge
        return float(brentq(lambda d: float(crossing(d)), lo, hi, xtol=1e-14))

    delta_l = root(_ROOT_FLOOR, delta_star, _ROOT_FLOOR)
    delta_r = root(delta_star, 1.0, 1.0)
    return delta_l, delta_r


def _union_outside(union: np.ndarray, h_lo: int, h_hi: int) -> List[SubcodeTerm]:
    return [SubcodeTerm(h=h, log_value=float(union[h]), method='union')
            for h in range(1, len(union)) if (h < h_lo or h > h_hi) and math.isfinite(union[h])]


def msf_bound(spectrum: DistanceSpectrum, channel_set: ParallelChannelSet, finite_length: bool = True,
              target: str = 'block', config: Optional[BoundConfig] = None) -> Tuple[BoundResult, MsfPartition]:
    """
    MSF bound: union terms on psi_plus, SF bound on psi_minus = [h_lo, h_hi]

    The initial range comes from the sign of msf_crossing_function. With
    finite_length, h_lo is moved through [h_lo0, h_hi] and the partition
    minimizing the total is kept.
    """
    config = config or BoundConfig.from_config()
    n = spectrum.n
    union = union_log_terms(spectrum.multiplicities(target), channel_set, config.quadrature)

    initial = msf_initial_range(channel_set, config)
    h_lo0 = h_hi = 0
    if initial is not None:
        h_lo0 = max(1, math.ceil(initial[0] * n))
        h_hi = min(n, math.floor(initial[1] * n))
    if initial is None or h_lo0 > h_hi:
        logging.info(f"[MSF] No crossing of the partition rule | n={n} | using the union bound")
        result = BoundResult.from_terms('msf', _union_outside(union, 1, 0), target=target)
        return result, MsfPartition.all_union(n)

    stack = channel_stack(channel_set, config.quadrature)
    variant = config.sf_variant
    ratios = spectral_ratio_terms(spectrum, target)

    def total_for(h_lo: int) -> Tuple[float, float, float]:
        log_ratio = float(np.max(ratios[h_lo:h_hi + 1]))
        if not math.isfinite(log_ratio):
            sf_value, rho = LOG_ZERO, 1.0
        else:
            sf_value, rho = _minimize_rho(stack, n, spectrum.rate, log_ratio, variant, config)
        outside = [t.log_value for t in _union_outside(union, h_lo, h_hi)]
        return float(np.logaddexp.reduce(outside + [sf_value])), sf_value, rho

    best_lo = h_lo0
    if finite_length and h_hi > h_lo0:
        best_lo = _rank_candidates(stack, n, spectrum.rate, union, ratios, h_lo0, h_hi, variant, config)

    total, sf_value, rho = total_for(best_lo)
    if best_lo != h_lo0:
        base_total, base_sf, base_rho = total_for(h_lo0)
        if base_total <= total:
            best_lo, total, sf_value, rho = h_lo0, base_total, base_sf, base_rho

    terms = _union_outside(union, best_lo, h_hi)
    terms.append(SubcodeTerm(h=None, log_value=sf_value, method='sf',
                             params={"rho": rho, "h_lo": float(best_lo), "h_hi": float(h_hi)}))
    partition = MsfPartition.from_range(n, best_lo, h_hi, best_lo / n, h_hi / n)
    result = BoundResult.from_terms('msf', terms, target=target)
    logging.info(
        f"[MSF] n={n} | psi_minus=[{best_lo}, {h_hi}] | initial_h_lo={h_lo0} | "
        f"rho={rho:.4g} | log10_P={result.log10_total:.4f}"
    )
    return result, partition


def _rank_candidates(stack: ChannelStack, n: int, rate: float, union: np.ndarray, ratios: np.ndarray,
                     h_lo0: int, h_hi: int, variant: str, config: BoundConfig) -> int:
    """h_lo in [h_lo0, h_hi] minimizing the total on a dense rho grid"""
    rho = np.linspace(config.rho_min, 1.0, int(CONFIG.get('bounds.sf.dense_points', 201)))
    base = sf_base(stack, n, rate, rho, variant)

    candidates = np.arange(h_lo0, h_hi + 1)
    # suffix maximum of the ratio over [h_lo, h_hi]
    window = ratios[h_lo0:h_hi + 1]
    suffix_max = np.maximum.accumulate(window[::-1])[::-1]
    with np.errstate(invalid='ignore'):
        sf_part = base[None, :] + rho[None, :] * suffix_max[:, None]
    sf_part = np.where(np.isneginf(suffix_max)[:, None], LOG_ZERO, sf_part)
    sf_best = np.min(np.where(np.isnan(sf_part), np.inf, sf_part), axis=1)

    finite_union = np.where(np.isfinite(union), union, LOG_ZERO)
    finite_union[0] = LOG_ZERO
    # union mass below h_lo: prefix sums over 1..h_lo-1
    prefix = np.logaddexp.accumulate(finite_union)
    below = prefix[candidates - 1]
    above = np.logaddexp.reduce(finite_union[h_hi + 1:]) if h_hi < n else LOG_ZERO
    totals = np.logaddexp(np.logaddexp(below, above), sf_best)
    best = int(candidates[int(np.argmin(totals))])
    logging.debug(f"[MSF] Candidate ranking | h_lo in [{h_lo0}, {h_hi}] | best={best}")
    return best
