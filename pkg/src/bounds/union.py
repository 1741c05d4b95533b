# src/bounds/union.py - Union bounds: exact Q-form (Craig) and Bhattacharyya form
import logging
import math
from typing import Optional

import numpy as np
from scipy.special import logsumexp

from src.bounds.results import BoundResult, SubcodeTerm
from src.channels.information import bhattacharyya
from src.channels.mbios import ChannelKind, ParallelChannelSet
from src.core.errors import UnsupportedChannelError
from src.numerics.logmath import LOG_ZERO
from src.numerics.quadrature import QuadratureConfig, legendre_interval
from src.spectra.iowe import DistanceSpectrum

LOG_PI = math.log(math.pi)


def channel_log_gammas(channel_set: ParallelChannelSet, config: Optional[QuadratureConfig] = None) -> np.ndarray:
    """ln gamma_j; BIAWGN uses the closed form -nu_j"""
    values = []
    for channel in channel_set.channels:
        if channel.kind is ChannelKind.BIAWGN:
            values.append(-channel.parameter)
        else:
            gamma = bhattacharyya(channel, config)
            values.append(math.log(gamma) if gamma > 0 else LOG_ZERO)
    return np.array(values)


def log_avg_gamma(channel_set: ParallelChannelSet, config: Optional[QuadratureConfig] = None) -> float:
    """ln sum_j alpha_j gamma_j"""
    log_alphas = channel_set.log_alphas
    live = np.isfinite(log_alphas)
    return float(logsumexp(log_alphas[live] + channel_log_gammas(channel_set, config)[live]))


def _mask(log_mult: np.ndarray, terms: np.ndarray) -> np.ndarray:
    out = np.where(np.isfinite(log_mult), log_mult + terms, LOG_ZERO)
    out[0] = LOG_ZERO
    return out


def bhattacharyya_log_terms(log_mult: np.ndarray, channel_set: ParallelChannelSet,
                            config: Optional[QuadratureConfig] = None) -> np.ndarray:
    """ln(A_h gamma_bar^h) for h = 0..n (h = 0 excluded)"""
    h = np.arange(len(log_mult), dtype=float)
    return _mask(np.asarray(log_mult, dtype=float), h * log_avg_gamma(channel_set, config))


def union_q_log_terms(log_mult: np.ndarray, channel_set: ParallelChannelSet,
                      config: Optional[QuadratureConfig] = None) -> np.ndarray:
    """
    ln of the exact pairwise terms (1/pi) int_0^{pi/2} A_h [sum_j alpha_j e^{-nu_j/sin^2 theta}]^h d theta

    Raises:
        UnsupportedChannelError: some channel is not BIAWGN
    """
    if not channel_set.all_biawgn:
        raise UnsupportedChannelError("The Q-form union bound needs BIAWGN channels only")
    config = config or QuadratureConfig.from_config()

    theta, weights = legendre_interval(0.0, 0.5 * math.pi, config.theta_nodes)
    inv_sin2 = 1.0 / np.sin(theta) ** 2
    log_alphas = channel_set.log_alphas
    live = np.isfinite(log_alphas)
    mixture = logsumexp(log_alphas[live][None, :] - channel_set.nus[live][None, :] * inv_sin2[:, None], axis=1)

    h = np.arange(len(log_mult), dtype=float)
    pairwise = logsumexp(np.log(weights)[None, :] + h[:, None] * mixture[None, :], axis=1) - LOG_PI
    return _mask(np.asarray(log_mult, dtype=float), pairwise)


def union_log_terms(log_mult: np.ndarray, channel_set: ParallelChannelSet,
                    config: Optional[QuadratureConfig] = None) -> np.ndarray:
    """Tightest available union terms: Q-form on BIAWGN sets, Bhattacharyya otherwise"""
    if channel_set.all_biawgn:
        return union_q_log_terms(log_mult, channel_set, config)
    return bhattacharyya_log_terms(log_mult, channel_set, config)


def _result(kind: str, terms: np.ndarray, spectrum: DistanceSpectrum, target: str,
            h_max: Optional[int]) -> BoundResult:
    support = spectrum.support(h_max)
    per_subcode = [SubcodeTerm(h=int(h), log_value=float(terms[h]), method=kind) for h in support]
    result = BoundResult.from_terms(kind, per_subcode, target=target)
    logging.debug(f"[UNION] {kind} | subcodes={len(per_subcode)} | log10_P={result.log10_total:.4f}")
    return result


def union_bound_q(spectrum: DistanceSpectrum, channel_set: ParallelChannelSet, target: str = 'block',
                  h_max: Optional[int] = None, config: Optional[QuadratureConfig] = None) -> BoundResult:
    """Exact union bound over parallel BIAWGN channels (Craig's identity, Gauss-Legendre in theta)"""
    terms = union_q_log_terms(spectrum.multiplicities(target), channel_set, config)
    return _result('union-q', terms, spectrum, target, h_max)


def union_bhattacharyya(spectrum: DistanceSpectrum, channel_set: ParallelChannelSet, target: str = 'block',
                        h_max: Optional[int] = None, config: Optional[QuadratureConfig] = None) -> BoundResult:
    """sum_h A_h gamma_bar^h"""
    terms = bhattacharyya_log_terms(spectrum.multiplicities(target), channel_set, config)
    return _result('ub', terms, spectrum, target, h_max)
