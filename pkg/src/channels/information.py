# src/channels/information.py - Bhattacharyya constants, capacity, cutoff rate, mutual information
import logging
import math
from typing import Sequence

import numpy as np
from scipy.special import erfc, erfcx

from src.channels.mbios import ChannelKind, MbiosChannel, ParallelChannelSet
from src.core.errors import BadBracketError, InfeasibleError
from src.numerics.logmath import LN2, binary_entropy_bits, db_to_linear, linear_to_db
from src.numerics.quadrature import QuadratureConfig
from src.numerics.solvers import bisect

SERIES_TERMS = 30
_SOLVE_TOL_DB = 1e-6


def q_function(x):
    """Gaussian tail Q(x)"""
    return 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))


# =============================================================================
# BHATTACHARYYA / CUTOFF RATE
# =============================================================================

def bhattacharyya(channel: MbiosChannel, config: QuadratureConfig = None) -> float:
    """gamma = sum_y sqrt(p(y|0) p(y|1)); BIAWGN is cross-checked against exp(-nu)"""
    table = channel.table(config)
    gamma = float(np.sum(np.exp(table.log_w + 0.5 * (table.lp0 + table.lp1))))

    if channel.kind is ChannelKind.BIAWGN:
        closed = math.exp(-channel.parameter)
        if abs(gamma - closed) > 1e-8:
            logging.warning(
                f"[CHANNEL] Bhattacharyya quadrature drift | nu={channel.parameter:.6g} | "
                f"quadrature={gamma:.12g} | closed_form={closed:.12g}"
            )
    return gamma


def avg_bhattacharyya(channel_set: ParallelChannelSet, config: QuadratureConfig = None) -> float:
    """gamma_bar = sum_j alpha_j gamma_j"""
    return float(sum(a * bhattacharyya(ch, config) for a, ch in zip(channel_set.alphas, channel_set.channels)))


def cutoff_rate(channel_set: ParallelChannelSet, config: QuadratureConfig = None) -> float:
    """R0 = 1 - log2(1 + gamma_bar) in bits per channel use"""
    return 1.0 - math.log2(1.0 + avg_bhattacharyya(channel_set, config))


def solve_cutoff_ebno2(rate: float, ebno1_db: float, alphas: Sequence[float]) -> float:
    """
    (Eb/N0)_2 in dB at which two parallel BIAWGN channels reach R0 = rate

    Closed form: Eb/N0_2 = -(1/R) ln((2^{1-R} - 1 - a1 exp(-R Eb/N0_1)) / a2), linear units.

    Raises:
        InfeasibleError: channel 1 is too noisy for any second channel to reach R0 = rate
    """
    a1, a2 = float(alphas[0]), float(alphas[1])
    if not 0.0 < rate < 1.0:
        raise ValueError(f"Rate must lie in (0, 1), got {rate}")
    gamma1 = 0.0 if math.isinf(ebno1_db) and ebno1_db > 0 else math.exp(-rate * db_to_linear(ebno1_db))
    numerator = 2.0 ** (1.0 - rate) - 1.0 - a1 * gamma1

    if numerator <= 0.0 or a2 <= 0.0:
        raise InfeasibleError(
            f"cutoff target R={rate:.6g} unreachable: 2^(1-R) - 1 - a1*gamma1 = {numerator:.6g}"
        )

    argument = numerator / a2
    if argument >= 1.0:
        logging.info(f"[CHANNEL] Cutoff target met with a useless second channel | ebno1={ebno1_db} dB")
        return -math.inf

    ebno2 = -math.log(argument) / rate
    return linear_to_db(ebno2)


# =============================================================================
# CAPACITY
# =============================================================================

def _capacity_quadrature(channel: MbiosChannel, config: QuadratureConfig = None) -> float:
    # C = 1 - sum_y p(y|0) log2(1 + p(y|1)/p(y|0))
    table = channel.table(config)
    support = table.p0_support
    terms = np.exp(table.log_w[support] + table.lp0[support]) * np.logaddexp(0.0, table.llr)
    return float(1.0 - np.sum(terms) / LN2)


def _capacity_series(channel: MbiosChannel) -> float:
    """BIAWGN capacity from the Euler-transformed alternating series (first 30 terms)"""
    if channel.kind is not ChannelKind.BIAWGN:
        raise ValueError("The series form of the capacity applies to BIAWGN channels only")

    beta = channel.beta
    envelope = 0.5 * math.exp(-beta ** 2 / 2.0)
    k = np.arange(SERIES_TERMS + 1)
    # a_i = (1/2) e^{-beta^2/2} erfcx((2i+3) beta / sqrt 2) / ((i+1)(i+2))
    a = envelope * erfcx((2 * k + 3) * beta / math.sqrt(2.0)) / ((k + 1.0) * (k + 2.0))

    euler = 0.0
    for order in range(SERIES_TERMS):
        m = np.arange(order + 1)
        signs = (-1.0) ** m
        binoms = np.array([math.comb(order, int(i)) for i in m], dtype=float)
        delta = float(np.sum(signs * binoms * a[order - m]))
        euler += (-1.0) ** order * delta / 2.0 ** (order + 1)

    gaussian = 2.0 * beta * math.exp(-beta ** 2 / 2.0) / math.sqrt(2.0 * math.pi)
    expectation = gaussian - (2.0 * beta ** 2 - 1.0) * float(q_function(beta)) + euler
    return 1.0 - expectation / LN2


def capacity(channel: MbiosChannel, method: str = 'quadrature', config: QuadratureConfig = None) -> float:
    """
    Capacity of one MBIOS channel in bits per channel use

    Args:
        method: 'quadrature' (any kind) or 'series' (BIAWGN only)
    """
    if method == 'series':
        return _capacity_series(channel)
    if method != 'quadrature':
        raise ValueError(f"Unknown capacity method '{method}'")
    if channel.kind is ChannelKind.BSC:
        return 1.0 - float(binary_entropy_bits(channel.parameter))
    if channel.kind is ChannelKind.BEC:
        return 1.0 - channel.parameter
    return _capacity_quadrature(channel, config)


def avg_capacity(channel_set: ParallelChannelSet, config: QuadratureConfig = None) -> float:
    """C = sum_j alpha_j C_j"""
    return float(sum(a * capacity(ch, config=config) for a, ch in zip(channel_set.alphas, channel_set.channels)))


def capacity_limit_ebno_db(rate: float, config: QuadratureConfig = None) -> float:
    """Smallest Eb/N0 (dB) at which a single BIAWGN channel has capacity >= rate"""
    def meets(ebno_db: float) -> bool:
        return capacity(MbiosChannel.biawgn_from_ebno_db(ebno_db, rate), config=config) >= rate

    return bisect(meets, -20.0, 40.0, _SOLVE_TOL_DB)


def solve_capacity_ebno2(rate: float, ebno1_db: float, alphas: Sequence[float],
                         config: QuadratureConfig = None) -> float:
    """
    (Eb/N0)_2 in dB at which a1 C_1 + a2 C_2 = rate for two BIAWGN channels

    Raises:
        InfeasibleError: a1 C_1 >= rate already, or the target needs C_2 >= 1
    """
    a1, a2 = float(alphas[0]), float(alphas[1])
    c1 = 1.0 if math.isinf(ebno1_db) and ebno1_db > 0 else \
        capacity(MbiosChannel.biawgn_from_ebno_db(ebno1_db, rate), config=config)

    if a1 * c1 >= rate:
        raise InfeasibleError(f"a1*C1 = {a1 * c1:.6g} already meets rate {rate:.6g}")
    if a2 <= 0.0 or (rate - a1 * c1) / a2 >= 1.0:
        raise InfeasibleError(f"rate {rate:.6g} needs C2 >= 1 at ebno1={ebno1_db} dB")

    def meets(ebno2_db: float) -> bool:
        c2 = capacity(MbiosChannel.biawgn_from_ebno_db(ebno2_db, rate), config=config)
        return a1 * c1 + a2 * c2 >= rate

    try:
        return bisect(meets, -40.0, 60.0, _SOLVE_TOL_DB)
    except BadBracketError as e:
        raise InfeasibleError(f"capacity target not bracketed on [-40, 60] dB: {e}") from e


# =============================================================================
# MUTUAL INFORMATION (equiprobable inputs)
# =============================================================================

def _mutual_info(channel: MbiosChannel, config: QuadratureConfig = None) -> float:
    outputs, weights = channel.output_grid(config)
    lp0 = channel.log_density(outputs, 0)
    lp1 = channel.log_density(outputs, 1)
    log_mix = np.logaddexp(lp0, lp1) - LN2

    total = 0.0
    for lp in (lp0, lp1):
        support = np.isfinite(lp)
        total += 0.5 * np.sum(weights[support] * np.exp(lp[support]) * (lp[support] - log_mix[support]))
    return float(total / LN2)


def avg_mutual_info(channel_set: ParallelChannelSet, config: QuadratureConfig = None) -> float:
    """I_bar = sum_j alpha_j I(X;Y_j) with equiprobable binary inputs, in bits"""
    return float(sum(a * _mutual_info(ch, config) for a, ch in zip(channel_set.alphas, channel_set.channels)))
