# src/bounds/ds2.py - Generalized DS2 bound over parallel channels with optimized tilting
"""
Per-subcode DS2 bound:

    ln P_h <= rho ln A_h + n rho [delta ln T1_bar + (1 - delta) ln T2_bar],  delta = h/n

with T1_bar, T2_bar the alpha-mixtures of the tilted channel sums and the
tilting constant k solved at every (lambda, rho) node. The optimization runs
on the unit square (lambda', rho), lambda = lambda'/(1 - lambda').
"""

import logging
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.bounds.results import BoundResult
from src.bounds.stack import ChannelStack, channel_stack, smul
from src.bounds.subcode import BoundConfig, SubcodeEvaluator, optimize_subcode, run_subcode_chain
from src.bounds.tilting import FixedPointConfig, ds2_mixtures, solve_log_k
from src.channels.mbios import ParallelChannelSet
from src.numerics.logmath import LOG_ZERO
from src.spectra.iowe import DistanceSpectrum

# lambda' = 1/3 is lambda = 1/2: with rho = 1 the bound is A_h gamma_bar^h
FALLBACK_POINT = (1.0 / 3.0, 1.0)


def lambda_from_prime(lam_prime):
    lam_prime = np.asarray(lam_prime, dtype=float)
    return lam_prime / (1.0 - lam_prime)


def ds2_log_terms(stack: ChannelStack, delta: float, lam, rho,
                  fp: Optional[FixedPointConfig] = None) -> Tuple[np.ndarray, np.ndarray]:
    """(ln T1_bar, ln T2_bar) at the optimized tilting constant, batched over (lambda, rho)"""
    log_k, bracketed = solve_log_k(stack, delta, lam, rho, fp)
    if bracketed:
        logging.debug(f"[DS2] {bracketed} tilting constants bracketed | delta={delta:.6g}")
    log_t1, log_t2, _ = ds2_mixtures(stack, lam, rho, log_k)
    return log_t1, log_t2


class Ds2Subcode(SubcodeEvaluator):
    """DS2 subcode optimizer on (lambda', rho) in [0, lambda'_max] x [rho_min, 1]"""
    kind = 'ds2'
    tag = 'DS2'

    def __init__(self, n: int, channel_set: ParallelChannelSet, config: BoundConfig):
        super().__init__(n, config)
        self.stack = channel_stack(channel_set, config.quadrature)

    def box(self) -> List[List[float]]:
        return [[0.0, self.config.lambda_prime_max], [self.config.rho_min, 1.0]]

    def fallback_point(self) -> np.ndarray:
        return np.array(FALLBACK_POINT)

    def params(self, point: np.ndarray) -> Dict[str, float]:
        return {"lambda": float(lambda_from_prime(point[0])), "rho": float(point[1])}

    def log_bound(self, log_ah: float, h: int, lam, rho) -> np.ndarray:
        delta = h / self.n
        rho = np.asarray(rho, dtype=float)
        log_t1, log_t2 = ds2_log_terms(self.stack, delta, lam, rho, self.config.fixed_point)
        with np.errstate(invalid='ignore'):
            exponent = smul(delta, log_t1) + smul(1.0 - delta, log_t2)
            return rho * (log_ah + self.n * exponent)

    def objective(self, log_ah: float, h: int):
        def evaluate(points: np.ndarray) -> np.ndarray:
            value = self.log_bound(log_ah, h, lambda_from_prime(points[:, 0]), points[:, 1])
            return -np.where(np.isnan(value), np.inf, value)
        return evaluate


def ds2_subcode_bound(log_ah: float, h: int, n: int, channel_set: ParallelChannelSet,
                      config: Optional[BoundConfig] = None) -> Tuple[float, float, float]:
    """
    Optimized DS2 bound on one constant-weight subcode

    Args:
        log_ah: ln A_h (finite)
        h: Hamming weight, 1 <= h <= n
        n: block length

    Returns:
        (ln bound, lambda*, rho*)
    """
    if not 1 <= h <= n:
        raise ValueError(f"Subcode weight must satisfy 1 <= h <= n, got h={h}, n={n}")
    if not np.isfinite(log_ah):
        raise ValueError(f"ln A_h must be finite, got {log_ah}")
    config = config or BoundConfig.from_config()
    term, _, _ = optimize_subcode(Ds2Subcode(n, channel_set, config), log_ah, h)
    return term.log_value, term.params["lambda"], term.params["rho"]


def ds2_bound(spectrum: DistanceSpectrum, channel_set: ParallelChannelSet, target: str = 'block',
              h_max: Optional[int] = None, config: Optional[BoundConfig] = None,
              union_log: Optional[np.ndarray] = None) -> BoundResult:
    """Sum of optimized DS2 subcode bounds over h = 1..h_max"""
    config = config or BoundConfig.from_config()
    evaluator = Ds2Subcode(spectrum.n, channel_set, config)
    return run_subcode_chain(evaluator, spectrum.multiplicities(target), spectrum.support(h_max),
                             union_log=union_log, target=target)


def ds2_whole_code(spectrum: DistanceSpectrum, channel_set: ParallelChannelSet, lam: float, rho: float,
                   delta: float, target: str = 'block', config: Optional[BoundConfig] = None) -> float:
    """
    ln of the single-measure DS2 bound {sum_h A_h T1_bar^h T2_bar^(n-h)}^rho

    One tilting measure serves every weight; its constant k is the one
    optimal for normalized weight delta.
    """
    if lam < 0.0 or not 0.0 < rho <= 1.0:
        raise ValueError(f"DS2 needs lambda >= 0 and 0 < rho <= 1, got lambda={lam}, rho={rho}")
    config = config or BoundConfig.from_config()
    stack = channel_stack(channel_set, config.quadrature)
    log_t1, log_t2 = ds2_log_terms(stack, delta, [lam], [rho], config.fixed_point)
    n = spectrum.n
    support = spectrum.support()
    log_mult = spectrum.multiplicities(target)[support]
    terms = log_mult + support * log_t1[0] + (n - support) * log_t2[0]
    total = float(np.logaddexp.reduce(terms)) if terms.size else LOG_ZERO
    return rho * total
