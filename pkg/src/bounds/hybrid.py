# src/bounds/hybrid.py - Tightened Gallager/DS2 hybrid bound
"""
For un-normalized measures g(y; j), with per-channel sums

    gs_j = sum_y p0 g,   v_j = sum_y p0^{1-lambda} p1^lambda g^{1-1/rho},   gr_j = sum_y p0 g^{1-1/rho}

the subcode bound

    h2(rho) ln 2 + rho [ln A_h + h ln sum_j alpha_j v_j + (n - h) ln sum_j alpha_j gr_j]
                 + n (1 - rho) ln sum_j alpha_j gs_j

never exceeds its Jensen form, where every v_j and gr_j is first scaled by
gs_j^{(1-rho)/rho} inside the mixture (the DS2 bound plus h2(rho) ln 2). The
two coincide when gs_j does not depend on j.
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.bounds.ds2 import FALLBACK_POINT, lambda_from_prime
from src.bounds.results import BoundResult
from src.bounds.stack import ChannelStack, as_column, channel_stack, log_pow, smul
from src.bounds.subcode import BoundConfig, SubcodeEvaluator, run_subcode_chain
from src.bounds.tilting import ds2_channel_sums, solve_log_k
from src.channels.mbios import ParallelChannelSet
from src.numerics.logmath import binary_entropy
from src.spectra.iowe import DistanceSpectrum


def hybrid_forms(stack: ChannelStack, log_ah: float, h: int, n: int, rho,
                 log_gs: np.ndarray, log_v: np.ndarray, log_gr: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    (tight form, Jensen form) from per-channel sums of shape (P, J)

    Both include the 2^{h(rho)} factor.
    """
    rho = np.asarray(rho, dtype=float).reshape(-1)
    rho2 = rho[:, None]
    entropy = binary_entropy(rho)
    with np.errstate(invalid='ignore', over='ignore'):
        tight = (entropy + rho * (log_ah + h * stack.mix(log_v) + smul(n - h, stack.mix(log_gr)))
                 + smul(n * (1.0 - rho), stack.mix(log_gs)))
        scale = smul((1.0 - rho2) / rho2, log_gs)
        jensen = entropy + rho * (log_ah + h * stack.mix(log_v + scale)
                                  + smul(n - h, stack.mix(log_gr + scale)))
    return tight, jensen


def measure_sums(stack: ChannelStack, log_g: np.ndarray, lam, rho) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Per-channel sums of an arbitrary measure g given on the stacked outputs

    Args:
        log_g: (J, Y) ln g, finite wherever p(y|0) > 0
        lam, rho: (P,) parameter vectors

    Returns:
        (log_gs, log_v, log_gr), each (P, J)
    """
    lam3, rho3 = as_column(lam), as_column(rho)
    a, b = stack.lp0[None], stack.lp1[None]
    g = log_g[None]
    with np.errstate(invalid='ignore'):
        g_r = smul(1.0 - 1.0 / rho3, g)
        log_gs = stack.integrate(np.where(stack.forward, a + g, -np.inf))
        log_v = stack.integrate(np.where(stack.forward, log_pow(a, 1.0 - lam3) + log_pow(b, lam3) + g_r, -np.inf))
        log_gr = stack.integrate(np.where(stack.forward, a + g_r, -np.inf))
    return log_gs, log_v, log_gr


def hybrid_subcode_value(log_ah: float, h: int, n: int, channel_set: ParallelChannelSet, lam: float,
                         rho: float, log_g: Optional[Sequence[np.ndarray]] = None,
                         config: Optional[BoundConfig] = None) -> Tuple[float, float]:
    """
    (tight, Jensen) forms at one (lambda, rho)

    Args:
        log_g: ln g(y; j) per channel on its table outputs; default is the
            DS2 measure with k optimal for delta = h/n
    """
    if lam < 0.0 or not 0.0 < rho <= 1.0:
        raise ValueError(f"Hybrid bound needs lambda >= 0 and 0 < rho <= 1, got lambda={lam}, rho={rho}")
    config = config or BoundConfig.from_config()
    stack = channel_stack(channel_set, config.quadrature)
    if log_g is None:
        log_k, _ = solve_log_k(stack, h / n, [lam], [rho], config.fixed_point)
        sums = ds2_channel_sums(stack, [lam], [rho], log_k)
    else:
        sums = measure_sums(stack, stack.pad([np.asarray(x, dtype=float) for x in log_g]), [lam], [rho])
    tight, jensen = hybrid_forms(stack, log_ah, h, n, [rho], *sums)
    return float(tight[0]), float(jensen[0])


class HybridSubcode(SubcodeEvaluator):
    """Hybrid subcode optimizer over the DS2 parameter square, min of both forms at every node"""
    kind = 'hybrid67'
    tag = 'HYBRID'
    section = 'ds2'

    def __init__(self, n: int, channel_set: ParallelChannelSet, config: BoundConfig):
        super().__init__(n, config)
        self.stack = channel_stack(channel_set, config.quadrature)

    def box(self) -> List[List[float]]:
        return [[0.0, self.config.lambda_prime_max], [self.config.rho_min, 1.0]]

    def fallback_point(self) -> np.ndarray:
        return np.array(FALLBACK_POINT)

    def params(self, point: np.ndarray) -> Dict[str, float]:
        return {"lambda": float(lambda_from_prime(point[0])), "rho": float(point[1])}

    def objective(self, log_ah: float, h: int):
        def evaluate(points: np.ndarray) -> np.ndarray:
            lam, rho = lambda_from_prime(points[:, 0]), points[:, 1]
            log_k, _ = solve_log_k(self.stack, h / self.n, lam, rho, self.config.fixed_point)
            sums = ds2_channel_sums(self.stack, lam, rho, log_k)
            tight, jensen = hybrid_forms(self.stack, log_ah, h, self.n, rho, *sums)
            value = np.fmin(tight, jensen)
            return -np.where(np.isnan(value), np.inf, value)
        return evaluate


def hybrid_bound_67(spectrum: DistanceSpectrum, channel_set: ParallelChannelSet, target: str = 'block',
                    h_max: Optional[int] = None, config: Optional[BoundConfig] = None,
                    union_log: Optional[np.ndarray] = None) -> BoundResult:
    """Sum of optimized hybrid subcode bounds with the DS2-optimal measures"""
    config = config or BoundConfig.from_config()
    evaluator = HybridSubcode(spectrum.n, channel_set, config)
    result = run_subcode_chain(evaluator, spectrum.multiplicities(target), spectrum.support(h_max),
                               union_log=union_log, target=target)
    logging.debug(f"[HYBRID] J={channel_set.J} | subcodes={len(result.per_subcode)}")
    return result
