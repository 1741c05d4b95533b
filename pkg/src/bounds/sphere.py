# src/bounds/sphere.py - Parallel-channel simplified sphere bound (BIAWGN)
import math
from typing import Dict, List, Optional

import numpy as np
from scipy.special import logsumexp

from src.bounds.results import BoundResult
from src.bounds.subcode import BoundConfig, SubcodeEvaluator, run_subcode_chain
from src.channels.mbios import ParallelChannelSet
from src.core.errors import UnsupportedChannelError
from src.spectra.iowe import DistanceSpectrum


class SphereSubcode(SubcodeEvaluator):
    """
    Per-subcode sphere bound, ln of

        {A_h [sum_j alpha_j exp(-beta nu_j)]^h beta^{-n/2}}^rho ((1-rho)/(1-beta rho))^{n(1-rho)/2}

    over rho in [rho_min, 1] and beta = 1 + u (1/rho - 1), u in [0, 1].
    """
    kind = 'sphere'
    tag = 'SPHERE'

    def __init__(self, n: int, channel_set: ParallelChannelSet, config: BoundConfig):
        super().__init__(n, config)
        if not channel_set.all_biawgn:
            raise UnsupportedChannelError("The sphere bound is defined for BIAWGN channels only")
        live = np.isfinite(channel_set.log_alphas)
        self.log_alphas = channel_set.log_alphas[live]
        self.nus = channel_set.nus[live]

    def box(self) -> List[List[float]]:
        return [[self.config.rho_min, 1.0], [0.0, 1.0]]

    def fallback_point(self) -> np.ndarray:
        return np.array([1.0, 0.0])

    def params(self, point: np.ndarray) -> Dict[str, float]:
        rho, u = float(point[0]), float(point[1])
        return {"rho": rho, "beta": 1.0 + u * (1.0 / rho - 1.0)}

    def objective(self, log_ah: float, h: int):
        n = self.n

        def evaluate(points: np.ndarray) -> np.ndarray:
            rho, u = points[:, 0], points[:, 1]
            beta = 1.0 + u * (1.0 / rho - 1.0)
            mixture = logsumexp(self.log_alphas[None, :] - beta[:, None] * self.nus[None, :], axis=1)
            inner = log_ah + h * mixture - 0.5 * n * np.log(beta)
            slack = 1.0 - beta * rho
            with np.errstate(divide='ignore', invalid='ignore'):
                ratio = np.where(rho < 1.0, 0.5 * n * (1.0 - rho) * (np.log1p(-rho) - np.log(slack)), 0.0)
            value = rho * inner + ratio
            value = np.where((slack <= 0.0) & (rho < 1.0), np.inf, value)
            return -value

        return evaluate


def sphere_bound(spectrum: DistanceSpectrum, channel_set: ParallelChannelSet, target: str = 'block',
                 h_max: Optional[int] = None, config: Optional[BoundConfig] = None,
                 union_log: Optional[np.ndarray] = None) -> BoundResult:
    """
    Sum of per-subcode sphere bounds

    Raises:
        UnsupportedChannelError: some channel is not BIAWGN
    """
    config = config or BoundConfig.from_config()
    evaluator = SphereSubcode(spectrum.n, channel_set, config)
    log_mult = spectrum.multiplicities(target)
    return run_subcode_chain(evaluator, log_mult, spectrum.support(h_max), union_log=union_log, target=target)


def sphere_whole_code(spectrum: DistanceSpectrum, channel_set: ParallelChannelSet, rho: float, beta: float,
                      target: str = 'block') -> float:
    """ln of the whole-code sphere bound at fixed (rho, beta)"""
    if not (0.0 < rho <= 1.0 and 1.0 <= beta and (beta * rho < 1.0 or rho == 1.0)):
        raise ValueError(f"Sphere bound needs 0 < rho <= 1 and 1 <= beta < 1/rho, got rho={rho}, beta={beta}")
    if not channel_set.all_biawgn:
        raise UnsupportedChannelError("The sphere bound is defined for BIAWGN channels only")
    n = spectrum.n
    log_mult = spectrum.multiplicities(target)
    live = np.isfinite(channel_set.log_alphas)
    mixture = float(logsumexp(channel_set.log_alphas[live] - beta * channel_set.nus[live]))
    support = spectrum.support()
    inner = float(logsumexp(log_mult[support] + support * mixture)) - 0.5 * n * math.log(beta)
    tail = 0.0 if rho == 1.0 else 0.5 * n * (1.0 - rho) * (math.log1p(-rho) - math.log(1.0 - beta * rho))
    return rho * inner + tail
