# src/bounds/gallager.py - Generalized 1961 Gallager bound over parallel channels
"""
Per-subcode bound with even tilting functions f(y; j):

    ln P_h <= h2(rho) ln 2 + rho ln A_h + h rho ln Z_bar + (n - h) rho ln G_bar(r)
              + n (1 - rho) ln G_bar(s),      r = s (1 - 1/rho)

minimized over the unit-cube tilting family (rho, s, c). The r = 0 face
(rho = 1) is the Bhattacharyya union term and serves as the fallback.
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import logsumexp

from src.bounds.results import BoundResult
from src.bounds.sf import log_sf_tilting
from src.bounds.stack import as_column, channel_stack, smul
from src.bounds.subcode import BoundConfig, SubcodeEvaluator, optimize_subcode, run_subcode_chain
from src.bounds.tilting import gallager_sums, log_cube_tilting
from src.channels.mbios import ParallelChannelSet
from src.numerics.logmath import binary_entropy
from src.spectra.iowe import DistanceSpectrum


def gallager_r(rho, s):
    """r from rho = s/(s - r)"""
    rho = np.asarray(rho, dtype=float)
    return np.asarray(s, dtype=float) * (1.0 - 1.0 / rho)


class GallagerSubcode(SubcodeEvaluator):
    """Gallager subcode optimizer on (rho, s, c) in [rho_min, 1] x [s_min, 1] x [c_min, 1]"""
    kind = 'gallager61'
    tag = 'GALLAGER'
    section = 'gallager'

    def __init__(self, n: int, channel_set: ParallelChannelSet, config: BoundConfig):
        super().__init__(n, config)
        self.stack = channel_stack(channel_set, config.quadrature)

    def box(self) -> List[List[float]]:
        """
        c starts at c_min rather than 0: at c = 0 the tilting reduces to the
        squared difference (p0^a - p1^a)^2, which is zero wherever p0 = p1
        (y = 0 on BIAWGN, the erasure on BEC). With r < 0 the factor f^r in
        G(r) and Z(r) is then infinite and the point carries no bound.
        """
        return [[self.config.rho_min, 1.0], [self.config.s_min, 1.0], [self.config.c_min, 1.0]]

    def fallback_point(self) -> np.ndarray:
        return np.array([1.0, 1.0, 1.0])

    def params(self, point: np.ndarray) -> Dict[str, float]:
        rho, s, c = (float(x) for x in point)
        return {"rho": rho, "s": s, "c": c, "r": float(gallager_r(rho, s))}

    def sums(self, rho, s, c) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        log_f = log_cube_tilting(self.stack.lp0[None], self.stack.lp1[None],
                                 as_column(rho), as_column(s), as_column(c))
        return gallager_sums(self.stack, log_f, gallager_r(rho, s), s)

    def objective(self, log_ah: float, h: int):
        n = self.n

        def evaluate(points: np.ndarray) -> np.ndarray:
            rho, s, c = points[:, 0], points[:, 1], points[:, 2]
            log_z, log_gr, log_gs = self.sums(rho, s, c)
            with np.errstate(invalid='ignore'):
                value = (binary_entropy(rho) + rho * log_ah + h * rho * log_z
                         + smul((n - h) * rho, log_gr) + smul(n * (1.0 - rho), log_gs))
            return -np.where(np.isnan(value), np.inf, value)

        return evaluate


def gallager_subcode_bound(log_ah: float, h: int, n: int, channel_set: ParallelChannelSet,
                           config: Optional[BoundConfig] = None) -> Tuple[float, float, float, float]:
    """
    Optimized Gallager bound on one constant-weight subcode

    Returns:
        (ln bound, rho*, s*, c*)
    """
    if not 1 <= h <= n:
        raise ValueError(f"Subcode weight must satisfy 1 <= h <= n, got h={h}, n={n}")
    config = config or BoundConfig.from_config()
    term, _, _ = optimize_subcode(GallagerSubcode(n, channel_set, config), log_ah, h)
    return term.log_value, term.params["rho"], term.params["s"], term.params["c"]


def gallager_bound(spectrum: DistanceSpectrum, channel_set: ParallelChannelSet, target: str = 'block',
                   h_max: Optional[int] = None, config: Optional[BoundConfig] = None,
                   union_log: Optional[np.ndarray] = None) -> BoundResult:
    """Sum of optimized Gallager subcode bounds over h = 1..h_max"""
    config = config or BoundConfig.from_config()
    evaluator = GallagerSubcode(spectrum.n, channel_set, config)
    return run_subcode_chain(evaluator, spectrum.multiplicities(target), spectrum.support(h_max),
                             union_log=union_log, target=target)


# =============================================================================
# WHOLE-CODE FORM
# =============================================================================

def gallager_whole_code_bound(spectrum: DistanceSpectrum, channel_set: ParallelChannelSet, rho: float,
                              s: float, f: Sequence[np.ndarray], target: str = 'block',
                              config: Optional[BoundConfig] = None) -> float:
    """
    ln of 2^{h(rho)} {sum_h A_h Z_bar^h G_bar(r)^(n-h)}^rho G_bar(s)^(n(1-rho))

    Args:
        f: one tilting array per channel, on that channel's table outputs
           (as returned by gallager_cube_tilting / gallager_random_tilting)
    """
    if not (0.0 < rho <= 1.0 and s > 0.0):
        raise ValueError(f"Whole-code Gallager bound needs 0 < rho <= 1 and s > 0, got rho={rho}, s={s}")
    config = config or BoundConfig.from_config()
    stack = channel_stack(channel_set, config.quadrature)
    if len(f) != stack.J:
        raise ValueError(f"Expected {stack.J} tilting arrays, got {len(f)}")
    with np.errstate(divide='ignore'):
        log_f = stack.pad([np.log(np.asarray(values, dtype=float)) for values in f])[None]
    r = float(gallager_r(rho, s))
    log_z, log_gr, log_gs = (float(x[0]) for x in gallager_sums(stack, log_f, [r], [s]))

    n = spectrum.n
    support = spectrum.support()
    log_mult = spectrum.multiplicities(target)[support]
    inner = float(logsumexp(log_mult + support * log_z + (n - support) * log_gr))
    tail = 0.0 if rho == 1.0 else n * (1.0 - rho) * log_gs
    value = float(binary_entropy(rho)) + rho * inner + tail
    logging.debug(f"[GALLAGER] whole-code | rho={rho:.4g} | s={s:.4g} | r={r:.4g} | log_bound={value:.6g}")
    return value


def gallager_sf_tilting_bound(spectrum: DistanceSpectrum, channel_set: ParallelChannelSet, rho: float,
                              target: str = 'block', config: Optional[BoundConfig] = None) -> float:
    """
    Whole-code Gallager bound with the shortened-SF tilting, s = rho/(1+rho)

    For the random-code spectrum this tracks the closed-form SF bound
    (gallager78) at the same rho and never exceeds it.
    """
    config = config or BoundConfig.from_config()
    stack = channel_stack(channel_set, config.quadrature)
    log_f = log_sf_tilting(stack, [rho])[0]
    tables = channel_set.tables(config.quadrature)
    f = [np.exp(log_f[j, :table.outputs.size]) for j, table in enumerate(tables)]
    return gallager_whole_code_bound(spectrum, channel_set, rho, rho / (1.0 + rho), f, target, config)
