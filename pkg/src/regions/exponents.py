# src/regions/exponents.py - Asymptotic error exponents of the parallel-channel bounds
"""
Lower bounds E(delta) on the error exponent of constant-weight subcodes with
normalized weight delta, for an ensemble with growth rate r(delta):

- ub:         -r - delta ln gamma_bar
- ds2:        max over (lambda', rho) of -rho r - rho [delta ln T1_bar + (1-delta) ln T2_bar]
- gallager61: max over (rho, s, c) of -rho [r + delta ln Z_bar + (1-delta) ln G_bar(r)] - (1-rho) ln G_bar(s)
- msf:        ub on the weights the partition rule sends to the union bound,
              the SF exponent (constant in delta) on the rest

A code ensemble is attainable when the infimum of E over the delta grid is
positive and the small-delta slope -r0 - ln gamma_bar is positive too.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from config.settings import CONFIG, PARBOUND_THREADS
from src.bounds.ds2 import FALLBACK_POINT, ds2_log_terms, lambda_from_prime
from src.bounds.gallager import gallager_r
from src.bounds.sf import SF_VARIANTS, log_sf_integrals, msf_initial_range
from src.bounds.stack import as_column, channel_stack, smul
from src.bounds.subcode import BoundConfig
from src.bounds.tilting import FixedPointConfig, gallager_sums, log_cube_tilting
from src.bounds.union import log_avg_gamma
from src.channels.mbios import ParallelChannelSet
from src.core.errors import NonFiniteError
from src.growth.rates import GrowthRate
from src.numerics.logmath import LN2, binary_entropy
from src.numerics.quadrature import QuadratureConfig
from src.numerics.solvers import GridConfig, maximize_box

Growth = Union[GrowthRate, float]


@dataclass
class RegionConfig:
    """Numeric settings of exponent evaluation and frontier tracing"""
    delta_min: float = 1e-3
    delta_points: int = 120
    eps_pos: float = 1e-6
    ebno2_lo_db: float = -10.0
    ebno2_hi_db: float = 40.0
    tol_db: float = 0.01
    rho_min: float = 1e-3
    s_min: float = 1e-3
    c_min: float = 1e-2
    lambda_prime_max: float = 0.999
    sf_variant: str = 'gallager78'
    grid: Optional[GridConfig] = None
    chunk_points: int = 512
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig.from_config)
    fixed_point: FixedPointConfig = field(default_factory=FixedPointConfig.from_config)

    @classmethod
    def from_config(cls) -> "RegionConfig":
        regions = CONFIG.regions
        bounds = BoundConfig.from_config()
        config = cls(
            delta_min=float(regions.get('delta_min', 1e-3)),
            delta_points=int(regions.get('delta_points', 120)),
            eps_pos=float(regions.get('eps_pos', 1e-6)),
            ebno2_lo_db=float(regions.get('ebno2_lo_db', -10.0)),
            ebno2_hi_db=float(regions.get('ebno2_hi_db', 40.0)),
            tol_db=float(regions.get('tol_db', 0.01)),
            rho_min=bounds.rho_min,
            s_min=bounds.s_min,
            c_min=bounds.c_min,
            lambda_prime_max=bounds.lambda_prime_max,
            sf_variant=bounds.sf_variant,
            chunk_points=bounds.chunk_points,
        )
        config.validate()
        return config

    def validate(self):
        if not 0.0 < self.delta_min < 1.0:
            raise ValueError(f"delta_min must lie in (0, 1), got {self.delta_min}")
        if self.delta_points < 2:
            raise ValueError(f"delta_points must be at least 2, got {self.delta_points}")
        if self.eps_pos < 0:
            raise ValueError(f"eps_pos must be nonnegative, got {self.eps_pos}")
        if not self.ebno2_lo_db < self.ebno2_hi_db:
            raise ValueError(f"Empty bisection window [{self.ebno2_lo_db}, {self.ebno2_hi_db}] dB")
        if self.tol_db <= 0:
            raise ValueError(f"tol_db must be positive, got {self.tol_db}")
        if self.sf_variant not in SF_VARIANTS:
            raise ValueError(f"sf_variant must be one of {SF_VARIANTS}, got {self.sf_variant}")

    def delta_grid(self) -> np.ndarray:
        return np.linspace(self.delta_min, 1.0, self.delta_points)

    def grid_for(self, section: str) -> GridConfig:
        return self.grid or GridConfig.from_config(f'bounds.{section}')


@dataclass
class ExponentCurve:
    """E(delta) of one bound kind on a delta grid (nats per code symbol)"""
    kind: str
    delta: np.ndarray
    values: np.ndarray
    params: List[Dict[str, float]] = field(default_factory=list)

    def infimum(self) -> Tuple[float, float]:
        """(min E, argmin delta); +inf on an empty curve"""
        if self.values.size == 0:
            return math.inf, math.nan
        i = int(np.argmin(self.values))
        return float(self.values[i]), float(self.delta[i])

    def to_rows(self) -> List[Dict]:
        return [{"delta": float(d), "exponent": float(e), "kind": self.kind}
                for d, e in zip(self.delta, self.values)]


def growth_at(growth: Growth, delta: float) -> float:
    if isinstance(growth, GrowthRate):
        return float(growth.at(delta))
    return float(growth)


def _maximize(objective, box, grid: GridConfig, config: RegionConfig) -> Tuple[float, np.ndarray]:
    try:
        best = maximize_box(objective, box, grid.coarse, grid.refine_rounds,
                            vectorized=True, chunk_points=config.chunk_points)
    except NonFiniteError:
        return -math.inf, np.array([])
    return float(best.max), best.argmax


# =============================================================================
# PER-DELTA EXPONENTS
# =============================================================================

def ub_exponent(delta: float, growth: Growth, channel_set: ParallelChannelSet,
                config: Optional[RegionConfig] = None) -> float:
    """-r(delta) - delta ln gamma_bar"""
    config = config or RegionConfig.from_config()
    return -growth_at(growth, delta) - delta * log_avg_gamma(channel_set, config.quadrature)


def ds2_exponent(delta: float, growth: Growth, channel_set: ParallelChannelSet,
                 config: Optional[RegionConfig] = None, with_params: bool = False):
    """
    DS2 exponent maximized over (lambda', rho) with the optimized tilting at every node

    Never below the union-Bhattacharyya exponent (the rho = 1, lambda = 1/2 point).
    """
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    config = config or RegionConfig.from_config()
    r = growth_at(growth, delta)
    stack = channel_stack(channel_set, config.quadrature)

    def objective(points: np.ndarray) -> np.ndarray:
        lam, rho = lambda_from_prime(points[:, 0]), points[:, 1]
        log_t1, log_t2 = ds2_log_terms(stack, delta, lam, rho, config.fixed_point)
        with np.errstate(invalid='ignore'):
            value = -rho * r - rho * (smul(delta, log_t1) + smul(1.0 - delta, log_t2))
        return np.where(np.isnan(value), -np.inf, value)

    box = [[0.0, config.lambda_prime_max], [config.rho_min, 1.0]]
    value, point = _maximize(objective, box, config.grid_for('ds2'), config)
    floor = float(objective(np.array([FALLBACK_POINT]))[0])
    if not value > floor:
        value, point = floor, np.array(FALLBACK_POINT)
    if with_params:
        return value, {"lambda": float(lambda_from_prime(point[0])), "rho": float(point[1])}
    return value


def gallager_exponent(delta: float, growth: Growth, channel_set: ParallelChannelSet,
                      config: Optional[RegionConfig] = None, with_params: bool = False):
    """Gallager exponent maximized over the (rho, s, c) cube; rho = 1 is the union exponent"""
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    config = config or RegionConfig.from_config()
    r = growth_at(growth, delta)
    stack = channel_stack(channel_set, config.quadrature)

    def objective(points: np.ndarray) -> np.ndarray:
        rho, s, c = points[:, 0], points[:, 1], points[:, 2]
        log_f = log_cube_tilting(stack.lp0[None], stack.lp1[None], as_column(rho), as_column(s), as_column(c))
        log_z, log_gr, log_gs = gallager_sums(stack, log_f, gallager_r(rho, s), s)
        with np.errstate(invalid='ignore'):
            value = -rho * (r + delta * log_z + smul(1.0 - delta, log_gr)) - smul(1.0 - rho, log_gs)
        return np.where(np.isnan(value), -np.inf, value)

    box = [[config.rho_min, 1.0], [config.s_min, 1.0], [config.c_min, 1.0]]
    value, point = _maximize(objective, box, config.grid_for('gallager'), config)
    fallback = np.array([1.0, 1.0, 1.0])
    floor = float(objective(fallback[None, :])[0])
    if not value > floor:
        value, point = floor, fallback
    if with_params:
        return value, {"rho": float(point[0]), "s": float(point[1]), "c": float(point[2])}
    return value


def sf_exponent(rate: float, log_max_ratio: float, channel_set: ParallelChannelSet,
                config: Optional[RegionConfig] = None) -> Tuple[float, float]:
    """
    max over rho of -rho (R ln 2 + M) - ln sum_j alpha_j I_j(rho)   (gallager78)
                  or -rho (R ln 2 + M) - rho ln sum_j alpha_j I_j(rho)^{1/rho}   (ds2_81)

    M is the largest normalized excess r(delta) - H(delta) + (1-R) ln 2 over the SF weights.
    Returns (exponent, rho*).
    """
    config = config or RegionConfig.from_config()
    stack = channel_stack(channel_set, config.quadrature)

    def objective(points: np.ndarray) -> np.ndarray:
        rho = points[:, 0]
        log_i = log_sf_integrals(stack, rho)
        with np.errstate(invalid='ignore'):
            if config.sf_variant == 'gallager78':
                mix = stack.mix(log_i)
            else:
                mix = rho * stack.mix(log_i / rho[:, None])
            return -rho * (rate * LN2 + log_max_ratio) - mix

    value, point = _maximize(objective, [[config.rho_min, 1.0]], config.grid_for('sf'), config)
    return value, float(point[0]) if point.size else math.nan


# =============================================================================
# CURVES
# =============================================================================

_POINTWISE = {'ds2': ds2_exponent, 'gallager61': gallager_exponent}


def _finite_deltas(growth: GrowthRate, deltas: np.ndarray) -> np.ndarray:
    return deltas[np.isfinite(growth.at(deltas))]


def msf_exponent_curve(growth: GrowthRate, channel_set: ParallelChannelSet, deltas: np.ndarray,
                       config: RegionConfig) -> ExponentCurve:
    """Union exponent outside the SF weight range, the SF exponent inside it"""
    bound_config = BoundConfig(quadrature=config.quadrature, fixed_point=config.fixed_point)
    log_gamma = log_avg_gamma(channel_set, config.quadrature)
    r = growth.at(deltas)
    values = -r - deltas * log_gamma
    params = [{"region": 0.0} for _ in deltas]

    initial = msf_initial_range(channel_set, bound_config)
    if initial is not None:
        inside = (deltas >= initial[0]) & (deltas <= initial[1])
        if np.any(inside):
            excess = r[inside] - binary_entropy(deltas[inside]) + (1.0 - growth.rate) * LN2
            sf_value, rho = sf_exponent(growth.rate, float(np.max(excess)), channel_set, config)
            values = np.where(inside, sf_value, values)
            params = [{"region": 1.0, "rho": rho} if flag else p for flag, p in zip(inside, params)]
    return ExponentCurve(kind='msf', delta=deltas, values=values, params=params)


def exponent_curve(kind: str, growth: GrowthRate, channel_set: ParallelChannelSet,
                   deltas: Optional[Sequence[float]] = None, config: Optional[RegionConfig] = None,
                   threads: Optional[int] = None) -> ExponentCurve:
    """
    E(delta) on a delta grid; weights with r(delta) = -inf are skipped

    Args:
        kind: 'ds2', 'gallager61', 'ub' or 'msf'
    """
    config = config or RegionConfig.from_config()
    grid = config.delta_grid() if deltas is None else np.asarray(sorted(float(d) for d in deltas))
    grid = _finite_deltas(growth, grid)

    if kind == 'ub':
        log_gamma = log_avg_gamma(channel_set, config.quadrature)
        return ExponentCurve(kind='ub', delta=grid, values=-growth.at(grid) - grid * log_gamma)
    if kind == 'msf':
        return msf_exponent_curve(growth, channel_set, grid, config)
    if kind not in _POINTWISE:
        raise ValueError(f"No exponent for bound kind '{kind}' (expected ds2, gallager61, ub or msf)")

    point = _POINTWISE[kind]
    workers = max(1, int(threads or PARBOUND_THREADS))

    def evaluate(delta: float):
        return point(float(delta), growth, channel_set, config, with_params=True)

    if workers == 1:
        results = [evaluate(d) for d in grid]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(evaluate, grid))

    values = np.array([v for v, _ in results])
    curve = ExponentCurve(kind=kind, delta=grid, values=values, params=[p for _, p in results])
    inf_value, inf_delta = curve.infimum()
    logging.debug(f"[REGION] {kind} exponent | points={grid.size} | inf={inf_value:.6g} at delta={inf_delta:.4g}")
    return curve


def small_delta_slope(growth: GrowthRate, channel_set: ParallelChannelSet,
                      config: Optional[RegionConfig] = None) -> float:
    """-r0 - ln gamma_bar, the limit of E(delta)/delta as delta -> 0"""
    config = config or RegionConfig.from_config()
    return -growth.r0_slope - log_avg_gamma(channel_set, config.quadrature)
