# src/growth/rates.py - Asymptotic growth rates r(delta) of ensemble distance spectra
"""
Asymptotic spectrum exponents r(delta) = lim (1/n) ln A_{delta n}, in nats.

- random:  H(delta) - (1-R) ln 2
- NSRA(q): one-dimensional maximization over the accumulator split u
- SPRA(N, 3, 6): three-parameter maximization over (eta, rho1, rho2)
- SPARA(N, M, 3, 6): five-parameter maximization adding (eps1, eps2), alpha = M/(3N)

The constrained maximizations run on a box in reparametrized coordinates:
rho1, eps1 and eps2 are written as lo + v (hi - lo) between their
parameter-dependent bounds, so every grid node with lo <= hi is feasible for
those constraints. Remaining inequalities are masked to -inf.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from config.settings import CONFIG, PARBOUND_THREADS
from src.core.errors import NonFiniteError
from src.numerics.logmath import LN2, LOG_ZERO, binary_entropy, log_binomial, scaled_entropy
from src.numerics.solvers import GridConfig, maximize_box
from src.spectra.ensembles import EnsembleKind, EnsembleSpec

LN3 = math.log(3.0)
_SLACK = 1e-12
TWO_THIRDS = 2.0 / 3.0


@dataclass
class GrowthPoint:
    """r(delta) at one delta with the maximizing parameters (original coordinates)"""
    delta: float
    value: float
    params: Dict[str, float] = field(default_factory=dict)


@dataclass
class GrowthRate:
    """
    Growth-rate curve of one ensemble

    r holds nats per code symbol; -inf marks weights the ensemble cannot
    produce. r0_slope estimates lim r(delta)/delta as delta -> 0.
    """
    ensemble: str
    rate: float
    delta: np.ndarray
    r: np.ndarray
    r0_slope: float
    params: List[Dict[str, float]] = field(default_factory=list)

    def at(self, delta) -> np.ndarray:
        """Linear interpolation of r on the finite part of the curve; -inf beyond the support"""
        d = np.asarray(delta, dtype=float)
        finite = np.isfinite(self.r)
        if not np.any(finite):
            return np.full(d.shape, LOG_ZERO)
        xs, ys = self.delta[finite], self.r[finite]
        value = np.interp(d, xs, ys)
        return np.where(d > xs[-1] + 1e-12, LOG_ZERO, value)

    def to_rows(self) -> List[Dict]:
        return [{"delta": float(d), "r_nats": float(v)} for d, v in zip(self.delta, self.r)]

    @classmethod
    def from_points(cls, ensemble: str, rate: float, delta: Sequence[float], r: Sequence[float]) -> "GrowthRate":
        """Curve read back from a growth CSV; r0_slope is re-extrapolated"""
        d = np.asarray(delta, dtype=float)
        v = np.asarray(r, dtype=float)
        order = np.argsort(d)
        d, v = d[order], v[order]
        return cls(ensemble=ensemble, rate=rate, delta=d, r=v, r0_slope=richardson_slope(d, v))


# =============================================================================
# RANDOM / NSRA
# =============================================================================

def random_growth(delta, rate: float):
    """H(delta) - (1-R) ln 2 with H the natural-base binary entropy"""
    if not 0.0 < rate < 1.0:
        raise ValueError(f"Rate must lie in (0, 1), got {rate}")
    return binary_entropy(delta) - (1.0 - rate) * LN2


def _nsra_objective(delta: float, q: int) -> Callable:
    def objective(points: np.ndarray) -> np.ndarray:
        u = points[:, 0]
        return (
            -(1.0 - 1.0 / q) * binary_entropy(np.clip(u, 0.0, 1.0))
            + scaled_entropy(1.0 - delta, u / 2.0)
            + scaled_entropy(delta, u / 2.0)
        )
    return objective


def nsra_growth_point(delta: float, q: int, grid: Optional[GridConfig] = None) -> GrowthPoint:
    """max over 0 <= u <= min(2 delta, 2 - 2 delta) of the NSRA split objective"""
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta must lie in [0, 1], got {delta}")
    if q < 2:
        raise ValueError(f"NSRA needs q >= 2, got {q}")
    grid = grid or GridConfig.from_config('growth.nsra')

    upper = max(0.0, min(2.0 * delta, 2.0 - 2.0 * delta))
    result = maximize_box(_nsra_objective(delta, q), [[0.0, upper]], coarse=grid.coarse,
                          refine_rounds=grid.refine_rounds, vectorized=True)
    return GrowthPoint(delta=delta, value=result.max, params={"u": float(result.argmax[0])})


def nsra_growth(delta: float, q: int, grid: Optional[GridConfig] = None) -> float:
    return nsra_growth_point(delta, q, grid).value


# =============================================================================
# SPRA(N, 3, 6)
# =============================================================================

def _rho1_from(eta, rho2, v):
    lo = np.maximum(0.0, rho2 + eta - TWO_THIRDS)
    hi = np.minimum(rho2, eta)
    return lo + v * (hi - lo), hi >= lo - _SLACK


def spra_constraint_slack(delta: float, eta: float, rho1: float, rho2: float) -> float:
    """Smallest slack of the SPRA feasibility inequalities (negative = violated)"""
    t = 2.0 * rho2 + eta
    slacks = [
        eta, TWO_THIRDS - eta,
        rho2, TWO_THIRDS - rho2,
        6.0 * delta - t,
        3.0 * delta - (rho2 + 2.0 * eta),
        rho1 - max(0.0, rho2 + eta - TWO_THIRDS),
        min(rho2, eta) - rho1,
        2.0 - (eta - rho2 + 3.0 * delta),
    ]
    return float(min(slacks))


def _spra_value(delta, eta, rho1, rho2):
    t = 2.0 * rho2 + eta
    return (
        -(5.0 / 3.0) * binary_entropy(np.clip(t / 2.0, 0.0, 1.0))
        + scaled_entropy(eta, rho1)
        + scaled_entropy(TWO_THIRDS - eta, rho2 - rho1)
        + scaled_entropy(TWO_THIRDS - delta + t / 6.0, eta / 2.0)
        + scaled_entropy(delta - t / 6.0, eta / 2.0)
        + (eta + rho2 - 2.0 * rho1) * LN3
    )


def _spra_objective(delta: float) -> Callable:
    def objective(points: np.ndarray) -> np.ndarray:
        eta, rho2, v = points[:, 0], points[:, 1], points[:, 2]
        rho1, ordered = _rho1_from(eta, rho2, v)
        t = 2.0 * rho2 + eta
        feasible = (
            ordered
            & (t <= 6.0 * delta + _SLACK)
            & (rho2 + 2.0 * eta <= 3.0 * delta + _SLACK)
            & (eta - rho2 + 3.0 * delta <= 2.0 + _SLACK)
        )
        with np.errstate(invalid='ignore'):
            value = _spra_value(delta, eta, rho1, rho2)
        return np.where(feasible, value, LOG_ZERO)
    return objective


def spra_growth_point(delta: float, grid: Optional[GridConfig] = None) -> GrowthPoint:
    """Three-parameter SPRA maximization; -inf when the polytope is empty"""
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta must lie in [0, 1], got {delta}")
    grid = grid or GridConfig.from_config('growth.spra')

    box = [
        [0.0, min(TWO_THIRDS, 1.5 * delta)],
        [0.0, min(TWO_THIRDS, 3.0 * delta)],
        [0.0, 1.0],
    ]
    try:
        result = maximize_box(_spra_objective(delta), box, coarse=grid.coarse,
                              refine_rounds=grid.refine_rounds, vectorized=True)
    except NonFiniteError:
        logging.debug(f"[GROWTH] SPRA polytope empty | delta={delta:.6g}")
        return GrowthPoint(delta=delta, value=LOG_ZERO)

    eta, rho2, v = result.argmax
    rho1, _ = _rho1_from(eta, rho2, v)
    return GrowthPoint(delta=delta, value=result.max,
                       params={"eta": float(eta), "rho1": float(rho1), "rho2": float(rho2)})


def spra_growth(delta: float, grid: Optional[GridConfig] = None) -> float:
    return spra_growth_point(delta, grid).value


# =============================================================================
# SPARA(N, M, 3, 6)
# =============================================================================

def _eps_from(delta, alpha, eta, rho2, a, b):
    t = 2.0 * rho2 + eta
    e1_lo = np.maximum(0.0, t / 6.0 - 1.0 / 3.0 + alpha)
    e1_hi = np.minimum(alpha, t / 6.0)
    eps1 = e1_lo + a * (e1_hi - e1_lo)

    e2_lo = np.maximum(0.0, delta - TWO_THIRDS + eta / 2.0 - eps1)
    e2_hi = np.minimum.reduce([
        TWO_THIRDS - 2.0 * alpha - t / 3.0 + 2.0 * eps1,
        t / 3.0 - 2.0 * eps1,
        min(delta, 1.0 / 3.0) - eps1,
        delta - eta / 2.0 - eps1,
    ])
    eps2 = e2_lo + b * (e2_hi - e2_lo)
    ordered = (e1_hi >= e1_lo - _SLACK) & (e2_hi >= e2_lo - _SLACK)
    return eps1, eps2, ordered


def spara_constraint_slack(delta: float, alpha: float, eta: float, rho1: float, rho2: float,
                           eps1: float, eps2: float) -> float:
    """Smallest slack of the SPARA feasibility inequalities (negative = violated)"""
    t = 2.0 * rho2 + eta
    eps = eps1 + eps2
    slacks = [
        eta, TWO_THIRDS - eta,
        rho2, TWO_THIRDS - rho2,
        eps1, alpha - eps1,
        eps, min(delta, 1.0 / 3.0) - eps,
        rho1 - max(0.0, rho2 + eta - TWO_THIRDS),
        min(rho2, eta) - rho1,
        min(4.0 / 3.0 - 2.0 * delta + 2.0 * eps, 2.0 * delta - 2.0 * eps) - eta,
        min(TWO_THIRDS - 2.0 * alpha - t / 3.0 + 2.0 * eps1, t / 3.0 - 2.0 * eps1) - eps2,
    ]
    return float(min(slacks))


def _spara_value(delta, alpha, eta, rho1, rho2, eps1, eps2):
    t = 2.0 * rho2 + eta
    eps = eps1 + eps2
    return (
        scaled_entropy(alpha, eps1)
        + scaled_entropy(1.0 / 3.0 - alpha - t / 6.0 + eps1, eps2 / 2.0)
        + scaled_entropy(t / 6.0 - eps1, eps2 / 2.0)
        + scaled_entropy(eta, rho1)
        - 2.0 * binary_entropy(np.clip(t / 2.0, 0.0, 1.0))
        + scaled_entropy(TWO_THIRDS - eta, rho2 - rho1)
        + scaled_entropy(TWO_THIRDS - delta + eps, eta / 2.0)
        + scaled_entropy(delta - eps, eta / 2.0)
        + (eta + rho2 - 2.0 * rho1) * LN3
    )


def _spara_objective(delta: float, alpha: float) -> Callable:
    def objective(points: np.ndarray) -> np.ndarray:
        eta, rho2, v, a, b = (points[:, i] for i in range(5))
        rho1, rho_ok = _rho1_from(eta, rho2, v)
        eps1, eps2, eps_ok = _eps_from(delta, alpha, eta, rho2, a, b)
        with np.errstate(invalid='ignore'):
            value = _spara_value(delta, alpha, eta, rho1, rho2, eps1, eps2)
        return np.where(rho_ok & eps_ok, value, LOG_ZERO)
    return objective


def spara_growth_point(delta: float, alpha: float, grid: Optional[GridConfig] = None) -> GrowthPoint:
    """Five-parameter SPARA maximization; -inf when the polytope is empty"""
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta must lie in [0, 1], got {delta}")
    if not 0.0 <= alpha <= 1.0 / 3.0 + _SLACK:
        raise ValueError(f"alpha must lie in [0, 1/3], got {alpha}")
    grid = grid or GridConfig.from_config('growth.spara')

    box = [
        [0.0, min(TWO_THIRDS, 2.0 * delta)],
        [0.0, TWO_THIRDS],
        [0.0, 1.0],
        [0.0, 1.0],
        [0.0, 1.0],
    ]
    try:
        result = maximize_box(_spara_objective(delta, alpha), box, coarse=grid.coarse,
                              refine_rounds=grid.refine_rounds, vectorized=True)
    except NonFiniteError:
        logging.debug(f"[GROWTH] SPARA polytope empty | delta={delta:.6g} | alpha={alpha:.6g}")
        return GrowthPoint(delta=delta, value=LOG_ZERO)

    eta, rho2, v, a, b = result.argmax
    rho1, _ = _rho1_from(eta, rho2, v)
    eps1, eps2, _ = _eps_from(delta, alpha, eta, rho2, a, b)
    params = {"eta": float(eta), "rho1": float(rho1), "rho2": float(rho2),
              "eps1": float(eps1), "eps2": float(eps2)}
    return GrowthPoint(delta=delta, value=result.max, params=params)


def spara_growth(delta: float, alpha: float, grid: Optional[GridConfig] = None) -> float:
    return spara_growth_point(delta, alpha, grid).value


# =============================================================================
# CURVES
# =============================================================================

def default_delta_grid() -> np.ndarray:
    """Uniform points on (0, 1] plus log-spaced small-delta points"""
    section = CONFIG.growth
    uniform = int(section.get('uniform_points', 200))
    log_points = int(section.get('log_points', 9))
    log_min = float(section.get('log_min', 1e-4))
    log_max = float(section.get('log_max', 1e-2))
    grid = np.concatenate([
        np.arange(1, uniform + 1) / uniform,
        np.logspace(math.log10(log_min), math.log10(log_max), log_points),
    ])
    return np.unique(grid)


def growth_point_function(spec: EnsembleSpec, grid: Optional[GridConfig] = None) -> Callable[[float], GrowthPoint]:
    """delta -> GrowthPoint for an ensemble with a closed-form asymptotic spectrum"""
    if spec.kind is EnsembleKind.RANDOM:
        return lambda d: GrowthPoint(delta=d, value=float(random_growth(d, spec.rate)))
    if spec.kind is EnsembleKind.NSRA:
        return lambda d: nsra_growth_point(d, spec.q, grid)
    if spec.kind is EnsembleKind.SPRA:
        if (spec.q, spec.p) != (6, 3):
            raise ValueError("Asymptotic SPRA growth is available for (q, p) = (6, 3) only")
        return lambda d: spra_growth_point(d, grid)
    if spec.kind is EnsembleKind.SPARA:
        return lambda d: spara_growth_point(d, spec.alpha, grid)
    raise ValueError(f"No asymptotic growth rate for ensemble '{spec.kind.value}'")


def richardson_slope(delta: Sequence[float], r: Sequence[float]) -> float:
    """Extrapolate r(delta)/delta to delta = 0 from the two smallest finite grid points"""
    d = np.asarray(delta, dtype=float)
    v = np.asarray(r, dtype=float)
    usable = (d > 0) & np.isfinite(v)
    if np.sum(usable) < 2:
        return math.nan
    order = np.argsort(d[usable])
    d1, d2 = d[usable][order[:2]]
    s1, s2 = v[usable][order[:2]] / np.array([d1, d2])
    return float((d2 * s1 - d1 * s2) / (d2 - d1))


def growth_curve(spec: EnsembleSpec, deltas: Optional[Sequence[float]] = None,
                 grid: Optional[GridConfig] = None, threads: Optional[int] = None) -> GrowthRate:
    """
    Evaluate r(delta) on a delta grid

    Args:
        spec: ensemble (random, NSRA, SPRA(6,3) or SPARA)
        deltas: grid (default: default_delta_grid())
        grid: optimizer density override
        threads: worker threads (default PARBOUND_THREADS)
    """
    deltas = default_delta_grid() if deltas is None else np.asarray(sorted(set(float(d) for d in deltas)))
    point = growth_point_function(spec, grid)
    workers = max(1, int(threads or PARBOUND_THREADS))

    logging.info(f"[GROWTH] Computing {spec.tag} | points={len(deltas)} | threads={workers}")
    if workers == 1:
        points = [point(float(d)) for d in deltas]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(lambda d: point(float(d)), deltas))

    r = np.array([p.value for p in points])
    if spec.kind is EnsembleKind.RANDOM:
        slope = -math.inf
    else:
        slope = richardson_slope(deltas, r)

    finite = r[np.isfinite(r)]
    peak = float(np.max(finite)) if finite.size else LOG_ZERO
    logging.info(f"[GROWTH] {spec.tag} done | max_r={peak:.6f} | r0_slope={slope:.6g}")
    return GrowthRate(
        ensemble=spec.tag,
        rate=spec.rate,
        delta=np.asarray(deltas, dtype=float),
        r=r,
        r0_slope=slope,
        params=[p.params for p in points],
    )


# =============================================================================
# FINITE-LENGTH CONVERGENCE
# =============================================================================

def convergence_check(spec: EnsembleSpec, delta: float, N_list: Sequence[int]) -> List[Dict]:
    """
    Finite-length exponents ln A_{ceil(delta n)} / n for each N

    Returns:
        list of {"N", "n", "h", "r_finite"} rows in the order of N_list
    """
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta must lie in [0, 1], got {delta}")

    rows = []
    for N in N_list:
        finite_spec = EnsembleSpec(kind=spec.kind, N=int(N), M=_scaled_M(spec, int(N)), q=spec.q, p=spec.p,
                                   rate=spec.rate, iowe_path=spec.iowe_path)
        spectrum = finite_spec.spectrum()
        n = spectrum.n
        h = min(n, max(0, math.ceil(delta * n - 1e-9)))
        value = float(spectrum.log_a[h]) / n
        rows.append({"N": int(N), "n": n, "h": h, "r_finite": value})
        logging.debug(f"[GROWTH] Finite-length exponent | {spec.tag} | N={N} | h={h} | r={value:.6f}")
    return rows


def _scaled_M(spec: EnsembleSpec, N: int) -> Optional[int]:
    """Keep M/N fixed when varying N for SPARA"""
    if spec.kind is not EnsembleKind.SPARA:
        return spec.M
    return int(round(spec.M * N / spec.N))


def random_finite_exponent(n: int, h: int, rate: float) -> float:
    """ln C(n, h)/n - (1-R) ln 2, the finite-length random-ensemble exponent for h >= 1"""
    return float(log_binomial(n, h)) / n - (1.0 - rate) * LN2
