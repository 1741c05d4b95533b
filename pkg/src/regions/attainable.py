# src/regions/attainable.py - Attainable channel regions of code ensembles over parallel BIAWGN channels
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

from config.settings import PARBOUND_THREADS
from src.channels.information import capacity_limit_ebno_db, solve_capacity_ebno2, solve_cutoff_ebno2
from src.channels.mbios import ParallelChannelSet
from src.core.errors import BadBracketError, InfeasibleError, MissingFlagsError
from src.growth.rates import GrowthRate, growth_curve
from src.numerics.solvers import bisect
from src.regions.exponents import ExponentCurve, RegionConfig, exponent_curve, small_delta_slope
from src.spectra.ensembles import EnsembleKind, EnsembleSpec

REGION_KINDS = ('ds2', 'gallager61', 'ub', 'msf')


@dataclass(frozen=True)
class EnsembleFlags:
    """
    Declared low-weight conditions of an ensemble (not computed)

    low_weight_vanishing: the expected number of codewords of weight up to
        some D_n -> infinity vanishes
    uniform_convergence: the finite-length spectrum exponent converges
        uniformly in delta to r(delta)
    """
    low_weight_vanishing: Optional[bool] = None
    uniform_convergence: Optional[bool] = None

    @property
    def declared(self) -> bool:
        return self.low_weight_vanishing is not None and self.uniform_convergence is not None

    @property
    def satisfied(self) -> bool:
        return bool(self.low_weight_vanishing) and bool(self.uniform_convergence)

    @classmethod
    def for_ensemble(cls, spec: EnsembleSpec) -> "EnsembleFlags":
        """Known flags of the built-in ensembles; IOWE files carry none"""
        if spec.kind is EnsembleKind.NSRA:
            ok = spec.q >= 3
            return cls(low_weight_vanishing=ok, uniform_convergence=ok)
        if spec.kind in (EnsembleKind.RANDOM, EnsembleKind.SPRA, EnsembleKind.SPARA):
            return cls(low_weight_vanishing=True, uniform_convergence=True)
        return cls()


@dataclass
class Assessment:
    """Attainability of one channel point, with the quantities it was decided on"""
    attainable: bool
    kind: str
    inf_exponent: float
    inf_delta: float
    margin: float
    curve: Optional[ExponentCurve] = None

    def to_dict(self) -> Dict:
        return {
            "attainable": self.attainable,
            "kind": self.kind,
            "inf_exponent": self.inf_exponent,
            "inf_delta": self.inf_delta,
            "margin": self.margin,
        }


@dataclass
class RegionBoundary:
    """Frontier points ((Eb/N0)_1, (Eb/N0)_2) in dB of a two-channel attainable region"""
    kind: str
    ensemble: str
    rate: float
    alphas: Tuple[float, ...]
    points: List[Tuple[float, float]] = field(default_factory=list)

    def to_rows(self) -> List[Dict]:
        return [{"ebno1_db": e1, "ebno2_db": e2, "kind": self.kind, "ensemble": self.ensemble}
                for e1, e2 in self.points]

    def ebno2_at(self, ebno1_db: float) -> Optional[float]:
        for e1, e2 in self.points:
            if abs(e1 - ebno1_db) < 1e-12:
                return e2
        return None


def _check_kind(kind: str) -> str:
    kind = str(kind).lower().replace('_', '-')
    if kind not in REGION_KINDS:
        raise ValueError(f"Unknown region kind '{kind}', expected one of {REGION_KINDS}")
    return kind


# =============================================================================
# ATTAINABILITY
# =============================================================================

def assess(channel_set: ParallelChannelSet, growth: GrowthRate, kind: str = 'ds2',
           flags: Optional[EnsembleFlags] = None, config: Optional[RegionConfig] = None,
           threads: Optional[int] = None) -> Assessment:
    """
    Attainability of a channel point for an ensemble

    True when the infimum of the exponent over the delta grid exceeds eps_pos,
    the small-delta slope -r0 - ln gamma_bar is strictly positive, and the
    declared low-weight conditions hold.

    Raises:
        MissingFlagsError: the low-weight conditions are not declared
    """
    kind = _check_kind(kind)
    if flags is None or not flags.declared:
        raise MissingFlagsError(
            f"Ensemble {growth.ensemble} has no declared low-weight conditions; pass EnsembleFlags"
        )
    config = config or RegionConfig.from_config()

    margin = small_delta_slope(growth, channel_set, config)
    if not flags.satisfied:
        return Assessment(False, kind, math.nan, math.nan, margin)

    curve = exponent_curve(kind, growth, channel_set, config=config, threads=threads)
    inf_exponent, inf_delta = curve.infimum()
    ok = bool(inf_exponent > config.eps_pos and margin > 0.0)
    logging.debug(
        f"[REGION] {growth.ensemble} | {kind} | inf_E={inf_exponent:.6g} at delta={inf_delta:.4g} | "
        f"margin={margin:.6g} | attainable={ok}"
    )
    return Assessment(ok, kind, inf_exponent, inf_delta, margin, curve)


def attainable(channel_set: ParallelChannelSet, growth: GrowthRate, kind: str = 'ds2',
               flags: Optional[EnsembleFlags] = None, config: Optional[RegionConfig] = None) -> bool:
    return assess(channel_set, growth, kind, flags, config).attainable


# =============================================================================
# FRONTIERS
# =============================================================================

def _resolve(ensemble: Union[EnsembleSpec, GrowthRate], flags: Optional[EnsembleFlags],
             threads: Optional[int]) -> Tuple[GrowthRate, EnsembleFlags]:
    if isinstance(ensemble, EnsembleSpec):
        growth = growth_curve(ensemble, threads=threads)
        return growth, flags or EnsembleFlags.for_ensemble(ensemble)
    return ensemble, flags or EnsembleFlags()


def _frontier_point(predicate, config: RegionConfig) -> Optional[float]:
    """Smallest attainable (Eb/N0)_2 in the bisection window, None if unattainable at its top"""
    lo, hi = config.ebno2_lo_db, config.ebno2_hi_db
    if not predicate(hi):
        return None
    if predicate(lo):
        return lo
    try:
        return bisect(predicate, lo, hi, config.tol_db)
    except BadBracketError:
        return None


def region_boundary(ensemble: Union[EnsembleSpec, GrowthRate], kind: str, rate: float,
                    alphas: Sequence[float], ebno1_grid_db: Sequence[float],
                    flags: Optional[EnsembleFlags] = None, config: Optional[RegionConfig] = None,
                    threads: Optional[int] = None) -> RegionBoundary:
    """
    Frontier of the attainable region for two parallel BIAWGN channels

    For every (Eb/N0)_1 on the grid, bisects (Eb/N0)_2 for the attainability
    threshold. Grid points unattainable even at the top of the window are omitted.
    """
    kind = _check_kind(kind)
    config = config or RegionConfig.from_config()
    growth, flags = _resolve(ensemble, flags, threads)
    if not flags.declared:
        raise MissingFlagsError(f"Ensemble {growth.ensemble} has no declared low-weight conditions")

    def trace(ebno1_db: float) -> Optional[float]:
        def predicate(ebno2_db: float) -> bool:
            channel_set = ParallelChannelSet.biawgn_ebno(rate, [ebno1_db, ebno2_db], alphas)
            return assess(channel_set, growth, kind, flags, config, threads=1).attainable
        return _frontier_point(predicate, config)

    grid = [float(x) for x in ebno1_grid_db]
    workers = max(1, int(threads or PARBOUND_THREADS))
    start = time.time()
    logging.info(f"[REGION] Tracing {growth.ensemble} | kind={kind} | points={len(grid)} | threads={workers}")
    if workers == 1:
        values = [trace(x) for x in grid]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(trace, grid))

    points = [(e1, e2) for e1, e2 in zip(grid, values) if e2 is not None]
    omitted = len(grid) - len(points)
    if omitted:
        logging.info(f"[REGION] {omitted} grid points unattainable at {config.ebno2_hi_db} dB | omitted")
    logging.info(f"[REGION] {growth.ensemble} | {kind} done | elapsed={time.time() - start:.1f}s")
    return RegionBoundary(kind=kind, ensemble=growth.ensemble, rate=rate, alphas=tuple(alphas), points=points)


def reference_boundaries(rate: float, alphas: Sequence[float],
                         ebno1_grid_db: Sequence[float]) -> Tuple[RegionBoundary, RegionBoundary]:
    """(capacity, cutoff-rate) boundaries; points where channel 1 alone suffices are omitted"""
    capacity_points, cutoff_points = [], []
    for ebno1_db in (float(x) for x in ebno1_grid_db):
        try:
            capacity_points.append((ebno1_db, solve_capacity_ebno2(rate, ebno1_db, alphas)))
        except InfeasibleError as e:
            logging.debug(f"[REGION] Capacity point skipped | ebno1_db={ebno1_db} | {e}")
        try:
            cutoff_points.append((ebno1_db, solve_cutoff_ebno2(rate, ebno1_db, alphas)))
        except InfeasibleError as e:
            logging.debug(f"[REGION] Cutoff point skipped | ebno1_db={ebno1_db} | {e}")
    return (
        RegionBoundary('capacity', 'reference', rate, tuple(alphas), capacity_points),
        RegionBoundary('cutoff', 'reference', rate, tuple(alphas), cutoff_points),
    )


def symmetric_threshold(ensemble: Union[EnsembleSpec, GrowthRate], kind: str, rate: float,
                        alphas: Sequence[float], flags: Optional[EnsembleFlags] = None,
                        config: Optional[RegionConfig] = None, threads: Optional[int] = None) -> float:
    """
    Smallest Eb/N0 (dB) with (Eb/N0)_1 = (Eb/N0)_2 inside the attainable region

    Raises:
        InfeasibleError: unattainable at the top of the bisection window
    """
    kind = _check_kind(kind)
    config = config or RegionConfig.from_config()
    growth, flags = _resolve(ensemble, flags, threads)

    def predicate(ebno_db: float) -> bool:
        channel_set = ParallelChannelSet.biawgn_ebno(rate, [ebno_db, ebno_db], alphas)
        return assess(channel_set, growth, kind, flags, config, threads=threads).attainable

    value = _frontier_point(predicate, config)
    if value is None:
        raise InfeasibleError(f"{growth.ensemble} is not attainable at {config.ebno2_hi_db} dB on both channels")
    logging.info(f"[REGION] Symmetric threshold | {growth.ensemble} | {kind} | ebno_db={value:.3f}")
    return value


def capacity_gap_db(threshold_db: float, rate: float) -> float:
    """Distance in dB from a symmetric threshold to the BIAWGN capacity limit at this rate"""
    return threshold_db - capacity_limit_ebno_db(rate)
