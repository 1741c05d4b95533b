# src/bounds/subcode.py - Bound configuration and the per-subcode optimization chain
"""
Constant-weight subcode machinery shared by the DS2, Gallager, sphere and
hybrid bounds.

Each evaluator exposes a parameter box, a vectorized objective (minus the
log bound, so maximize_box can be used directly) and an analytic fallback
point whose value is the Bhattacharyya union term. run_subcode_chain walks
h = 1..h_max, warm-starting every optimization in a window around the
previous subcode's optimum.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from config.settings import CONFIG
from src.bounds.results import BoundResult, SubcodeTerm
from src.bounds.tilting import FixedPointConfig
from src.core.errors import NonFiniteError
from src.numerics.quadrature import QuadratureConfig
from src.numerics.solvers import GridConfig, maximize_box

_EDGE_TOL = 1e-12


@dataclass
class BoundConfig:
    """
    Numeric settings of a finite-length bound run

    threshold=None selects the default rule: threshold_bit_scale / n for
    bit error, threshold_block for block error.
    """
    threshold: Optional[float] = None
    threshold_block: float = 1e-10
    threshold_bit_scale: float = 1e-6
    warm_window: float = 0.1
    expurgate: bool = False
    lambda_prime_max: float = 0.999
    rho_min: float = 1e-3
    s_min: float = 1e-3
    c_min: float = 1e-2
    sf_variant: str = 'gallager78'
    finite_length: bool = True
    grid: Optional[GridConfig] = None
    chunk_points: int = 512
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig.from_config)
    fixed_point: FixedPointConfig = field(default_factory=FixedPointConfig.from_config)

    @classmethod
    def from_config(cls, overrides: Optional[Dict] = None) -> "BoundConfig":
        """
        Defaults from bounds_config.yaml, then the keys of a bound-run config

        Args:
            overrides: {"threshold", "grid": {"coarse", "refine"}, "expurgate",
                "warm_window", "sf_variant", "finite_length"}; other keys are ignored
        """
        section = CONFIG.bounds
        config = cls(
            threshold_block=float(section.get('threshold_block', 1e-10)),
            threshold_bit_scale=float(section.get('threshold_bit_scale', 1e-6)),
            warm_window=float(section.get('warm_window', 0.1)),
            lambda_prime_max=float(section.get('lambda_prime_max', 0.999)),
            rho_min=float(section.get('rho_min', 1e-3)),
            s_min=float(section.get('s_min', 1e-3)),
            c_min=float(section.get('c_min', 1e-2)),
            chunk_points=int(section.get('chunk_points', 512)),
        )
        overrides = overrides or {}
        if overrides.get('threshold') is not None:
            config.threshold = float(overrides['threshold'])
        if overrides.get('grid'):
            grid = overrides['grid']
            config.grid = GridConfig(coarse=int(grid.get('coarse', 21)),
                                     refine_rounds=int(grid.get('refine', grid.get('refine_rounds', 4))))
        for key in ('expurgate', 'finite_length'):
            if key in overrides:
                setattr(config, key, bool(overrides[key]))
        if 'warm_window' in overrides:
            config.warm_window = float(overrides['warm_window'])
        if 'sf_variant' in overrides:
            config.sf_variant = str(overrides['sf_variant'])
        config.validate()
        return config

    def validate(self):
        if self.threshold is not None and not 0.0 <= self.threshold < 1.0:
            raise ValueError(f"threshold must lie in [0, 1), got {self.threshold}")
        if self.warm_window < 0:
            raise ValueError(f"warm_window must be nonnegative, got {self.warm_window}")
        if not 0.0 < self.lambda_prime_max < 1.0:
            raise ValueError(f"lambda_prime_max must lie in (0, 1), got {self.lambda_prime_max}")
        for name in ('rho_min', 's_min', 'c_min'):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {value}")
        if self.sf_variant not in ('gallager78', 'ds2_81'):
            raise ValueError(f"sf_variant must be gallager78 or ds2_81, got {self.sf_variant}")

    def grid_for(self, kind: str) -> GridConfig:
        """Explicit grid override, else bounds.<kind> from the YAML"""
        return self.grid or GridConfig.from_config(f'bounds.{kind}')

    def threshold_for(self, target: str, n: int) -> float:
        if self.threshold is not None:
            return self.threshold
        if target == 'bit':
            return self.threshold_bit_scale / max(n, 1)
        return self.threshold_block

    def with_grid(self, grid: GridConfig) -> "BoundConfig":
        return replace(self, grid=grid)

    def describe(self) -> Dict:
        return {
            "threshold": self.threshold,
            "threshold_block": self.threshold_block,
            "threshold_bit_scale": self.threshold_bit_scale,
            "warm_window": self.warm_window,
            "expurgate": self.expurgate,
            "lambda_prime_max": self.lambda_prime_max,
            "rho_min": self.rho_min,
            "s_min": self.s_min,
            "c_min": self.c_min,
            "sf_variant": self.sf_variant,
            "finite_length": self.finite_length,
            "grid": None if self.grid is None else {"coarse": self.grid.coarse, "refine": self.grid.refine_rounds},
            "quadrature": {
                "nodes_per_panel": self.quadrature.nodes_per_panel,
                "panel_width": self.quadrature.panel_width,
                "margin": self.quadrature.margin,
                "theta_nodes": self.quadrature.theta_nodes,
            },
        }


# =============================================================================
# EVALUATOR INTERFACE
# =============================================================================

class SubcodeEvaluator:
    """
    Base class of the per-subcode optimizers

    Subclasses set kind/tag and implement box, objective, fallback_point and
    params. objective(log_ah, h) returns a vectorized f(points[m, d]) -> -ln bound.
    section names the bounds.<section> grid when it differs from kind.
    """
    kind = ''
    tag = 'BOUND'
    section = ''

    def __init__(self, n: int, config: BoundConfig):
        if n < 1:
            raise ValueError(f"Block length must be positive, got {n}")
        self.n = n
        self.config = config

    def box(self) -> List[List[float]]:
        raise NotImplementedError

    def objective(self, log_ah: float, h: int) -> Callable[[np.ndarray], np.ndarray]:
        raise NotImplementedError

    def fallback_point(self) -> np.ndarray:
        raise NotImplementedError

    def params(self, point: np.ndarray) -> Dict[str, float]:
        raise NotImplementedError

    def evaluate(self, log_ah: float, h: int, point) -> float:
        """ln bound at one parameter point"""
        value = self.objective(log_ah, h)(np.asarray(point, dtype=float).reshape(1, -1))[0]
        return -float(value)

    def fallback(self, log_ah: float, h: int) -> float:
        return self.evaluate(log_ah, h, self.fallback_point())


def _on_inner_edge(point: np.ndarray, local: np.ndarray, full: np.ndarray) -> bool:
    """Optimum sits on a face of the warm window that is not a face of the full box"""
    at_lo = (np.abs(point - local[:, 0]) <= _EDGE_TOL) & (local[:, 0] > full[:, 0] + _EDGE_TOL)
    at_hi = (np.abs(point - local[:, 1]) <= _EDGE_TOL) & (local[:, 1] < full[:, 1] - _EDGE_TOL)
    return bool(np.any(at_lo | at_hi))


def optimize_subcode(evaluator: SubcodeEvaluator, log_ah: float, h: int,
                     start: Optional[np.ndarray] = None) -> Tuple[SubcodeTerm, np.ndarray, bool]:
    """
    Minimize one subcode bound over the evaluator's box

    Returns:
        (term, argmin point, widened) where widened reports a warm-window
        optimum on the window edge that forced a full-box search
    """
    config = evaluator.config
    grid = config.grid_for(evaluator.section or evaluator.kind)
    full = np.asarray(evaluator.box(), dtype=float)
    objective = evaluator.objective(log_ah, h)

    def search(box: np.ndarray):
        try:
            return maximize_box(objective, box, grid.coarse, grid.refine_rounds,
                                vectorized=True, chunk_points=config.chunk_points)
        except NonFiniteError:
            return None

    best, widened = None, False
    if start is not None and config.warm_window > 0:
        local = np.stack([np.maximum(full[:, 0], start - config.warm_window),
                          np.minimum(full[:, 1], start + config.warm_window)], axis=1)
        best = search(local)
        if best is not None and _on_inner_edge(best.argmax, local, full):
            best, widened = None, True
    if best is None:
        best = search(full)

    fallback_point = evaluator.fallback_point()
    fallback_value = evaluator.fallback(log_ah, h)
    if best is None or not math.isfinite(best.max) or -best.max >= fallback_value:
        term = SubcodeTerm(h=h, log_value=fallback_value, params=evaluator.params(fallback_point), method='fallback')
        return term, fallback_point, widened

    term = SubcodeTerm(h=h, log_value=-float(best.max), params=evaluator.params(best.argmax), method=evaluator.kind)
    logging.debug(
        f"[{evaluator.tag}] h={h} | log_bound={term.log_value:.6g} | "
        + " | ".join(f"{k}={v:.4g}" for k, v in term.params.items())
    )
    return term, best.argmax, widened


def run_subcode_chain(evaluator: SubcodeEvaluator, log_mult: np.ndarray, h_values: Sequence[int],
                      union_log: Optional[np.ndarray] = None, target: str = 'block') -> BoundResult:
    """
    Sum the optimized subcode bounds over h_values

    With union_log given, subcodes whose union term lies below the threshold
    take that term directly (counted as skipped), and every optimized value is
    capped by its union term.
    """
    config = evaluator.config
    log_threshold = None
    if union_log is not None:
        threshold = config.threshold_for(target, evaluator.n)
        log_threshold = math.log(threshold) if threshold > 0 else -math.inf

    terms: List[SubcodeTerm] = []
    skipped, widened_count = 0, 0
    previous = None
    for h in h_values:
        h = int(h)
        log_ah = float(log_mult[h])
        if not math.isfinite(log_ah):
            continue
        if log_threshold is not None and union_log[h] < log_threshold:
            terms.append(SubcodeTerm(h=h, log_value=float(union_log[h]), method='union'))
            skipped += 1
            continue

        term, previous, widened = optimize_subcode(evaluator, log_ah, h, start=previous)
        widened_count += int(widened)
        if union_log is not None and union_log[h] < term.log_value:
            term = SubcodeTerm(h=h, log_value=float(union_log[h]), params=term.params, method='union')
        terms.append(term)

    if widened_count:
        logging.warning(
            f"[{evaluator.tag}] Warm window widened to the full box for {widened_count} subcodes"
        )
    result = BoundResult.from_terms(evaluator.kind, terms, skipped=skipped, target=target)
    logging.info(
        f"[{evaluator.tag}] {evaluator.kind} bound | n={evaluator.n} | subcodes={len(terms)} | "
        f"skipped={skipped} | log10_P={result.log10_total:.4f}"
    )
    return result
