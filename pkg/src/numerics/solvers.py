# src/numerics/solvers.py - Fixed-point iteration, box-constrained grid search, bisection
import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from config.settings import CONFIG
from src.core.errors import BadBracketError, NoConvergenceError, NonFiniteError


@dataclass(frozen=True)
class GridConfig:
    """Grid density of maximize_box"""
    coarse: int = 21
    refine_rounds: int = 4

    @classmethod
    def from_config(cls, section: Optional[str] = None) -> "GridConfig":
        """Read `<section>.coarse/refine_rounds`, falling back to the optimizer section"""
        coarse = CONFIG.get('optimizer.coarse', 21)
        refine = CONFIG.get('optimizer.refine_rounds', 4)
        if section:
            coarse = CONFIG.get(f'{section}.coarse', coarse)
            refine = CONFIG.get(f'{section}.refine_rounds', refine)
        return cls(coarse=int(coarse), refine_rounds=int(refine))


@dataclass
class BoxOptResult:
    """Outcome of maximize_box"""
    argmax: np.ndarray
    max: float
    evaluations: int


# =============================================================================
# FIXED POINT
# =============================================================================

def fixed_point(mapping: Callable, init, tol: float = 1e-10, max_iter: int = 500,
                damping: float = 0.5):
    """
    Damped iteration x <- (1 - damping) x + damping * map(x)

    Works on scalars and, elementwise, on numpy arrays (entries that have
    settled are frozen). Returns x with |map(x) - x| <= tol.

    Raises:
        NoConvergenceError: some entry did not settle within max_iter; the
            exception carries the last iterate and the unconverged mask
    """
    if tol <= 0 or max_iter < 1:
        raise ValueError(f"fixed_point needs tol > 0 and max_iter >= 1 (got {tol}, {max_iter})")

    scalar = np.ndim(init) == 0
    x = np.array(init, dtype=float, copy=True).reshape(-1) if scalar else np.array(init, dtype=float, copy=True)
    done = np.zeros(x.shape, dtype=bool)

    for _ in range(max_iter):
        fx = np.asarray(mapping(x[0] if scalar else x), dtype=float).reshape(x.shape)
        finite = np.isfinite(fx)
        settled = finite & (np.abs(fx - x) <= tol)
        done = done | settled
        if np.all(done):
            return float(x[0]) if scalar else x
        step = (1.0 - damping) * x + damping * fx
        x = np.where(done | ~finite, x, step)
        if not np.all(finite | done):
            break

    unconverged = ~done
    logging.debug(f"[SOLVER] Fixed point unconverged entries: {int(np.sum(unconverged))}")
    raise NoConvergenceError(
        f"fixed point did not converge within {max_iter} iterations "
        f"({int(np.sum(unconverged))} entries unsettled)",
        last=float(x[0]) if scalar else x,
        unconverged=unconverged,
    )


# =============================================================================
# BOX-CONSTRAINED GRID MAXIMIZATION
# =============================================================================

def _axes(lo: np.ndarray, hi: np.ndarray, coarse: int) -> List[np.ndarray]:
    return [np.linspace(a, b, coarse) if b > a else np.array([a]) for a, b in zip(lo, hi)]


def _scan(objective: Callable, axes: List[np.ndarray], vectorized: bool,
          chunk_points: int) -> Tuple[Optional[np.ndarray], float, int]:
    """Evaluate on the tensor grid in lexicographic order; first strict maximum wins"""
    best_x, best_val, count = None, -np.inf, 0
    rest = axes[1:]
    rest_size = int(np.prod([len(a) for a in rest])) if rest else 1
    # whole first-axis slices per batch keeps lexicographic order
    slices_per_batch = max(1, chunk_points // max(rest_size, 1))

    for start in range(0, len(axes[0]), slices_per_batch):
        head = axes[0][start:start + slices_per_batch]
        mesh = np.meshgrid(head, *rest, indexing='ij')
        points = np.stack([m.ravel() for m in mesh], axis=-1)
        if vectorized:
            values = np.asarray(objective(points), dtype=float).reshape(-1)
        else:
            values = np.array([objective(p) for p in points], dtype=float)
        count += len(points)

        values = np.where(np.isfinite(values), values, -np.inf)
        idx = int(np.argmax(values))
        if values[idx] > best_val:
            best_val = float(values[idx])
            best_x = points[idx].copy()

    return best_x, best_val, count


def maximize_box(objective: Callable, box: Sequence[Sequence[float]], coarse: int = 21,
                 refine_rounds: int = 4, vectorized: bool = False,
                 chunk_points: Optional[int] = None) -> BoxOptResult:
    """
    Coarse tensor-grid scan followed by local grid shrinking around the incumbent

    Args:
        objective: f(x) -> float, or f(points[m, d]) -> values[m] when vectorized
        box: list of [lo, hi] per dimension
        coarse: grid points per dimension
        refine_rounds: number of local rounds; the window shrinks by 4 each round
        vectorized: evaluate whole batches at once
        chunk_points: batch size cap (defaults to optimizer.chunk_points)

    Non-finite objective values are treated as infeasible points. Ties keep the
    lexicographically smallest point, and refinement never loses the incumbent.
    """
    bounds = np.asarray(box, dtype=float).reshape(-1, 2)
    lo, hi = bounds[:, 0], bounds[:, 1]
    if bounds.size == 0 or np.any(lo > hi):
        raise ValueError(f"maximize_box needs a nonempty box with lo <= hi, got {box}")
    if chunk_points is None:
        chunk_points = int(CONFIG.get('optimizer.chunk_points', 250000))

    best_x, best_val, evaluations = _scan(objective, _axes(lo, hi, coarse), vectorized, chunk_points)
    if best_x is None:
        raise NonFiniteError("objective is non-finite at every coarse grid point")

    span = hi - lo
    for _ in range(refine_rounds):
        span = span / 4.0
        local_lo = np.maximum(lo, best_x - span / 2.0)
        local_hi = np.minimum(hi, best_x + span / 2.0)
        x, val, count = _scan(objective, _axes(local_lo, local_hi, coarse), vectorized, chunk_points)
        evaluations += count
        if x is not None and val > best_val:
            best_x, best_val = x, val

    return BoxOptResult(argmax=best_x, max=best_val, evaluations=evaluations)


# =============================================================================
# BISECTION
# =============================================================================

def bisect(predicate: Callable[[float], bool], lo: float, hi: float, tol: float) -> float:
    """
    Smallest x in [lo, hi] (within tol) with predicate(x) true

    Raises:
        BadBracketError: predicate(lo) is true or predicate(hi) is false
    """
    if tol <= 0:
        raise ValueError(f"bisect needs tol > 0, got {tol}")
    if predicate(lo):
        raise BadBracketError(f"predicate already holds at lower end {lo}")
    if not predicate(hi):
        raise BadBracketError(f"predicate fails at upper end {hi}")

    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if predicate(mid):
            hi = mid
        else:
            lo = mid

    return hi
