# src/numerics/quadrature.py - Composite Gauss-Legendre rules over channel outputs
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from config.settings import CONFIG
from src.core.errors import NonFiniteError


@dataclass(frozen=True)
class QuadratureConfig:
    """Composite-rule parameters for continuous-output channels"""
    nodes_per_panel: int = 64
    panel_width: float = 1.0
    margin: float = 12.0
    theta_nodes: int = 256

    @classmethod
    def from_config(cls) -> "QuadratureConfig":
        section = CONFIG.quadrature
        return cls(
            nodes_per_panel=int(section.get('nodes_per_panel', 64)),
            panel_width=float(section.get('panel_width', 1.0)),
            margin=float(section.get('margin', 12.0)),
            theta_nodes=int(section.get('theta_nodes', 256)),
        )


@dataclass(frozen=True)
class Quadrature:
    """Nodes and positive weights of a rule on [-truncation, truncation]"""
    nodes: np.ndarray
    weights: np.ndarray
    truncation: float

    def integrate(self, values: np.ndarray) -> float:
        return float(np.dot(self.weights, values))


@lru_cache(maxsize=64)
def _legendre_reference(n: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = leggauss(n)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def legendre_interval(a: float, b: float, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """n-point Gauss-Legendre nodes/weights mapped to [a, b]"""
    x, w = _legendre_reference(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


@lru_cache(maxsize=256)
def composite_legendre(half_width: float, nodes_per_panel: int = 64,
                       panel_width: float = 1.0) -> Quadrature:
    """
    Composite rule on [-L, L] with panels of (at most) panel_width

    The panel count is rounded up so the window is covered exactly.
    """
    if half_width <= 0:
        raise ValueError(f"Quadrature half-width must be positive, got {half_width}")

    panels = max(1, int(math.ceil(2.0 * half_width / panel_width)))
    edges = np.linspace(-half_width, half_width, panels + 1)
    x, w = _legendre_reference(nodes_per_panel)
    half = 0.5 * np.diff(edges)
    mids = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mids[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    nodes.setflags(write=False)
    weights.setflags(write=False)

    logging.debug(
        f"[QUAD] Built rule | L={half_width:.3f} | panels={panels} | nodes={nodes.size}"
    )
    return Quadrature(nodes=nodes, weights=weights, truncation=float(half_width))


def integrate_output(channel, f: Callable[[np.ndarray], np.ndarray],
                     config: QuadratureConfig = None) -> float:
    """
    Integrate (or sum) a pointwise function over a channel's output alphabet

    Args:
        channel: MbiosChannel
        f: vectorized function of the output value y
        config: quadrature parameters (defaults from bounds_config.yaml)

    Returns:
        Integral over [-L, L] for continuous outputs, exact sum for discrete ones
    """
    outputs, weights = channel.output_grid(config)
    values = np.asarray(f(outputs), dtype=float)

    if not np.all(np.isfinite(values)):
        bad = int(np.sum(~np.isfinite(values)))
        raise NonFiniteError(f"integrand is non-finite at {bad} of {values.size} output points")

    return float(np.dot(weights, values))
