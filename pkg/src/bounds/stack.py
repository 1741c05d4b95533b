# src/bounds/stack.py - Channel tables on a common output axis, log-domain power helpers
"""
The bound objectives are evaluated for a whole batch of parameter points at
once: arrays are shaped (points, channels, outputs). ChannelStack pads the
per-channel output tables to a common width; padded slots carry log weight
-inf and are masked out of every sum.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence

import numpy as np
from scipy.special import logsumexp

from src.channels.mbios import ParallelChannelSet
from src.numerics.logmath import LOG_ZERO
from src.numerics.quadrature import QuadratureConfig


def smul(coef, x):
    """coef * x elementwise with the convention 0 * (+-inf) = 0"""
    with np.errstate(invalid='ignore'):
        return np.where(np.asarray(coef) == 0, 0.0, np.multiply(coef, x))


def log_pow(lp, exponent):
    """exponent * ln p for exponent >= 0, keeping p = 0 at zero (0^0 read as 0)"""
    with np.errstate(invalid='ignore'):
        return np.where(np.isneginf(lp), LOG_ZERO, np.multiply(exponent, lp))


@dataclass(frozen=True)
class ChannelStack:
    """
    Stacked channel tables

    log_alphas: (J,)   log_w, lp0, lp1: (J, Y) padded with -inf
    """
    log_alphas: np.ndarray
    log_w: np.ndarray
    lp0: np.ndarray
    lp1: np.ndarray
    widths: tuple

    @property
    def J(self) -> int:
        return self.log_w.shape[0]

    @property
    def valid(self) -> np.ndarray:
        return np.isfinite(self.log_w)

    @property
    def forward(self) -> np.ndarray:
        """Outputs with p(y|0) > 0"""
        return self.valid & np.isfinite(self.lp0)

    @property
    def mirror(self) -> np.ndarray:
        """Outputs with p(y|0) = 0 < p(y|1)"""
        return self.valid & ~np.isfinite(self.lp0) & np.isfinite(self.lp1)

    def pad(self, per_channel: Sequence[np.ndarray], fill: float = LOG_ZERO) -> np.ndarray:
        """Lay out one array per channel table on the padded (J, Y) grid"""
        out = np.full(self.log_w.shape, fill)
        for j, values in enumerate(per_channel):
            out[j, :self.widths[j]] = values
        return out

    def integrate(self, log_integrand: np.ndarray) -> np.ndarray:
        """ln sum_y w(y) exp(log_integrand) per channel; (P, J, Y) -> (P, J)"""
        masked = np.where(self.valid, self.log_w + log_integrand, LOG_ZERO)
        with np.errstate(invalid='ignore', over='ignore'):
            return logsumexp(masked, axis=-1)

    def mix(self, per_channel: np.ndarray) -> np.ndarray:
        """ln sum_j alpha_j exp(per_channel) over the last axis, alpha_j = 0 channels dropped"""
        live = np.isfinite(self.log_alphas)
        terms = np.where(live, self.log_alphas + np.where(live, per_channel, 0.0), LOG_ZERO)
        with np.errstate(invalid='ignore', over='ignore'):
            return logsumexp(terms, axis=-1)


def channel_stack(channel_set: ParallelChannelSet, config: Optional[QuadratureConfig] = None) -> ChannelStack:
    return _build_stack(channel_set, config or QuadratureConfig.from_config())


@lru_cache(maxsize=256)
def _build_stack(channel_set: ParallelChannelSet, config: QuadratureConfig) -> ChannelStack:
    tables = channel_set.tables(config)
    widths = tuple(t.outputs.size for t in tables)
    width = max(widths)

    def padded(rows: List[np.ndarray]) -> np.ndarray:
        out = np.full((len(rows), width), LOG_ZERO)
        for j, row in enumerate(rows):
            out[j, :row.size] = row
        out.setflags(write=False)
        return out

    log_alphas = channel_set.log_alphas
    log_alphas.setflags(write=False)
    return ChannelStack(
        log_alphas=log_alphas,
        log_w=padded([t.log_w for t in tables]),
        lp0=padded([t.lp0 for t in tables]),
        lp1=padded([t.lp1 for t in tables]),
        widths=widths,
    )


def as_column(values, ndim: int = 3) -> np.ndarray:
    """Reshape a (P,) parameter vector to broadcast against (P, J, Y) arrays"""
    return np.asarray(values, dtype=float).reshape((-1,) + (1,) * (ndim - 1))
