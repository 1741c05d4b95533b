# src/channels/mbios.py - MBIOS channel laws and parallel channel sets
"""
Memoryless binary-input output-symmetric channels and the random-mapper
model of J independent parallel channels.

Conventions:
- BIAWGN with parameter nu = R * Eb/N0 (linear): p(y|0) = N(+sqrt(2 nu), 1),
  p(y|1) = N(-sqrt(2 nu), 1), so the Bhattacharyya constant is exp(-nu).
- BSC(p): outputs y = +1 ("0 received") and y = -1.
- BEC(eps): outputs y = +1, 0 (erasure), -1.
All laws satisfy p(y|0) = p(-y|1).
"""

import json
import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.numerics.logmath import LOG_ZERO, db_to_linear
from src.numerics.quadrature import QuadratureConfig, composite_legendre

_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


class ChannelKind(Enum):
    """Supported MBIOS channel families"""
    BIAWGN = "biawgn"
    BSC = "bsc"
    BEC = "bec"


@dataclass(frozen=True)
class ChannelTable:
    """
    A channel's conditional log-densities on its output nodes

    Outputs with p(y|0) = p(y|1) = 0 are dropped. A discrete channel may keep
    one-sided outputs (BEC: p(+1|1) = 0, p(-1|0) = 0), so either log-density
    can be -inf. log_w holds log quadrature weights (zero for discrete alphabets).
    """
    outputs: np.ndarray
    log_w: np.ndarray
    lp0: np.ndarray
    lp1: np.ndarray

    @property
    def p0_support(self) -> np.ndarray:
        """Mask of outputs with p(y|0) > 0"""
        return np.isfinite(self.lp0)

    @property
    def one_sided(self) -> bool:
        """True when some output is reachable from one input only"""
        return bool(np.any(~np.isfinite(self.lp0)) or np.any(~np.isfinite(self.lp1)))

    @property
    def llr(self) -> np.ndarray:
        """ln p(y|1)/p(y|0) on the p(y|0) support, -inf where p(y|1) = 0"""
        support = self.p0_support
        return self.lp1[support] - self.lp0[support]


@dataclass(frozen=True)
class MbiosChannel:
    """A single MBIOS channel: kind plus its scalar parameter (nu, p or eps)"""
    kind: ChannelKind
    parameter: float

    def __post_init__(self):
        if not isinstance(self.kind, ChannelKind):
            object.__setattr__(self, 'kind', ChannelKind(str(self.kind).lower()))
        value = float(self.parameter)
        object.__setattr__(self, 'parameter', value)

        if self.kind is ChannelKind.BIAWGN and not (value >= 0.0 and math.isfinite(value)):
            raise ValueError(f"BIAWGN parameter nu must be finite and >= 0, got {value}")
        if self.kind is ChannelKind.BSC and not (0.0 <= value <= 0.5):
            raise ValueError(f"BSC crossover must lie in [0, 1/2], got {value}")
        if self.kind is ChannelKind.BEC and not (0.0 <= value <= 1.0):
            raise ValueError(f"BEC erasure probability must lie in [0, 1], got {value}")

    # -------------------------------------------------------------------------
    # Constructors
    # -------------------------------------------------------------------------

    @classmethod
    def biawgn(cls, nu: float) -> "MbiosChannel":
        return cls(ChannelKind.BIAWGN, nu)

    @classmethod
    def biawgn_from_ebno_db(cls, ebno_db: float, rate: float) -> "MbiosChannel":
        """nu = R * Eb/N0 with Eb/N0 given in dB"""
        return cls(ChannelKind.BIAWGN, rate * db_to_linear(ebno_db))

    @classmethod
    def bsc(cls, crossover: float) -> "MbiosChannel":
        return cls(ChannelKind.BSC, crossover)

    @classmethod
    def bec(cls, erasure: float) -> "MbiosChannel":
        return cls(ChannelKind.BEC, erasure)

    # -------------------------------------------------------------------------
    # Channel law
    # -------------------------------------------------------------------------

    @property
    def is_continuous(self) -> bool:
        return self.kind is ChannelKind.BIAWGN

    @property
    def beta(self) -> float:
        """Signal amplitude sqrt(2 nu) of the BIAWGN law"""
        if self.kind is not ChannelKind.BIAWGN:
            raise ValueError(f"beta is defined for BIAWGN only, not {self.kind.value}")
        return math.sqrt(2.0 * self.parameter)

    def window(self, config: Optional[QuadratureConfig] = None) -> float:
        config = config or QuadratureConfig.from_config()
        return self.beta + config.margin

    def _discrete_law(self) -> Tuple[np.ndarray, np.ndarray]:
        """(outputs, p(y|0)) of a discrete channel"""
        if self.kind is ChannelKind.BSC:
            p = self.parameter
            return np.array([1.0, -1.0]), np.array([1.0 - p, p])
        eps = self.parameter
        return np.array([1.0, 0.0, -1.0]), np.array([1.0 - eps, eps, 0.0])

    def log_density(self, y, x: int) -> np.ndarray:
        """ln p(y|x) evaluated elementwise"""
        y_arr = np.asarray(y, dtype=float)
        if x not in (0, 1):
            raise ValueError(f"Binary input must be 0 or 1, got {x}")

        if self.kind is ChannelKind.BIAWGN:
            mean = self.beta if x == 0 else -self.beta
            return -0.5 * (y_arr - mean) ** 2 - _HALF_LOG_2PI

        outputs, p0 = self._discrete_law()
        # symmetry: p(y|1) = p(-y|0)
        lookup_y = y_arr if x == 0 else -y_arr
        result = np.full(y_arr.shape, LOG_ZERO)
        for value, prob in zip(outputs, p0):
            if prob > 0:
                result = np.where(np.isclose(lookup_y, value), math.log(prob), result)
        return result

    def density(self, y, x: int) -> np.ndarray:
        return np.exp(self.log_density(y, x))

    def output_grid(self, config: Optional[QuadratureConfig] = None) -> Tuple[np.ndarray, np.ndarray]:
        """(outputs, weights): quadrature nodes for BIAWGN, the alphabet with unit weights otherwise"""
        if self.is_continuous:
            config = config or QuadratureConfig.from_config()
            rule = composite_legendre(self.window(config), config.nodes_per_panel, config.panel_width)
            return rule.nodes, rule.weights
        outputs, _ = self._discrete_law()
        return outputs, np.ones_like(outputs)

    def table(self, config: Optional[QuadratureConfig] = None) -> ChannelTable:
        return _channel_table(self, config or QuadratureConfig.from_config())

    def describe(self) -> Dict:
        return {"kind": self.kind.value, "parameter": self.parameter}


@lru_cache(maxsize=512)
def _channel_table(channel: MbiosChannel, config: QuadratureConfig) -> ChannelTable:
    outputs, weights = channel.output_grid(config)
    lp0 = channel.log_density(outputs, 0)
    lp1 = channel.log_density(outputs, 1)
    keep = (np.isfinite(lp0) | np.isfinite(lp1)) & (weights > 0)
    with np.errstate(divide='ignore'):
        log_w = np.log(weights[keep])
    return ChannelTable(outputs=outputs[keep], log_w=log_w, lp0=lp0[keep], lp1=lp1[keep])


@dataclass(frozen=True)
class ParallelChannelSet:
    """
    J independent MBIOS channels with assignment probabilities alpha_j

    rate is optional metadata (needed only when channels are described in Eb/N0).
    """
    channels: Tuple[MbiosChannel, ...]
    alphas: Tuple[float, ...]
    rate: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, 'channels', tuple(self.channels))
        object.__setattr__(self, 'alphas', tuple(float(a) for a in self.alphas))

        if len(self.channels) < 1:
            raise ValueError("A channel set needs at least one channel")
        if len(self.channels) != len(self.alphas):
            raise ValueError(
                f"Channel/alpha length mismatch: {len(self.channels)} channels, {len(self.alphas)} alphas"
            )
        if any(a < 0 for a in self.alphas):
            raise ValueError(f"Assignment probabilities must be nonnegative, got {self.alphas}")
        if abs(sum(self.alphas) - 1.0) > 1e-12:
            raise ValueError(f"Assignment probabilities must sum to 1, got {sum(self.alphas)!r}")

    @property
    def J(self) -> int:
        return len(self.channels)

    @property
    def log_alphas(self) -> np.ndarray:
        with np.errstate(divide='ignore'):
            return np.log(np.asarray(self.alphas))

    @property
    def all_biawgn(self) -> bool:
        return all(ch.kind is ChannelKind.BIAWGN for ch in self.channels)

    @property
    def nus(self) -> np.ndarray:
        """BIAWGN parameters nu_j (raises for other kinds)"""
        if not self.all_biawgn:
            raise ValueError("nus are defined only for all-BIAWGN sets")
        return np.array([ch.parameter for ch in self.channels])

    def tables(self, config: Optional[QuadratureConfig] = None) -> List[ChannelTable]:
        config = config or QuadratureConfig.from_config()
        return [ch.table(config) for ch in self.channels]

    # -------------------------------------------------------------------------
    # Constructors / descriptors
    # -------------------------------------------------------------------------

    @classmethod
    def single(cls, channel: MbiosChannel) -> "ParallelChannelSet":
        return cls(channels=(channel,), alphas=(1.0,))

    @classmethod
    def biawgn_ebno(cls, rate: float, ebnos_db: Sequence[float],
                    alphas: Sequence[float]) -> "ParallelChannelSet":
        """BIAWGN set from per-channel Eb/N0 in dB"""
        channels = tuple(MbiosChannel.biawgn_from_ebno_db(x, rate) for x in ebnos_db)
        return cls(channels=channels, alphas=tuple(alphas), rate=rate)

    @classmethod
    def from_descriptor(cls, descriptor: Dict) -> "ParallelChannelSet":
        """
        Build from the JSON descriptor

        { "rate": R, "channels": [ {"kind": "biawgn", "ebno_db": x}, ... ], "alphas": [...] }

        BIAWGN entries may give "nu" instead of "ebno_db"; BSC/BEC entries give "p" / "eps".
        """
        rate = descriptor.get('rate')
        rate = float(rate) if rate is not None else None
        channels = []
        for i, entry in enumerate(descriptor.get('channels', [])):
            kind = ChannelKind(str(entry.get('kind', '')).lower())
            if kind is ChannelKind.BIAWGN:
                if 'nu' in entry:
                    channels.append(MbiosChannel.biawgn(entry['nu']))
                elif 'ebno_db' in entry:
                    if rate is None:
                        raise ValueError(f"Channel {i}: ebno_db given but descriptor has no rate")
                    channels.append(MbiosChannel.biawgn_from_ebno_db(float(entry['ebno_db']), rate))
                else:
                    raise ValueError(f"Channel {i}: BIAWGN entry needs 'ebno_db' or 'nu'")
            elif kind is ChannelKind.BSC:
                channels.append(MbiosChannel.bsc(entry['p']))
            else:
                channels.append(MbiosChannel.bec(entry['eps']))

        alphas = descriptor.get('alphas')
        if alphas is None:
            alphas = [1.0 / len(channels)] * len(channels) if channels else []
        logging.debug(f"[CHANNEL] Descriptor parsed | J={len(channels)} | alphas={alphas}")
        return cls(channels=tuple(channels), alphas=tuple(alphas), rate=rate)

    @classmethod
    def from_json(cls, path) -> "ParallelChannelSet":
        with open(Path(path), 'r') as f:
            return cls.from_descriptor(json.load(f))

    def describe(self) -> Dict:
        return {
            "rate": self.rate,
            "channels": [ch.describe() for ch in self.channels],
            "alphas": list(self.alphas),
        }
