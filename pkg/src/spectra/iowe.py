# src/spectra/iowe.py - Log-domain input-output weight enumerators and distance spectra
"""
Enumerator containers

Iowe holds ln A_{w,h} as a dense (k+1) x (n+1) matrix; -inf marks an empty
(w, h) cell. DistanceSpectrum holds the marginal ln A_h and, when input
weights are known, the bit-weighted marginal ln A'_h = ln sum_w (w/k) A_{w,h}.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterator, Optional, Tuple

import numpy as np
from scipy.special import logsumexp

from src.numerics.logmath import LN2, LOG_ZERO, log_binomial

_COUNT_TOL = 1e-8


def _freeze(array: np.ndarray) -> np.ndarray:
    frozen = np.array(array, dtype=float, copy=True)
    frozen.setflags(write=False)
    return frozen


def _lse(values: np.ndarray, axis=None):
    with np.errstate(divide='ignore'):
        return logsumexp(values, axis=axis)


@dataclass(frozen=True)
class Iowe:
    """
    Average input-output weight enumerator of a (k, n) code or ensemble

    Args:
        n: output block length
        k: input block length
        log_a: ln A_{w,h}, shape (k+1, n+1)
        label: free-form ensemble tag carried into file headers
    """
    n: int
    k: int
    log_a: np.ndarray
    label: str = ""

    def __post_init__(self):
        if self.n < 0 or self.k < 0:
            raise ValueError(f"Block lengths must be nonnegative, got n={self.n}, k={self.k}")
        table = np.asarray(self.log_a, dtype=float)
        if table.shape != (self.k + 1, self.n + 1):
            raise ValueError(
                f"IOWE table shape {table.shape} does not match (k+1, n+1) = ({self.k + 1}, {self.n + 1})"
            )
        if np.any(np.isnan(table)) or np.any(np.isposinf(table)):
            raise ValueError("IOWE entries must be finite logs or -inf")
        object.__setattr__(self, 'log_a', _freeze(table))

    # -------------------------------------------------------------------------
    # Constructors
    # -------------------------------------------------------------------------

    @classmethod
    def empty(cls, n: int, k: int, label: str = "") -> "Iowe":
        return cls(n=n, k=k, log_a=np.full((k + 1, n + 1), LOG_ZERO), label=label)

    @classmethod
    def from_entries(cls, n: int, k: int, entries: Dict[Tuple[int, int], float],
                     label: str = "") -> "Iowe":
        """Build from a {(w, h): ln A_{w,h}} mapping; duplicate keys are rejected upstream"""
        table = np.full((k + 1, n + 1), LOG_ZERO)
        for (w, h), value in entries.items():
            if not (0 <= w <= k and 0 <= h <= n):
                raise ValueError(f"Entry ({w}, {h}) outside 0 <= w <= {k}, 0 <= h <= {n}")
            table[w, h] = value
        return cls(n=n, k=k, log_a=table, label=label)

    @classmethod
    def identity(cls, k: int) -> "Iowe":
        """Uncoded pass-through: A_{w,w} = C(k, w)"""
        table = np.full((k + 1, k + 1), LOG_ZERO)
        w = np.arange(k + 1)
        table[w, w] = log_binomial(k, w)
        return cls(n=k, k=k, log_a=table, label=f"identity({k})")

    # -------------------------------------------------------------------------
    # Access
    # -------------------------------------------------------------------------

    def get(self, w: int, h: int) -> float:
        if not (0 <= w <= self.k and 0 <= h <= self.n):
            return LOG_ZERO
        return float(self.log_a[w, h])

    def entries(self) -> Iterator[Tuple[int, int, float]]:
        """Nonzero entries (w, h, ln A_{w,h}) in row-major order"""
        rows, cols = np.nonzero(np.isfinite(self.log_a))
        for w, h in zip(rows, cols):
            yield int(w), int(h), float(self.log_a[w, h])

    @property
    def log_total(self) -> float:
        """ln sum_{w,h} A_{w,h}; equals k ln 2 for a complete enumerator"""
        return float(_lse(self.log_a))

    @property
    def rate(self) -> float:
        return self.k / self.n if self.n else 0.0

    def check_count(self, tol: float = _COUNT_TOL) -> bool:
        """True when the enumerator accounts for exactly 2^k codewords"""
        return abs(self.log_total - self.k * LN2) <= tol

    def with_label(self, label: str) -> "Iowe":
        return Iowe(n=self.n, k=self.k, log_a=self.log_a, label=label)


@dataclass(frozen=True)
class DistanceSpectrum:
    """
    Distance spectrum ln A_h, h = 0..n, with optional bit-weighted ln A'_h

    deterministic marks the spectrum of one specific code (expurgation is
    allowed); ensemble averages leave it False.
    """
    n: int
    k: int
    log_a: np.ndarray
    log_weighted: Optional[np.ndarray] = None
    deterministic: bool = False
    label: str = ""

    def __post_init__(self):
        spectrum = np.asarray(self.log_a, dtype=float)
        if spectrum.shape != (self.n + 1,):
            raise ValueError(f"Spectrum length {spectrum.shape} does not match n+1 = {self.n + 1}")
        object.__setattr__(self, 'log_a', _freeze(spectrum))

        if self.log_weighted is not None:
            weighted = np.asarray(self.log_weighted, dtype=float)
            if weighted.shape != spectrum.shape:
                raise ValueError("Bit-weighted spectrum must have the same length as the spectrum")
            if np.any(weighted > spectrum + 1e-9):
                raise ValueError("Bit-weighted spectrum exceeds the spectrum (A'_h > A_h)")
            object.__setattr__(self, 'log_weighted', _freeze(weighted))

    @property
    def rate(self) -> float:
        return self.k / self.n if self.n else 0.0

    @property
    def has_bit_weights(self) -> bool:
        return self.log_weighted is not None

    @property
    def log_total(self) -> float:
        return float(_lse(self.log_a))

    def support(self, h_max: Optional[int] = None) -> np.ndarray:
        """Weights 1 <= h <= h_max with A_h > 0"""
        h_max = self.n if h_max is None else min(int(h_max), self.n)
        h = np.arange(1, h_max + 1)
        return h[np.isfinite(self.log_a[1:h_max + 1])]

    def multiplicities(self, target: str = 'block') -> np.ndarray:
        """ln A_h for block error, ln A'_h for bit error"""
        if target == 'bit':
            if self.log_weighted is None:
                raise ValueError("Spectrum carries no bit weights")
            return self.log_weighted
        return self.log_a


# =============================================================================
# MARGINALS
# =============================================================================

def bit_weight(iowe: Iowe) -> np.ndarray:
    """ln A'_h = ln sum_w (w/k) A_{w,h}"""
    if iowe.k == 0:
        return np.full(iowe.n + 1, LOG_ZERO)
    w = np.arange(iowe.k + 1, dtype=float)
    with np.errstate(divide='ignore'):
        log_ratio = np.log(w / iowe.k)
    return np.asarray(_lse(iowe.log_a + log_ratio[:, None], axis=0), dtype=float)


def marginalize(iowe: Iowe) -> DistanceSpectrum:
    """A_h = sum_w A_{w,h}, carried together with the bit-weighted marginal"""
    log_a = np.asarray(_lse(iowe.log_a, axis=0), dtype=float)
    spectrum = DistanceSpectrum(
        n=iowe.n,
        k=iowe.k,
        log_a=log_a,
        log_weighted=bit_weight(iowe),
        label=iowe.label,
    )
    logging.debug(
        f"[SPECTRUM] Marginalized {iowe.label or 'iowe'} | n={iowe.n} | k={iowe.k} | "
        f"log_total={spectrum.log_total:.6f}"
    )
    return spectrum
