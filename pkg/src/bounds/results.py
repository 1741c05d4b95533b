# src/bounds/results.py - Result containers shared by the bound evaluators
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from src.numerics.logmath import LOG_ZERO, log_sum_exp

LN10 = math.log(10.0)


@dataclass
class TiltingSolution:
    """
    Optimized DS2 tilting measures for one (delta, lambda, rho)

    psi(y; j) = beta_j p(y|0; j) [1 + k (p(y|1; j)/p(y|0; j))^lambda]^rho
    """
    delta: float
    lam: float
    rho: float
    k: float
    betas: np.ndarray
    iterations: int = 0
    bracketed: bool = False

    def log_psi(self, tables) -> List[np.ndarray]:
        """ln psi(y; j) on each channel table's nodes (p(y|0) > 0 part)"""
        log_k = math.log(self.k) if self.k > 0 else LOG_ZERO
        result = []
        for beta, table in zip(self.betas, tables):
            support = table.p0_support
            lam_llr = table.llr * self.lam if self.lam > 0 else np.zeros(int(np.sum(support)))
            ell = np.logaddexp(0.0, log_k + lam_llr)
            result.append(math.log(beta) + table.lp0[support] + self.rho * ell)
        return result

    def normalization(self, tables) -> np.ndarray:
        """sum_y psi(y; j) per channel, 1 up to quadrature error"""
        totals = []
        for log_psi, table in zip(self.log_psi(tables), tables):
            totals.append(float(np.sum(np.exp(table.log_w[table.p0_support] + log_psi))))
        return np.array(totals)


@dataclass
class SubcodeTerm:
    """
    Contribution of one constant-weight subcode (h) or of a whole-code term (h=None)

    method is the evaluator that produced log_value: the bound kind, 'union'
    for the threshold shortcut, or 'fallback' for the analytic endpoint.
    """
    h: Optional[int]
    log_value: float
    params: Dict[str, float] = field(default_factory=dict)
    method: str = ''

    def to_dict(self) -> Dict:
        return {"h": self.h, "log_value": self.log_value, "method": self.method, **self.params}


@dataclass
class BoundResult:
    """
    Upper bound on the block (or bit) error probability

    log_total is the logsumexp of the per-subcode contributions, clamped at
    ln 1; log_unclamped keeps the raw sum.
    """
    kind: str
    log_total: float
    per_subcode: List[SubcodeTerm] = field(default_factory=list)
    skipped: int = 0
    target: str = 'block'
    log_unclamped: float = LOG_ZERO

    @classmethod
    def from_terms(cls, kind: str, terms: List[SubcodeTerm], skipped: int = 0,
                   target: str = 'block') -> "BoundResult":
        raw = log_sum_exp([t.log_value for t in terms])
        total = min(raw, 0.0)
        if raw > 0.0:
            logging.debug(f"[BOUND] {kind} total clamped to 1 | log_total={raw:.6g}")
        return cls(kind=kind, log_total=total, per_subcode=list(terms), skipped=skipped,
                   target=target, log_unclamped=raw)

    @property
    def log10_total(self) -> float:
        return self.log_total / LN10

    @property
    def value(self) -> float:
        return math.exp(self.log_total)

    def term(self, h: Optional[int]) -> Optional[SubcodeTerm]:
        for t in self.per_subcode:
            if t.h == h:
                return t
        return None

    def log_values(self) -> Dict[Optional[int], float]:
        return {t.h: t.log_value for t in self.per_subcode}

    def diagnostics(self) -> Dict:
        return {
            "kind": self.kind,
            "target": self.target,
            "log_total": self.log_total,
            "log_unclamped": self.log_unclamped,
            "skipped": self.skipped,
            "subcodes": [t.to_dict() for t in self.per_subcode],
        }


@dataclass
class MsfPartition:
    """Split of the weights 1..n: union bound on psi_plus, SF bound on psi_minus"""
    n: int
    delta_l: float
    delta_r: float
    psi_plus: List[int] = field(default_factory=list)
    psi_minus: List[int] = field(default_factory=list)

    @classmethod
    def from_range(cls, n: int, h_lo: int, h_hi: int, delta_l: float, delta_r: float) -> "MsfPartition":
        minus = list(range(h_lo, h_hi + 1))
        plus = [h for h in range(1, n + 1) if h < h_lo or h > h_hi]
        return cls(n=n, delta_l=delta_l, delta_r=delta_r, psi_plus=plus, psi_minus=minus)

    @classmethod
    def all_union(cls, n: int) -> "MsfPartition":
        return cls(n=n, delta_l=math.nan, delta_r=math.nan, psi_plus=list(range(1, n + 1)), psi_minus=[])

    @property
    def is_split(self) -> bool:
        return bool(self.psi_minus)
