# src/spectra/ensembles.py - Ensemble and component enumerators, uniform-interleaver concatenation
"""
Average IOWEs of the uniformly interleaved accumulate-based ensembles.

- Random linear codes: A_h = C(n, h) 2^{-n(1-R)}
- NSRA(N, q): repeat q times, interleave, accumulate (non-systematic)
- SPRA(N, q, p): systematic bits plus REP(q) -> interleaver -> SPC(p) -> ACC
- SPARA(N, M): systematic precoder (M bits passed, N-M accumulated) ahead of SPRA

Component enumerators (REP, ACC, SPC) compose through serial_concat, which
averages over a uniform interleaver between the two codes.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Dict, Optional

import numpy as np
from scipy.special import logsumexp

from src.core.errors import DimensionMismatchError
from src.numerics.logmath import LN2, LOG_ZERO, log_binomial, log_convolve
from src.spectra.iowe import DistanceSpectrum, Iowe, marginalize

# Memory cap (float entries) for one serial_concat batch
_CONCAT_BATCH = 4_000_000


# =============================================================================
# RANDOM LINEAR CODES
# =============================================================================

def random_code_spectrum(n: int, rate: float) -> DistanceSpectrum:
    """
    Average spectrum of the binary random linear ensemble

    A_0 = 1 and A_h = C(n, h) 2^{-n(1-R)} for h >= 1. The bit-weighted
    marginal is A'_h = A_h / 2.
    """
    if n < 1:
        raise ValueError(f"Block length must be positive, got {n}")
    if not 0.0 < rate < 1.0:
        raise ValueError(f"Rate must lie in (0, 1), got {rate}")
    k = int(round(n * rate))
    if abs(k - n * rate) > 1e-9:
        raise ValueError(f"n*R must be integral, got n={n}, R={rate}")

    h = np.arange(n + 1)
    log_a = log_binomial(n, h) - n * (1.0 - rate) * LN2
    log_a[0] = 0.0
    weighted = log_a - LN2
    weighted[0] = LOG_ZERO

    logging.debug(f"[SPECTRUM] Random ensemble | n={n} | k={k}")
    return DistanceSpectrum(n=n, k=k, log_a=log_a, log_weighted=weighted, label=f"random(n={n},R={rate:.6g})")


# =============================================================================
# NSRA (closed form)
# =============================================================================

def nsra_iowe(N: int, q: int) -> Iowe:
    """
    Uniformly interleaved non-systematic repeat-accumulate ensemble

    A_{w,h} = C(N,w) C(qN-h, floor(qw/2)) C(h-1, ceil(qw/2)-1) / C(qN, qw), A_{0,0} = 1
    """
    if N < 1 or q < 2:
        raise ValueError(f"NSRA needs N >= 1 and q >= 2, got N={N}, q={q}")

    n = q * N
    w = np.arange(1, N + 1)[:, None]
    h = np.arange(n + 1)[None, :]
    qw = q * w
    table = (
        log_binomial(N, w)
        + log_binomial(n - h, qw // 2)
        + log_binomial(h - 1, (qw + 1) // 2 - 1)
        - log_binomial(n, qw)
    )

    log_a = np.full((N + 1, n + 1), LOG_ZERO)
    log_a[1:, :] = table
    log_a[0, 0] = 0.0
    logging.debug(f"[SPECTRUM] NSRA | N={N} | q={q} | n={n}")
    return Iowe(n=n, k=N, log_a=log_a, label=f"nsra(N={N},q={q})")


# =============================================================================
# COMPONENT CODES
# =============================================================================

class ComponentKind(Enum):
    """Building blocks of the accumulate-based ensembles"""
    REP = "rep"
    ACC = "acc"
    SPC = "spc"


def rep_iowe(q: int, k: int) -> Iowe:
    """REP(q) on k bits: A_{w,qw} = C(k, w)"""
    if q < 1 or k < 0:
        raise ValueError(f"REP needs q >= 1 and k >= 0, got q={q}, k={k}")
    log_a = np.full((k + 1, q * k + 1), LOG_ZERO)
    w = np.arange(k + 1)
    log_a[w, q * w] = log_binomial(k, w)
    return Iowe(n=q * k, k=k, log_a=log_a, label=f"rep(q={q},k={k})")


def acc_iowe(n: int) -> Iowe:
    """Accumulator of length n: A_{w,d} = C(n-d, floor(w/2)) C(d-1, ceil(w/2)-1), A_{0,0} = 1"""
    if n < 1:
        raise ValueError(f"ACC needs n >= 1, got {n}")
    w = np.arange(1, n + 1)[:, None]
    d = np.arange(n + 1)[None, :]
    log_a = np.full((n + 1, n + 1), LOG_ZERO)
    log_a[1:, :] = log_binomial(n - d, w // 2) + log_binomial(d - 1, (w + 1) // 2 - 1)
    log_a[0, 0] = 0.0
    return Iowe(n=n, k=n, log_a=log_a, label=f"acc(n={n})")


def _spc_group_polynomials(p: int):
    """Log coefficients of the even and odd parts of (1 + W)^p"""
    i = np.arange(p + 1)
    coeffs = log_binomial(p, i)
    even = np.where(i % 2 == 0, coeffs, LOG_ZERO)
    odd = np.where(i % 2 == 1, coeffs, LOG_ZERO)
    return even, odd


def spc_iowe(p: int, groups: int) -> Iowe:
    """
    Parity outputs of `groups` independent SPC(p) checks on p*groups input bits

    A_{w,d} = C(m, d) [W^w] E(W)^{m-d} O(W)^d, with E and O the even and odd
    parts of (1 + W)^p and m the number of groups.
    """
    if p < 1 or groups < 1:
        raise ValueError(f"SPC needs p >= 1 and at least one group, got p={p}, groups={groups}")

    m = groups
    even, odd = _spc_group_polynomials(p)
    even_pows = [np.array([0.0])]
    odd_pows = [np.array([0.0])]
    for _ in range(m):
        even_pows.append(log_convolve(even_pows[-1], even))
        odd_pows.append(log_convolve(odd_pows[-1], odd))

    k = p * m
    log_a = np.full((k + 1, m + 1), LOG_ZERO)
    for d in range(m + 1):
        poly = log_convolve(even_pows[m - d], odd_pows[d])
        log_a[:poly.size, d] = log_binomial(m, d) + poly[:k + 1]

    return Iowe(n=m, k=k, log_a=log_a, label=f"spc(p={p},groups={m})")


def spc3_iowe_closed_form(groups: int) -> Iowe:
    """
    SPC(3) enumerator from the explicit double sum

    A_{w,d} = C(m,d) sum_j sum_i C(d,i) C(m-d,j-i) 3^{d+j-2i}, restricted to w = 2j + d
    """
    m = groups
    k = 3 * m
    log_a = np.full((k + 1, m + 1), LOG_ZERO)
    ln3 = math.log(3.0)
    for d in range(m + 1):
        j = np.arange(m + 1)[:, None]
        i = np.arange(m + 1)[None, :]
        terms = log_binomial(d, i) + log_binomial(m - d, j - i) + (d + j - 2 * i) * ln3
        with np.errstate(divide='ignore'):
            coeff = logsumexp(terms, axis=1)
        w = 2 * np.arange(m + 1) + d
        valid = w <= k
        log_a[w[valid], d] = log_binomial(m, d) + coeff[valid]
    return Iowe(n=m, k=k, log_a=log_a, label=f"spc3(groups={m})")


def component_iowe(kind, **params) -> Iowe:
    """
    Enumerator of a component code

    Args:
        kind: ComponentKind or its string value
        params: REP -> q, k; ACC -> n; SPC -> p, groups
    """
    kind = ComponentKind(kind) if not isinstance(kind, ComponentKind) else kind
    if kind is ComponentKind.REP:
        return rep_iowe(int(params['q']), int(params['k']))
    if kind is ComponentKind.ACC:
        return acc_iowe(int(params['n']))
    return spc_iowe(int(params['p']), int(params['groups']))


# =============================================================================
# SERIAL CONCATENATION
# =============================================================================

def serial_concat(outer: Iowe, inner: Iowe) -> Iowe:
    """
    Uniformly interleaved serial concatenation

    A_{w,d} = sum_h outer_{w,h} inner_{h,d} / C(inner.k, h)

    Raises:
        DimensionMismatchError: outer.n != inner.k
    """
    if outer.n != inner.k:
        raise DimensionMismatchError(
            f"outer code length {outer.n} does not match inner input length {inner.k}"
        )

    norm = log_binomial(inner.k, np.arange(inner.k + 1))
    inner_scaled = inner.log_a - norm[:, None]
    # inner rows with no outer mass never contribute
    live = np.isfinite(outer.log_a).any(axis=0) & np.isfinite(inner_scaled).any(axis=1)
    inner_live = inner_scaled[live]
    outer_live = outer.log_a[:, live]

    result = np.full((outer.k + 1, inner.n + 1), LOG_ZERO)
    label = f"{outer.label}>{inner.label}" if outer.label or inner.label else ""
    if not live.any():
        return Iowe(n=inner.n, k=outer.k, log_a=result, label=label)

    per_row = max(1, inner_live.size)
    batch = max(1, _CONCAT_BATCH // per_row)
    for start in range(0, outer.k + 1, batch):
        rows = outer_live[start:start + batch]
        terms = rows[:, :, None] + inner_live[None, :, :]
        with np.errstate(divide='ignore', invalid='ignore'):
            result[start:start + batch] = logsumexp(terms, axis=1)

    return Iowe(n=inner.n, k=outer.k, log_a=result, label=label)


def append_systematic(parity: Iowe, label: str = "") -> Iowe:
    """Systematic code whose parity part has the given enumerator: A_{w,w+d} = parity_{w,d}"""
    n = parity.n + parity.k
    log_a = np.full((parity.k + 1, n + 1), LOG_ZERO)
    for w in range(parity.k + 1):
        log_a[w, w:w + parity.n + 1] = parity.log_a[w]
    return Iowe(n=n, k=parity.k, log_a=log_a, label=label)


# =============================================================================
# SPRA / SPARA
# =============================================================================

def spra_parity_iowe(N: int, q: int = 6, p: int = 3) -> Iowe:
    """Parity part of SPRA: REP(q) -> interleaver -> SPC(p) -> ACC"""
    if N < 1:
        raise ValueError(f"SPRA needs N >= 1, got {N}")
    if (q * N) % p:
        raise ValueError(f"SPC({p}) needs p | qN, got q={q}, N={N}")

    groups = q * N // p
    repeated = rep_iowe(q, N)
    checks = spc_iowe(p, groups)
    accumulated = serial_concat(serial_concat(repeated, checks), acc_iowe(groups))
    return accumulated.with_label(f"spra-parity(N={N},q={q},p={p})")


def spra_iowe(N: int, q: int = 6, p: int = 3) -> Iowe:
    """
    Systematic punctured RA ensemble: n = N + qN/p

    For (q, p) = (6, 3) the rate is 1/3 and the enumerator matches
    spra_iowe_closed_form.
    """
    parity = spra_parity_iowe(N, q, p)
    iowe = append_systematic(parity, label=f"spra(N={N},q={q},p={p})")
    logging.debug(f"[SPECTRUM] SPRA | N={N} | q={q} | p={p} | n={iowe.n}")
    return iowe


def spra_iowe_closed_form(N: int) -> Iowe:
    """
    Rate-1/3 SPRA(N, 3, 6) enumerator from the explicit triple sum

    A_{w,d} = C(N,w)/C(6N,6w) sum_h sum_j sum_i C(h,i) C(2N-h,j-i)
              C(2N-d+w, floor(h/2)) C(d-w-1, ceil(h/2)-1) 3^{h+j-2i},  6w = 2j + h
    """
    n = 3 * N
    m = 2 * N
    ln3 = math.log(3.0)
    log_a = np.full((N + 1, n + 1), LOG_ZERO)
    log_a[0, 0] = 0.0

    i = np.arange(m + 1)
    for w in range(1, N + 1):
        prefix = log_binomial(N, w) - log_binomial(6 * N, 6 * w)
        for d in range(w, n + 1):
            terms = []
            for h in range(m + 1):
                if (6 * w - h) % 2:
                    continue
                j = (6 * w - h) // 2
                if j < 0 or j > m:
                    continue
                if h == 0:
                    # all-zero accumulator input leaves the parity part empty
                    acc_part = 0.0 if d == w else LOG_ZERO
                else:
                    acc_part = log_binomial(m - d + w, h // 2) + log_binomial(d - w - 1, (h + 1) // 2 - 1)
                if not np.isfinite(acc_part):
                    continue
                inner = log_binomial(h, i) + log_binomial(m - h, j - i) + (h + j - 2 * i) * ln3
                terms.append(acc_part + _lse_scalar(inner))
            if terms:
                log_a[w, d] = prefix + _lse_scalar(np.array(terms))
    return Iowe(n=n, k=N, log_a=log_a, label=f"spra-closed(N={N})")


def _lse_scalar(values: np.ndarray) -> float:
    with np.errstate(divide='ignore'):
        return float(logsumexp(values))


def spara_precoder_iowe(N: int, M: int) -> Iowe:
    """
    Systematic precoder: M bits pass through, the other N-M are accumulated

    Pre_{w,d} = sum_m C(M, m) ACC^{(N-M)}_{w-m, d-m}
    """
    if not 0 <= M <= N:
        raise ValueError(f"SPARA needs 0 <= M <= N, got N={N}, M={M}")
    if M == N:
        return Iowe.identity(N).with_label(f"precoder(N={N},M={M})")

    acc = acc_iowe(N - M).log_a
    log_a = np.full((N + 1, N + 1), LOG_ZERO)
    for m in range(M + 1):
        # pass-through bits add m to both input and output weights
        shifted = np.full((N + 1, N + 1), LOG_ZERO)
        shifted[m:m + N - M + 1, m:m + N - M + 1] = acc + log_binomial(M, m)
        log_a = np.logaddexp(log_a, shifted)
    return Iowe(n=N, k=N, log_a=log_a, label=f"precoder(N={N},M={M})")


def spara_iowe(N: int, M: int) -> Iowe:
    """
    Rate-1/3 SPARA(N, M) ensemble: precoder -> SPRA parity, with the
    precoder input sent as the systematic part

    A_{w,d} = sum_l Pre_{w,l} SPRA_{l, d-w+l} / C(N, l)
    """
    precoder = spara_precoder_iowe(N, M)
    combined = serial_concat(precoder, spra_parity_iowe(N))
    iowe = append_systematic(combined, label=f"spara(N={N},M={M})")
    logging.debug(f"[SPECTRUM] SPARA | N={N} | M={M} | n={iowe.n}")
    return iowe


# =============================================================================
# ENSEMBLE DESCRIPTOR
# =============================================================================

class EnsembleKind(Enum):
    """Ensembles with built-in enumerators, plus file ingestion"""
    RANDOM = "random"
    NSRA = "nsra"
    SPRA = "spra"
    SPARA = "spara"
    FILE = "file"


_DEFAULT_REPETITION = {EnsembleKind.NSRA: 3, EnsembleKind.SPRA: 6, EnsembleKind.SPARA: 6}


@dataclass
class EnsembleSpec:
    """
    Ensemble selection as given on the command line

    Exactly one source: a built-in kind with its parameters, or an IOWE file.
    q is the repetition order (NSRA default 3, SPRA default 6) and p the SPC
    order of SPRA. For the random ensemble n is the block length (default N/R).
    """
    kind: EnsembleKind
    N: int = 100
    M: Optional[int] = None
    q: Optional[int] = None
    p: int = 3
    rate: float = 1.0 / 3.0
    n: Optional[int] = None
    iowe_path: Optional[str] = None

    def __post_init__(self):
        if not isinstance(self.kind, EnsembleKind):
            self.kind = EnsembleKind(str(self.kind).lower())
        if self.kind is EnsembleKind.FILE and not self.iowe_path:
            raise ValueError("Ensemble 'file' requires an IOWE path")
        if self.kind is not EnsembleKind.FILE and self.iowe_path:
            raise ValueError("Give either a built-in ensemble or an IOWE file, not both")
        if self.kind is EnsembleKind.SPARA:
            if self.M is None:
                raise ValueError("SPARA requires M")
            if (self.q or 6) != 6 or self.p != 3:
                raise ValueError("SPARA is defined for the rate-1/3 (q, p) = (6, 3) construction only")
        if self.q is None:
            self.q = _DEFAULT_REPETITION.get(self.kind)
        if self.kind is EnsembleKind.NSRA:
            self.rate = 1.0 / self.q
        elif self.kind in (EnsembleKind.SPRA, EnsembleKind.SPARA):
            self.rate = self.p / (self.p + self.q)

    @property
    def alpha(self) -> Optional[float]:
        """Fraction M/(3N) of SPARA code bits that bypass the precoder accumulator"""
        if self.kind is not EnsembleKind.SPARA:
            return None
        return self.M / (3.0 * self.N)

    @property
    def tag(self) -> str:
        if self.kind is EnsembleKind.NSRA:
            return f"nsra(q={self.q})"
        if self.kind is EnsembleKind.SPRA:
            return f"spra(q={self.q},p={self.p})"
        if self.kind is EnsembleKind.SPARA:
            return f"spara(alpha={self.alpha:.6g})"
        if self.kind is EnsembleKind.RANDOM:
            return f"random(R={self.rate:.6g})"
        return f"file({Path(self.iowe_path).name})"

    def build_iowe(self) -> Iowe:
        if self.kind is EnsembleKind.NSRA:
            return nsra_iowe(self.N, self.q)
        if self.kind is EnsembleKind.SPRA:
            return spra_iowe(self.N, q=self.q, p=self.p)
        if self.kind is EnsembleKind.SPARA:
            return spara_iowe(self.N, self.M)
        if self.kind is EnsembleKind.FILE:
            from src.storage.iowe_store import load_iowe
            return load_iowe(Path(self.iowe_path))
        raise ValueError("The random ensemble has no input-output enumerator; use spectrum()")

    def spectrum(self) -> DistanceSpectrum:
        if self.kind is EnsembleKind.RANDOM:
            n = self.n if self.n is not None else int(round(self.N / self.rate))
            return random_code_spectrum(n, self.rate)
        return marginalize(self.build_iowe())

    def describe(self) -> Dict:
        return {
            "kind": self.kind.value,
            "N": self.N,
            "M": self.M,
            "q": self.q,
            "p": self.p,
            "rate": self.rate,
            "n": self.n,
            "iowe_path": self.iowe_path,
        }
