# src/bounds/engine.py - Bound dispatch, expurgation and SNR sweeps
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple, Union

from config.settings import PARBOUND_THREADS
from src.bounds.ds2 import ds2_bound
from src.bounds.gallager import gallager_bound
from src.bounds.hybrid import hybrid_bound_67
from src.bounds.results import BoundResult
from src.bounds.sf import msf_bound, sf_bound
from src.bounds.sphere import sphere_bound
from src.bounds.subcode import BoundConfig
from src.bounds.union import union_bhattacharyya, union_bound_q, union_log_terms
from src.channels.mbios import ParallelChannelSet
from src.core.errors import MissingIoweError
from src.spectra.ensembles import EnsembleSpec
from src.spectra.iowe import DistanceSpectrum, Iowe, marginalize

SpectrumSource = Union[DistanceSpectrum, Iowe, EnsembleSpec]


class BoundKind(Enum):
    """Finite-length bounds selectable by name"""
    DS2 = "ds2"
    GALLAGER61 = "gallager61"
    UNION_Q = "union-q"
    UB = "ub"
    SPHERE = "sphere"
    SF = "sf"
    MSF = "msf"
    HYBRID67 = "hybrid67"

    @classmethod
    def parse(cls, value) -> "BoundKind":
        if isinstance(value, cls):
            return value
        text = str(value).strip().lower().replace('_', '-')
        try:
            return cls(text)
        except ValueError:
            names = ', '.join(k.value for k in cls)
            raise ValueError(f"Unknown bound kind '{value}', expected one of: {names}")


_SUBCODE_BOUNDS = {
    BoundKind.DS2: ds2_bound,
    BoundKind.GALLAGER61: gallager_bound,
    BoundKind.SPHERE: sphere_bound,
    BoundKind.HYBRID67: hybrid_bound_67,
}


def as_spectrum(source: SpectrumSource) -> DistanceSpectrum:
    """Distance spectrum of an IOWE, an ensemble descriptor or a spectrum"""
    if isinstance(source, DistanceSpectrum):
        return source
    if isinstance(source, Iowe):
        return marginalize(source)
    if isinstance(source, EnsembleSpec):
        return source.spectrum()
    raise TypeError(f"Expected a DistanceSpectrum, Iowe or EnsembleSpec, got {type(source).__name__}")


def expurgation_limit(spectrum: DistanceSpectrum, config: BoundConfig) -> Optional[int]:
    """h_max = n - k for a specific code when expurgation is on, else None (all weights)"""
    if not config.expurgate:
        return None
    if not spectrum.deterministic:
        logging.warning(
            f"[BOUND] Expurgation requested for an ensemble spectrum ({spectrum.label or 'unnamed'}) | "
            f"ignored, all weights kept"
        )
        return None
    return spectrum.n - spectrum.k


def error_bound(source: SpectrumSource, channel_set: ParallelChannelSet, kind='ds2', target: str = 'block',
                config: Optional[BoundConfig] = None) -> BoundResult:
    """
    Upper bound on the ML block (or bit) error probability

    Args:
        source: distance spectrum, IOWE or ensemble descriptor
        channel_set: parallel MBIOS channels with assignment probabilities
        kind: BoundKind or its name (ds2, gallager61, union-q, ub, sphere, sf, msf, hybrid67)
        target: 'block' or 'bit'
        config: numeric settings (default from bounds_config.yaml)

    Returns:
        BoundResult with the total clamped at 1

    Raises:
        MissingIoweError: target='bit' without bit-weighted multiplicities
        UnsupportedChannelError: union-q or sphere on a set with non-BIAWGN channels
    """
    kind = BoundKind.parse(kind)
    if target not in ('block', 'bit'):
        raise ValueError(f"target must be 'block' or 'bit', got '{target}'")
    config = config or BoundConfig.from_config()
    spectrum = as_spectrum(source)
    if target == 'bit' and not spectrum.has_bit_weights:
        raise MissingIoweError("Bit-error bounds need an input-output weight enumerator")

    h_max = expurgation_limit(spectrum, config)
    start = time.time()
    if kind is BoundKind.UB:
        result = union_bhattacharyya(spectrum, channel_set, target, h_max, config.quadrature)
    elif kind is BoundKind.UNION_Q:
        result = union_bound_q(spectrum, channel_set, target, h_max, config.quadrature)
    elif kind is BoundKind.SF:
        result = sf_bound(spectrum, channel_set, config.sf_variant, target, h_max, config)
    elif kind is BoundKind.MSF:
        result, _ = msf_bound(spectrum, channel_set, config.finite_length, target, config)
    else:
        union_log = union_log_terms(spectrum.multiplicities(target), channel_set, config.quadrature)
        result = _SUBCODE_BOUNDS[kind](spectrum, channel_set, target, h_max, config, union_log)

    logging.info(
        f"[BOUND] {kind.value} | target={target} | n={spectrum.n} | J={channel_set.J} | "
        f"log10_P={result.log10_total:.4f} | unclamped={result.log_unclamped:.6g} | "
        f"elapsed={time.time() - start:.2f}s"
    )
    return result


# =============================================================================
# SNR SWEEPS
# =============================================================================

def sweep_bound(source: SpectrumSource, rate: float, ebno1_db: float, ebno2_dbs: Sequence[float],
                alphas: Sequence[float], kind='ds2', target: str = 'block',
                config: Optional[BoundConfig] = None,
                threads: Optional[int] = None) -> Tuple[List[Dict], List[Dict]]:
    """
    Bound over two parallel BIAWGN channels as channel 2's Eb/N0 varies

    Returns:
        (rows {"snr2_db", "log10_Pe", "kind"}, per-point diagnostics)
    """
    kind = BoundKind.parse(kind)
    config = config or BoundConfig.from_config()
    spectrum = as_spectrum(source)
    points = [float(x) for x in ebno2_dbs]
    workers = max(1, int(threads or PARBOUND_THREADS))

    def run(ebno2_db: float) -> BoundResult:
        channel_set = ParallelChannelSet.biawgn_ebno(rate, [ebno1_db, ebno2_db], alphas)
        return error_bound(spectrum, channel_set, kind, target, config)

    logging.info(f"[SWEEP] {kind.value} | points={len(points)} | ebno1_db={ebno1_db} | threads={workers}")
    if workers == 1:
        results = [run(x) for x in points]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, points))

    rows = [{"snr2_db": x, "log10_Pe": r.log10_total, "kind": kind.value} for x, r in zip(points, results)]
    diagnostics = [{"snr2_db": x, **r.diagnostics()} for x, r in zip(points, results)]
    return rows, diagnostics

