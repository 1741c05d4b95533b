"""
Parallel-Channel Bounds - Regions Package

Asymptotic error exponents of the DS2, 1961 Gallager, union-Bhattacharyya
and MSF bounds, and the attainable channel regions they imply for code
ensembles over two parallel BIAWGN channels.
"""

from .attainable import (
    Assessment,
    EnsembleFlags,
    RegionBoundary,
    assess,
    attainable,
    capacity_gap_db,
    reference_boundaries,
    region_boundary,
    symmetric_threshold,
)
from .exponents import (
    ExponentCurve,
    RegionConfig,
    ds2_exponent,
    exponent_curve,
    gallager_exponent,
    msf_exponent_curve,
    sf_exponent,
    small_delta_slope,
    ub_exponent,
)

__all__ = [
    'Assessment',
    'EnsembleFlags',
    'ExponentCurve',
    'RegionBoundary',
    'RegionConfig',
    'assess',
    'attainable',
    'capacity_gap_db',
    'ds2_exponent',
    'exponent_curve',
    'gallager_exponent',
    'msf_exponent_curve',
    'reference_boundaries',
    'region_boundary',
    'sf_exponent',
    'small_delta_slope',
    'symmetric_threshold',
    'ub_exponent',
]
