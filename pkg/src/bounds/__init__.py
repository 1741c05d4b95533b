"""
Parallel-Channel Bounds - Bounds Package

Finite-length upper bounds on the ML decoding error probability of binary
linear codes over independent parallel MBIOS channels: union (exact and
Bhattacharyya), sphere, SF/MSF, generalized DS2 and 1961 Gallager bounds
with optimized tilting measures, and the tightened hybrid bound.
"""

from .ds2 import Ds2Subcode, ds2_bound, ds2_subcode_bound, ds2_whole_code
from .engine import BoundKind, as_spectrum, error_bound, expurgation_limit, sweep_bound
from .gallager import (
    GallagerSubcode,
    gallager_bound,
    gallager_sf_tilting_bound,
    gallager_subcode_bound,
    gallager_whole_code_bound,
)
from .hybrid import HybridSubcode, hybrid_bound_67, hybrid_subcode_value
from .results import BoundResult, MsfPartition, SubcodeTerm, TiltingSolution
from .sf import max_spectral_ratio, msf_bound, msf_initial_range, sf_bound
from .sphere import SphereSubcode, sphere_bound, sphere_whole_code
from .subcode import BoundConfig, optimize_subcode, run_subcode_chain
from .tilting import (
    ds2_k_slope_at_zero,
    ds2_tilting_solve,
    gallager_cube_tilting,
    gallager_random_tilting,
    induced_gallager_tilting,
)
from .union import union_bhattacharyya, union_bound_q

__all__ = [
    'BoundConfig',
    'BoundKind',
    'BoundResult',
    'Ds2Subcode',
    'GallagerSubcode',
    'HybridSubcode',
    'MsfPartition',
    'SphereSubcode',
    'SubcodeTerm',
    'TiltingSolution',
    'as_spectrum',
    'ds2_bound',
    'ds2_k_slope_at_zero',
    'ds2_subcode_bound',
    'ds2_tilting_solve',
    'ds2_whole_code',
    'error_bound',
    'expurgation_limit',
    'gallager_bound',
    'gallager_cube_tilting',
    'gallager_random_tilting',
    'gallager_sf_tilting_bound',
    'gallager_subcode_bound',
    'gallager_whole_code_bound',
    'hybrid_bound_67',
    'hybrid_subcode_value',
    'induced_gallager_tilting',
    'max_spectral_ratio',
    'msf_bound',
    'msf_initial_range',
    'optimize_subcode',
    'run_subcode_chain',
    'sf_bound',
    'sphere_bound',
    'sphere_whole_code',
    'sweep_bound',
    'union_bhattacharyya',
    'union_bound_q',
]
