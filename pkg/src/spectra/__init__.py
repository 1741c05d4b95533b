"""
Parallel-Channel Bounds - Spectra Package

Log-domain IOWEs and distance spectra of the random, NSRA, SPRA and SPARA
ensembles, the REP/ACC/SPC component enumerators and uniform-interleaver
serial concatenation, plus an exhaustive-enumeration oracle for small codes.
"""

from .ensembles import (
    ComponentKind,
    EnsembleKind,
    EnsembleSpec,
    acc_iowe,
    append_systematic,
    component_iowe,
    nsra_iowe,
    random_code_spectrum,
    rep_iowe,
    serial_concat,
    spara_iowe,
    spara_precoder_iowe,
    spc3_iowe_closed_form,
    spc_iowe,
    spra_iowe,
    spra_iowe_closed_form,
    spra_parity_iowe,
)
from .iowe import DistanceSpectrum, Iowe, bit_weight, marginalize
from .oracle import MAX_INTERLEAVER, ensemble_oracle

__all__ = [
    'ComponentKind',
    'EnsembleKind',
    'EnsembleSpec',
    'DistanceSpectrum',
    'Iowe',
    'MAX_INTERLEAVER',
    'acc_iowe',
    'append_systematic',
    'bit_weight',
    'component_iowe',
    'ensemble_oracle',
    'marginalize',
    'nsra_iowe',
    'random_code_spectrum',
    'rep_iowe',
    'serial_concat',
    'spara_iowe',
    'spara_precoder_iowe',
    'spc3_iowe_closed_form',
    'spc_iowe',
    'spra_iowe',
    'spra_iowe_closed_form',
    'spra_parity_iowe',
]
