"""
Parallel-Channel Bounds - Main Source Package

Upper bounds on the ML decoding error probability of binary linear block
codes transmitted over independent parallel MBIOS channels, and the
attainable channel regions of turbo-like code ensembles.

Architecture Components:
- numerics/: log-domain combinatorics, quadrature, fixed points, grid search
- channels/: MBIOS channel laws and the parallel channel set
- spectra/: IOWEs and distance spectra of RA-type ensembles
- growth/: asymptotic growth rates of the distance spectra
- bounds/: finite-length union, sphere, SF/MSF, DS2, Gallager and hybrid bounds
- regions/: error exponents and attainable-region frontiers
- storage/: CSV/JSON persistence of enumerators and results
"""

__version__ = "0.1.0"
__author__ = "Parallel-Channel Bounds Development Team"
