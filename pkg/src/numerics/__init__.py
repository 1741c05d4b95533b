"""
Numerical substrate shared by the spectra, bounds and region packages:
log-domain combinatorics, output-alphabet quadrature, fixed-point solving,
box-constrained grid maximization and bisection.
"""

from .logmath import (
    LN2,
    LOG_ZERO,
    LogValue,
    binary_entropy,
    binary_entropy_bits,
    db_to_linear,
    linear_to_db,
    log_binomial,
    log_convolve,
    log_sum_exp,
    scaled_entropy,
)
from .quadrature import (
    Quadrature,
    QuadratureConfig,
    composite_legendre,
    integrate_output,
    legendre_interval,
)
from .solvers import BoxOptResult, GridConfig, bisect, fixed_point, maximize_box

__all__ = [
    'LN2',
    'LOG_ZERO',
    'LogValue',
    'binary_entropy',
    'binary_entropy_bits',
    'db_to_linear',
    'linear_to_db',
    'log_binomial',
    'log_convolve',
    'log_sum_exp',
    'scaled_entropy',
    'Quadrature',
    'QuadratureConfig',
    'composite_legendre',
    'integrate_output',
    'legendre_interval',
    'BoxOptResult',
    'GridConfig',
    'bisect',
    'fixed_point',
    'maximize_box',
]
