"""
Parallel-Channel Bounds - Growth Package

Asymptotic growth rates r(delta) of the distance spectra of the random,
NSRA, SPRA and SPARA ensembles, and finite-length convergence checks.
"""

from .rates import (
    GrowthPoint,
    GrowthRate,
    convergence_check,
    default_delta_grid,
    growth_curve,
    growth_point_function,
    nsra_growth,
    nsra_growth_point,
    random_finite_exponent,
    random_growth,
    richardson_slope,
    spara_constraint_slack,
    spara_growth,
    spara_growth_point,
    spra_constraint_slack,
    spra_growth,
    spra_growth_point,
)

__all__ = [
    'GrowthPoint',
    'GrowthRate',
    'convergence_check',
    'default_delta_grid',
    'growth_curve',
    'growth_point_function',
    'nsra_growth',
    'nsra_growth_point',
    'random_finite_exponent',
    'random_growth',
    'richardson_slope',
    'spara_constraint_slack',
    'spara_growth',
    'spara_growth_point',
    'spra_constraint_slack',
    'spra_growth',
    'spra_growth_point',
]
