"""Coordinate laws, mean-values and concentration of measure on p-norm balls."""

from .ball_geometry import (
    FIRST_QUADRANT,
    FULL,
    PBall,
    dirichlet_integral,
    pball_volume,
    sample_uniform_pball,
    shell_ratio,
)
from .concentration import (
    ExperimentConfig,
    ExperimentReport,
    run_ball_experiment,
    run_cube_experiment,
    run_experiment,
    variance_slope,
)
from .distributions import (
    FiniteCoordDensity,
    GammaDist,
    GenExponent,
    GenNormal,
    PNormOrder,
    coordinate_law,
    gamma_from_order,
)
from .dsl import FunctionalSpec, arity_check, evaluate, functional, parse, to_text
from .meanvalue import MeanValueResult, cube_mean, exchange, mean_even, mean_general, mean_odd
from .specfun import inv_reg_lower_gamma, log_gamma, reg_lower_gamma, reg_upper_gamma

__version__ = "0.1.0"
