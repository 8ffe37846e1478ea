"""Numerics for the robust alpha-stable central limit theorem with alpha in (0, 1]."""
__version__ = "0.1.0"

from .errors import DomainError, NumericError, ValidationError
from .measure import StableIndex, SphericalMeasure, UncertaintySet, k_alpha, sup_spherical, tail_mass
from .functions import SampledFunction, from_name
from .operator import QuadratureSpec, delta_alpha, generator_ray, sup_generator, holder_constant
from .laws import CustomLaw, ParetoCutoffLaw, make_law
from .sublinear import LawFamily, axiom_check, sup_expect
from .grid import GridFunction, GridSpec
from .dp import consistency_residual, dp_step, moment_statistic, run_clt, run_truncated
from .pide import SolverSpec, pide_solve, scaling_check, small_time_slope
from .oracle import StableLaw, expect_stable
from .mc import McConfig, simulate, sweep
