"""Black-body radiation thermodynamics in D = d + 1 spacetime dimensions."""

__version__ = "0.1.0"

from .closedform import (
    SpacetimeDim,
    Species,
    ThermoPoint,
    energy_density,
    energy_equation_residual,
    multiplicity,
    pressure,
    sb_coefficient,
    thermo_point,
)
from .errors import BudgetExceededError, ConvergenceError, DomainError, IncompatibleSpeciesError
from .specfun import exact_cos2_average, gamma, solid_angle, wallis_integral, zeta

__all__ = [
    "SpacetimeDim",
    "Species",
    "ThermoPoint",
    "energy_density",
    "energy_equation_residual",
    "multiplicity",
    "pressure",
    "sb_coefficient",
    "thermo_point",
    "BudgetExceededError",
    "ConvergenceError",
    "DomainError",
    "IncompatibleSpeciesError",
    "exact_cos2_average",
    "gamma",
    "solid_angle",
    "wallis_integral",
    "zeta",
]
