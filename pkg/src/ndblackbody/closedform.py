"""Exact black-body thermodynamics in D = d + 1 spacetime dimensions.

Natural units throughout (hbar = c = k_B = 1). The temperature enters as
``tau = k_B T``; densities and pressures are returned in units of tau**D.
"""

from dataclasses import dataclass
import math

from .errors import DomainError, IncompatibleSpeciesError
from .specfun import gamma, solid_angle, zeta

__all__ = [
    "SpacetimeDim",
    "Species",
    "ThermoPoint",
    "as_dim",
    "multiplicity",
    "sb_coefficient",
    "energy_density",
    "pressure",
    "thermo_point",
    "energy_equation_residual",
]


@dataclass(frozen=True)
class SpacetimeDim:
    """Spacetime dimension ``D``; the spatial dimension is ``d = D - 1``."""

    D: int

    def __post_init__(self):
        if isinstance(self.D, bool) or int(self.D) != self.D or self.D < 2:
            raise DomainError(f"spacetime dimension must be an integer >= 2, got {self.D!r}")
        object.__setattr__(self, "D", int(self.D))

    @property
    def d(self):
        return self.D - 1

    @classmethod
    def from_spatial(cls, d):
        return cls(int(d) + 1)


def as_dim(dim):
    """Accept a :class:`SpacetimeDim` or a plain integer ``D``."""
    if isinstance(dim, SpacetimeDim):
        return dim
    return SpacetimeDim(dim)


_KINDS = ("scalar", "photon", "custom")


@dataclass(frozen=True)
class Species:
    """Radiation species, identified by its polarization multiplicity.

    ``scalar`` has one state per momentum, ``photon`` has ``D - 2``, and
    ``custom`` carries an explicit integer multiplicity (use it for any
    species whose count is known externally, e.g. gravitons).
    """

    kind: str = "scalar"
    custom_multiplicity: int = 1

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown species kind {self.kind!r}; expected one of {_KINDS}")
        g = self.custom_multiplicity
        if isinstance(g, bool) or int(g) != g or g < 1:
            raise ValueError(f"custom multiplicity must be an integer >= 1, got {g!r}")

    @classmethod
    def scalar(cls):
        return cls("scalar")

    @classmethod
    def photon(cls):
        return cls("photon")

    @classmethod
    def custom(cls, g):
        return cls("custom", int(g))

    @classmethod
    def parse(cls, text):
        """Parse ``"scalar"``, ``"photon"`` or ``"custom:<g>"``."""
        text = text.strip().lower()
        if text.startswith("custom"):
            _, sep, g = text.partition(":")
            if not sep or not g.strip().isdigit():
                raise ValueError(f"custom species needs a multiplicity, e.g. 'custom:3'; got {text!r}")
            return cls.custom(int(g))
        return cls(text)

    @property
    def label(self):
        if self.kind == "custom":
            return f"custom:{self.custom_multiplicity}"
        return self.kind


def _as_species(species):
    if isinstance(species, Species):
        return species
    return Species.parse(species)


def _check_tau(tau):
    tau = float(tau)
    if not (math.isfinite(tau) and tau > 0.0):
        raise DomainError(f"tau must be positive and finite, got {tau!r}")
    return tau


def multiplicity(species, dim):
    """Number of polarization states per momentum for ``species`` in ``dim``."""
    species = _as_species(species)
    dim = as_dim(dim)
    if species.kind == "scalar":
        return 1
    if species.kind == "photon":
        if dim.D < 3:
            raise IncompatibleSpeciesError(
                f"photon has D - 2 = {dim.D - 2} polarizations in D = {dim.D}; needs D >= 3"
            )
        return dim.D - 2
    return species.custom_multiplicity


def sb_coefficient(dim, species="scalar"):
    """Coefficient ``C`` of the generalized Stefan-Boltzmann law ``rho = C tau**D``.

    ``C = g * Omega_{d-1} / (2 pi)**d * Gamma(D) * zeta(D)``.
    """
    dim = as_dim(dim)
    g = multiplicity(species, dim)
    d = dim.d
    return g * solid_angle(d) / (2.0 * math.pi) ** d * gamma(dim.D) * zeta(dim.D)


def energy_density(dim, species="scalar", tau=1.0):
    dim = as_dim(dim)
    tau = _check_tau(tau)
    return sb_coefficient(dim, species) * tau ** dim.D


def pressure(dim, species="scalar", tau=1.0):
    """Radiation pressure from ``g * Gamma(D/2) / pi**(D/2) * zeta(D) * tau**D``.

    This form is reached from the energy density with the Gamma duplication
    formula, so ``pressure * d == energy_density`` is a genuine identity check
    rather than a definition.
    """
    dim = as_dim(dim)
    tau = _check_tau(tau)
    g = multiplicity(species, dim)
    D = dim.D
    return g * gamma(0.5 * D) / math.pi ** (0.5 * D) * zeta(D) * tau ** D


@dataclass(frozen=True)
class ThermoPoint:
    dim: SpacetimeDim
    species: Species
    tau: float
    rho: float
    p: float

    @property
    def multiplicity(self):
        return multiplicity(self.species, self.dim)

    @property
    def coefficient(self):
        return self.rho / self.tau ** self.dim.D

    def as_dict(self):
        return {
            "D": self.dim.D,
            "d": self.dim.d,
            "species": self.species.label,
            "multiplicity": self.multiplicity,
            "tau": self.tau,
            "rho": self.rho,
            "p": self.p,
            "C": sb_coefficient(self.dim, self.species),
        }


def thermo_point(dim, species="scalar", tau=1.0):
    dim = as_dim(dim)
    species = _as_species(species)
    tau = _check_tau(tau)
    return ThermoPoint(
        dim=dim,
        species=species,
        tau=tau,
        rho=energy_density(dim, species, tau),
        p=pressure(dim, species, tau),
    )


def energy_equation_residual(dim, species="scalar", tau=1.0, h=None):
    """Residual of the thermodynamic energy equation at fixed volume.

    For ``U = rho V`` the equation (dU/dV)_T = T (dp/dT)_V - p reads
    ``rho = tau dp/dtau - p``. The derivative is taken by a central difference
    with step ``h`` (default ``1e-4 * tau``), so the returned
    ``rho - (tau dp/dtau - p)`` is zero up to O(h**2) truncation and rounding.
    """
    dim = as_dim(dim)
    tau = _check_tau(tau)
    if h is None:
        h = 1e-4 * tau
    h = float(h)
    if not (0.0 < h < tau):
        raise DomainError(f"finite-difference step must satisfy 0 < h < tau, got h={h!r}, tau={tau!r}")
    dp_dtau = (pressure(dim, species, tau + h) - pressure(dim, species, tau - h)) / (2.0 * h)
    return energy_density(dim, species, tau) - (tau * dp_dtau - pressure(dim, species, tau))
