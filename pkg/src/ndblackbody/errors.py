"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where a function is defined."""


class IncompatibleSpeciesError(ValueError):
    """A radiation species cannot exist in the requested dimension."""


class ConvergenceError(RuntimeError):
    """A numerical procedure failed to reach its tolerance within budget."""


class BudgetExceededError(RuntimeError):
    """A lattice would hold more modes than the configured budget."""
