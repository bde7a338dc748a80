"""Exception hierarchy shared by every module."""


class PrivClustError(Exception):
    """Base class for all library errors."""


class InvalidInstanceError(PrivClustError, ValueError):
    """The instance violates a structural precondition (metric axioms, bounds, colors)."""


class InfeasibleInstanceError(PrivClustError):
    """No solution satisfying the requested constraints exists."""


class MalformedSolutionError(PrivClustError, ValueError):
    """A clustering does not assign every non-outlier point to an opened center."""


class SizeCapError(PrivClustError):
    """An exhaustive routine refused an instance above its configured size cap."""


class ContractViolation(PrivClustError, AssertionError):
    """An internal precondition or proven invariant failed at runtime."""
