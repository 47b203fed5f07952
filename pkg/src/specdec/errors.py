"""Exception types shared across the package."""


class SpecDecError(Exception):
    """Base class for package errors."""


class DomainError(SpecDecError, ValueError):
    """Argument outside the domain of the operation."""


class PoleError(DomainError, ZeroDivisionError):
    """Rational function evaluated at one of its poles."""


class SingularityError(DomainError):
    """Linear system too close to singular (z near an eigenvalue of D)."""


class ResourceError(SpecDecError, MemoryError):
    """Requested object exceeds a configured size cap."""
