"""Exception hierarchy shared by every module."""


class NonArchError(Exception):
    """Base class for all library errors."""


class DomainError(NonArchError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class PrecisionError(NonArchError):
    """Not enough valid p-adic digits to decide the answer."""


class CoverageError(NonArchError):
    """A query reaches outside the shell window a measure can answer for."""


class DivergenceError(NonArchError):
    """A shell series or integral does not converge."""


class NoLimitError(NonArchError):
    """A sequence of truncations failed to stabilize."""


class BoundaryError(NonArchError):
    """A point has no unique piece in a polygonal partition."""
