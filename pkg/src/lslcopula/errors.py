"""Exception types raised across the package."""


class LSLError(Exception):
    """Base class for all package errors."""


class MalformedKnots(LSLError, ValueError):
    """Knot list is unsorted, has duplicated abscissae or wrong endpoints."""


class DomainError(LSLError, ValueError):
    """Argument lies outside the domain on which the quantity is defined."""


class InvalidInput(LSLError, ValueError):
    """A diagonal failed membership validation where a valid one is required."""


class DegenerateInput(LSLError, ValueError):
    """Two inputs that must differ coincide within tolerance."""


class SearchFailure(LSLError, RuntimeError):
    """A bracketing search could not locate a solution."""


class ResolutionMismatch(LSLError, ValueError):
    """Checkerboards of different resolution cannot be composed."""


class NoConvergence(LSLError, RuntimeWarning):
    """Iteration hit its budget before the stopping criterion was met.

    Emitted as a warning; the partial trace is still returned.
    """
