"""Exception types shared across the package."""

__all__ = ["EpsGraphError", "DataError", "InfeasibleError"]


class EpsGraphError(Exception):
    """Base class for errors raised by this package."""


class DataError(EpsGraphError):
    """Raised when an input file or array fails validation.

    Examples: a dataset file with a corrupt header, a vector with a
    non-finite entry, an edge list referencing an out-of-range index.
    """


class InfeasibleError(EpsGraphError):
    """Raised when no parameter setting can satisfy the requested guarantee.

    The message carries enough detail to act on: the parameter ranges that
    were scanned and the tightest guarantee that was achievable.
    """
