"""Exception types shared across the library."""


class EllqgError(Exception):
    """Base class for all library errors."""


class ParameterError(EllqgError):
    """Parameters outside the convergent / validated domain (e.g. |s| >= 1)."""


class DomainError(EllqgError):
    """Argument outside the domain of a special function (e.g. theta at 0)."""


class PoleError(EllqgError):
    """Evaluation hit a pole; the message names the offending factor."""


class SingularityError(EllqgError):
    """Resonant dynamical parameter ([s] ~ 0) in an R-matrix entry."""


class ShapeError(EllqgError):
    """Mismatched combinatorial shapes (partitions, color strings, blocks)."""


class ResourceCapError(EllqgError):
    """An enumeration or quadrature exceeded its configured cap."""
