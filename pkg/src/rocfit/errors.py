"""Exception and warning types shared across the package."""


class DataError(ValueError):
    """Invalid or malformed input data (bad CSV row, single-class sample)."""


class NumericalError(RuntimeError):
    """A numerical procedure could not deliver a valid result.

    Raised, e.g., when a covariance estimate is refused for a
    boundary-active fit, when a quadrature integrand is non-finite at a
    node, or when confidence-band sampling rejects too many draws.
    """


class BoundaryWarning(UserWarning):
    """A parameter sits close to the edge of its domain.

    Emitted when finite-difference steps must be shrunk one-sidedly or
    when an asymptotic result is applied outside its comfort zone
    (e.g. class ratio n0/n1 >= 1).
    """
