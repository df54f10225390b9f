"""Exception types shared across the package."""


class DiamondEntropyError(Exception):
    """Base class for all package-specific failures."""


class ConvergenceError(DiamondEntropyError):
    """A numerical procedure did not reach its requested tolerance.

    Raised by adaptive quadratures that exhaust their refinement budget,
    by the grid-doubling entropy ladder when the final grid still violates
    the spectral range, and by sweeps with too few converged points.
    """


class VacuousBoundError(DiamondEntropyError):
    """A bound check was requested where the bounding quantity vanishes."""


class EstimationError(DiamondEntropyError):
    """A numerical estimate came out unusable (e.g. a non-positive exponent)."""
