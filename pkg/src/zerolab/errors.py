"""Exception types shared across the package.

The CLI maps ConfigError to exit code 1 and NumericalError (and subclasses)
to exit code 2.
"""


class ZerolabError(Exception):
    pass


class ConfigError(ZerolabError):
    """Invalid configuration: bad file, missing key, out-of-range value."""


class NumericalError(ZerolabError):
    """A numerical procedure failed beyond its retry budget."""


class QuadratureError(NumericalError):
    """Adaptive quadrature did not converge within the panel cap."""


class ConjugationError(NumericalError):
    """Convex conjugation failed its domain checks (s-box too small)."""


class RootFindingError(NumericalError):
    """Root finding or contour counting failed after retries."""
