"""Exception hierarchy shared by every module of the package."""


class EinsteinWarpError(Exception):
    """Base class for all package errors."""


class OutOfDomain(EinsteinWarpError, ValueError):
    pass


class BadCoefficients(EinsteinWarpError, ValueError):
    pass


class NonMonotoneAbscissae(EinsteinWarpError, ValueError):
    pass


class TooFewPoints(EinsteinWarpError, ValueError):
    pass


class NonpositiveWarp(EinsteinWarpError, ValueError):
    pass


class NonpositiveU(EinsteinWarpError, ValueError):
    pass


class NonpositiveProfile(EinsteinWarpError, ValueError):
    pass


class InvalidParameters(EinsteinWarpError, ValueError):
    pass


class ForbiddenParameters(EinsteinWarpError, ValueError):
    pass


class DegenerateCoefficient(EinsteinWarpError, ArithmeticError):
    """Raised when the fiber-curvature coefficient ``alpha - m*rho`` vanishes.

    ``bracket`` carries the value(s) that must then vanish on their own.
    """

    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket


class ChartUnavailable(EinsteinWarpError):
    pass


class BlowUp(EinsteinWarpError, ArithmeticError):
    """Riccati escape: the slope exceeded its cap (or the integrator stalled)."""

    def __init__(self, message, last_xi):
        super().__init__(message)
        self.last_xi = last_xi


class FiberMismatch(EinsteinWarpError):
    def __init__(self, message, implied_theta, fiber_theta):
        super().__init__(message)
        self.implied_theta = implied_theta
        self.fiber_theta = fiber_theta


class NotASolution(EinsteinWarpError, ValueError):
    pass


class BracketZero(EinsteinWarpError, ArithmeticError):
    pass


class UnknownPreset(EinsteinWarpError, KeyError):
    pass


class UnsupportedBase(EinsteinWarpError, ValueError):
    pass


class ParseError(EinsteinWarpError, ValueError):
    pass


class UnknownId(EinsteinWarpError, KeyError):
    pass


class IncompleteHypotheses(EinsteinWarpError, ValueError):
    pass
