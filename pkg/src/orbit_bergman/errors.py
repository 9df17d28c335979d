"""Exception hierarchy shared by all modules."""


class OrbitBergmanError(Exception):
    """Base class for all errors raised by this package."""


class BoundaryPointError(OrbitBergmanError, ValueError):
    """A point lies on (or numerically at) the boundary of its model."""


class ModelError(OrbitBergmanError, ValueError):
    """A point was supplied in the wrong model (half-plane vs disc)."""


class BudgetError(OrbitBergmanError, RuntimeError):
    """An enumeration budget was exceeded; partial results are refused."""


class ConvergenceError(OrbitBergmanError, RuntimeError):
    """A truncated sum or quadrature did not meet its convergence gate."""


class QuadratureError(OrbitBergmanError, RuntimeError):
    """A quadrature spec is too small for the requested tolerance."""


class WeightMismatchError(OrbitBergmanError, ValueError):
    """Two Bergman elements with different weights were combined."""


class InsufficientVanishingError(OrbitBergmanError, ValueError):
    """pop_zero was asked to divide out more zeros than the function has."""


class OrderingError(OrbitBergmanError, RuntimeError):
    """The Magnus order could not separate two distinct reduced words."""


class TailBoundError(OrbitBergmanError, RuntimeError):
    """A q-series tail bound exceeds the requested tolerance."""


class NonCuspFormError(OrbitBergmanError, ValueError):
    """An operation requiring a cusp form received a form with a_0 != 0."""
