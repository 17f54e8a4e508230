"""Exception types raised across the package."""


class GRGraphError(Exception):
    """Base class for all package errors."""


class NotOddPrime(GRGraphError, ValueError):
    pass


class ReducibleModulus(GRGraphError, ValueError):
    pass


class DegreeMismatch(GRGraphError, ValueError):
    pass


class MixedRings(GRGraphError, TypeError):
    pass


class NotAUnit(GRGraphError, ArithmeticError):
    pass


class NotASquare(GRGraphError, ArithmeticError):
    pass


class BudgetExceeded(GRGraphError, RuntimeError):
    pass


class DimensionMismatch(GRGraphError, ValueError):
    pass


class NotAlternate(GRGraphError, ValueError):
    pass


class ZeroVector(GRGraphError, ValueError):
    pass


class NoUnitCoordinate(GRGraphError, ValueError):
    pass


class NotAVertex(GRGraphError, ValueError):
    pass


class IsE1(GRGraphError, ValueError):
    pass


class InternalWitnessFailure(GRGraphError, AssertionError):
    """A constructed witness failed its own certification (implementation bug)."""


class NormOneUnavailable(GRGraphError, ArithmeticError):
    """No units c, d with c^2 - d^2 z = 1 exist in the ring (only when p^m = 3)."""


class FallbackExhausted(GRGraphError, RuntimeError):
    pass


class IntegralityViolation(GRGraphError, ArithmeticError):
    pass


class InvariantViolation(GRGraphError, AssertionError):
    pass
