"""Exception types shared across the package."""


class AHScatterError(Exception):
    """Base class for all errors raised by this package."""


class ZeroDenominator(AHScatterError, ZeroDivisionError):
    pass


class NonInvertibleLeadingTerm(AHScatterError, ArithmeticError):
    pass


class NotEvenEnough(AHScatterError, ValueError):
    pass


class NonPositiveMetric(AHScatterError, ValueError):
    pass


class DomainError(AHScatterError, ValueError):
    pass


class NumericalFailure(AHScatterError, ArithmeticError):
    """Numerical trouble that more precision or a different setup may fix."""


class IndicialCollision(NumericalFailure):
    """The spectral parameter is within the guard band of the lattice 2*lam - n in Z."""


LatticeGuard = IndicialCollision


class IntegratorFailure(NumericalFailure):
    pass


class IllConditioned(NumericalFailure):
    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class AtResonance(NumericalFailure):
    pass


class ZeroOnContour(NumericalFailure):
    pass


class Unresolved(NumericalFailure):
    def __init__(self, message, box=None, winding=None):
        super().__init__(message)
        self.box = box
        self.winding = winding


class ConfigError(AHScatterError, ValueError):
    pass
