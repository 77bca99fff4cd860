"""Exception types shared across the package."""


class CssError(Exception):
    """Base class for all errors raised by css_sketch."""


class InvalidInput(CssError, ValueError):
    pass


class NumericalFailure(CssError, ArithmeticError):
    pass


class InfeasibleGamma(InvalidInput):
    """The constraint level on c(s) fell below one: ell is too small for k and delta."""


class DegenerateDraw(CssError):
    """A sampled sub-problem lost rank; callers may resample."""


class InvalidConfig(InvalidInput):
    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
