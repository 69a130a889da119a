"""Exception types shared across the package."""


class NumericalError(ArithmeticError):
    """A computation could not be carried out to the requested accuracy."""

    category = "numerical"


class SingularMatrixError(NumericalError):
    """Raised when a matrix that must be inverted is numerically singular."""

    category = "singular"

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class PoleError(NumericalError):
    """Raised when an RG step hits the pole of its denominator."""

    category = "pole"

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location
