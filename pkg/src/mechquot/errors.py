"""Exception hierarchy.  ``exit_code`` is what the CLI returns for each class."""


class MechquotError(Exception):
    exit_code = 2


class ExprError(MechquotError, ValueError):
    """Malformed expression, unknown identifier, or division by zero."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class PoleError(MechquotError, ArithmeticError):
    """Evaluation hit a zero denominator."""

    def __init__(self, message: str, time: float | None = None):
        self.time = time
        super().__init__(message)


class ChartMismatch(MechquotError, ValueError):
    pass


class InputError(MechquotError, ValueError):
    """Invalid system description or command-line input."""


class CapExceeded(MechquotError):
    """A closure or bracket tower hit its iteration or degree ceiling."""

    exit_code = 3


class QuotientError(MechquotError):
    exit_code = 1


class NotAdapted(QuotientError):
    code = "NOT_ADAPTED"


class DependenceViolation(QuotientError):
    code = "DEPENDENCE_VIOLATION"

    def __init__(self, message: str, symbol: str = ""):
        self.symbol = symbol
        super().__init__(message)


class PreconditionError(QuotientError):
    code = "PRECONDITION"


class SingularPoint(QuotientError):
    code = "SINGULAR_POINT"


class IntegrationError(MechquotError):
    """Non-finite state or misaligned control grid during simulation."""
