"""Exception hierarchy shared by the solvers, the simulator and the CLI."""


class StoresizeError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(StoresizeError, ValueError):
    """Invalid user input (parameters out of range, malformed config)."""


class InvalidConfig(ValidationError):
    pass


class Unstable(ValidationError):
    """Mean demand N*p is not strictly below the grid capacity C."""


class DomainError(ValidationError):
    """A formula was evaluated outside its domain.

    ``helper`` names the offending quantity (e.g. ``"u"`` or ``"f"``).
    """

    def __init__(self, message, helper=None):
        super().__init__(message)
        self.helper = helper


class NumericalError(StoresizeError, ArithmeticError):
    """The computation itself failed (as opposed to bad input)."""


class DriftSingular(NumericalError):
    """Capacity sits on an integer, so some state has zero drift."""

    def __init__(self, message, capacity=None, state=None):
        super().__init__(message)
        self.capacity = capacity
        self.state = state


class NumericalInstability(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class InfeasibleTarget(NumericalError):
    pass
