"""Exception hierarchy.

Configuration problems and numerical problems are kept apart so the command
line front end can map them to distinct exit codes.
"""


class QuantumLimitsError(Exception):
    """Base class for every error raised by the package."""


class ConfigError(QuantumLimitsError, ValueError):
    """Invalid scenario or model parameters.

    ``path`` names the offending field (dotted), when known.
    """

    def __init__(self, message, path=None):
        self.path = path
        if path:
            message = f"{path}: {message}"
        super().__init__(message)


class NumericalError(QuantumLimitsError, ArithmeticError):
    """Base class for failures during evaluation."""


class DomainError(NumericalError, ValueError):
    """Argument outside the domain where a model is defined."""


class SingularityError(NumericalError, ZeroDivisionError):
    """Evaluation hit a pole of the mechanical response."""

    def __init__(self, message, omega=None):
        self.omega = omega
        super().__init__(message)


class ConstraintError(NumericalError):
    """Quadrature spectra violate the Heisenberg inequality."""


class QuadratureError(NumericalError):
    """Adaptive integration did not reach the requested tolerance."""

    def __init__(self, message, achieved=None):
        self.achieved = achieved
        super().__init__(message)
