"""Exception hierarchy shared by every module."""


class A2XError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(A2XError, ValueError):
    """An input record violates one of its invariants."""


class EmptyDiskError(ValidationError):
    """The AAP is too high for its coverage sphere to reach user height."""


class DegenerateObstacleError(A2XError, ValueError):
    """The building's footprint contains the AAP ground projection."""


class QuadratureError(A2XError, ArithmeticError):
    """Adaptive quadrature exhausted its subdivision budget."""


class ConfigError(ValidationError):
    """Malformed or invalid configuration file."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
