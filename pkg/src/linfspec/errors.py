"""Exception hierarchy.

Input-validation problems derive from :class:`ValueError`; failures of a
numerical guard (overflow, causality, quadrature stability, ambiguity bound)
derive from :class:`NumericalError` so callers such as the CLI can tell the
two apart.
"""

from __future__ import annotations


class LinfSpecError(Exception):
    """Base class for all errors raised by this package."""


class NonFiniteError(LinfSpecError, ValueError):
    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class WindowError(LinfSpecError, ValueError):
    """A sample outside the known window of a signal was requested."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class MaskError(WindowError):
    """A masked (unobserved) sample was requested."""


class ConfigError(LinfSpecError, ValueError):
    pass


class NumericalError(LinfSpecError):
    """A numerical guard tripped."""


class SingularityError(NumericalError, ArithmeticError):
    pass


class SaturationError(NumericalError, OverflowError):
    """Value exceeds the floating range; ``log_magnitude`` holds log|value|."""

    def __init__(self, message: str, log_magnitude: float | None = None):
        super().__init__(message)
        self.log_magnitude = log_magnitude


class GuardError(NumericalError):
    pass


class CausalityError(NumericalError):
    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class QuadratureError(NumericalError):
    pass


class AmbiguityBoundError(NumericalError):
    pass
