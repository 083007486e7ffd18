"""Exception types raised by the library."""


class HosmError(Exception):
    """Base class for all library errors."""


class DomainError(HosmError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class ParameterError(HosmError, ValueError):
    """Invalid or inconsistent numeric parameters."""


class ShapeError(HosmError, ValueError):
    """State vector of the wrong length."""


class ConfigurationError(HosmError, ValueError):
    """Controller or scenario configuration that cannot be honoured."""


class ContractViolation(HosmError, RuntimeError):
    """A caller broke a runtime contract (time regression, missing gain, ...)."""


class InsufficientDataError(HosmError, ValueError):
    """Not enough usable samples for a fit or a metric."""


class DivergenceError(HosmError, RuntimeError):
    """Simulation state became non-finite or exceeded the blow-up guard."""

    def __init__(self, step, message=None):
        self.step = step
        super().__init__(message or f"simulation diverged at step {step}")
