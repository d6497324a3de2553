"""Exception types shared across the toolkit."""


class FjmError(Exception):
    """Base class for all toolkit errors."""


class InvalidArgumentError(FjmError, ValueError):
    """An argument violates a documented precondition."""


class MalformedCurveError(FjmError, ValueError):
    """A force-deflection curve breaks its structural invariants."""


class InsufficientDataError(FjmError):
    """Too few samples or groups to run the requested fit."""


class DegenerateCurveError(FjmError):
    """A fit produced a slope from which nothing can be derived."""


class OutOfModelError(FjmError):
    """A measurement implies parameters outside the friction model's range."""


class ConfigurationError(FjmError):
    """A config file or friction model is missing or inconsistent."""


class NoFeasibleDesignError(FjmError):
    """No design point satisfies the given constraints."""

    def __init__(self, message: str, binding_constraints: list[str] | None = None):
        super().__init__(message)
        self.binding_constraints = binding_constraints or []
