class CompBernError(Exception):
    """Base class for library errors."""


class DomainError(CompBernError, ValueError):
    """An evaluation point lies outside the operator's interval."""


class InvalidParameterError(CompBernError, ValueError):
    """A degree, piece count, step or interval is out of range."""


class InvalidInputError(CompBernError, ValueError):
    """A function lacks metadata an operation needs (e.g. its second derivative)."""


class ConvergenceError(CompBernError, RuntimeError):
    """The adaptive integrator hit its depth or interval cap."""
