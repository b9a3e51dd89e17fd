"""Exception types shared across the package."""


class ModirectError(Exception):
    """Base class for all package errors."""


class InvalidInputError(ModirectError, ValueError):
    """An argument violates a documented precondition."""


class NumericalFailureError(ModirectError, RuntimeError):
    """A linear-algebra routine failed (non-positive-definite matrix, etc.)."""


class InvalidStateError(ModirectError, RuntimeError):
    """An operation was called on an empty or inconsistent container."""
