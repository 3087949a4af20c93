from __future__ import annotations

__all__ = [
    "ArgumentError",
    "DomainError",
    "ValidationError",
    "ScaleGuardError",
    "NumericError",
]


class ArgumentError(ValueError):
    """Inputs are inconsistent with each other (weights, sizes, letters)."""


class DomainError(ValueError):
    """A function was evaluated at a pole or outside its domain."""


class ValidationError(ValueError):
    """A word set does not describe a valid connected map."""


class ScaleGuardError(ValueError):
    """The requested computation exceeds a configured size bound."""


class NumericError(ArithmeticError):
    """Floating-point linear algebra failed."""
