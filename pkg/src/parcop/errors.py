"""Semantic exception hierarchy shared by all modules."""


class ParcopError(Exception):
    """Base class for all library errors."""


class DomainError(ParcopError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class BracketError(ParcopError, ValueError):
    """A root bracket does not enclose a sign change."""


class EvaluationError(ParcopError, ArithmeticError):
    """An integrand or formula produced a non-finite value."""


class InversionError(ParcopError, ArithmeticError):
    """An h-function inversion found no root in [0, 1]."""


class InputError(ParcopError, ValueError):
    """Malformed sample input (length mismatch, out-of-range values)."""


class UndefinedStatisticError(ParcopError, ValueError):
    """A statistic is undefined for the given sample (too short, zero variance)."""
