"""Errors raised by ggcheck.

Argument and data problems are ``ValueError`` subclasses, arithmetic failures
are ``ArithmeticError`` subclasses and engine failures are ``RuntimeError``
subclasses, so callers can catch them at the granularity they need.
"""

from __future__ import annotations

from typing import Any


class InvalidArgumentError(ValueError):
    """An argument is outside the domain of the operation."""


class NotInvertibleError(ArithmeticError):
    """A p-adic value is not a unit."""

    def __init__(self, message: str, valuation: Any = None):
        """Initialize the error.

        Args:
            message: description of the failure.
            valuation: the valuation witnessing that the value is not a unit.
        """
        super().__init__(message)
        self.valuation = valuation


class PrecisionUnderflowError(ArithmeticError):
    """An operation needs more p-adic digits than are available."""

    def __init__(self, message: str, needed: int = 0, available: int = 0):
        """Initialize the error.

        Args:
            message: description of the failure.
            needed: digits consumed by the operation.
            available: digits the operand carried.
        """
        super().__init__(message)
        self.needed = needed
        self.available = available


class CannotPrepareError(ArithmeticError):
    """No unit coefficient below the cutoff, so the preparation is undefined."""


class AmbiguityError(ArithmeticError):
    """A coefficient that is zero only at precision makes the answer ambiguous."""


class UnboundedTailError(ArithmeticError):
    """The truncated tail of a series can change the value of an evaluation."""


class HenselConditionError(ArithmeticError):
    """The starting point does not satisfy v(h(r0)) > 2 v(h'(r0))."""

    def __init__(self, message: str, value_valuation: Any = None, slope_valuation: Any = None):
        """Initialize the error.

        Args:
            message: description of the failure.
            value_valuation: valuation of h(r0).
            slope_valuation: valuation of h'(r0).
        """
        super().__init__(message)
        self.value_valuation = value_valuation
        self.slope_valuation = slope_valuation


class InvalidCharError(ValueError):
    """A characteristic polynomial does not vanish at T = 0."""


class DataMissingError(ValueError):
    """A record lacks the field a criterion needs."""

    def __init__(self, field: str, message: str | None = None):
        """Initialize the error.

        Args:
            field: name of the missing record field.
            message: optional description, defaults to naming the field.
        """
        super().__init__(message or f"Record field '{field}' is required but missing.")
        self.field = field


class SchemaError(ValueError):
    """A record does not conform to the JSON schema."""

    def __init__(self, message: str, pointer: str = ""):
        """Initialize the error.

        Args:
            message: description of the violation.
            pointer: JSON pointer of the offending value.
        """
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer


class SplitConditionError(SchemaError):
    """The prime does not split in the imaginary quadratic field."""


class ConstantTermError(SchemaError):
    """The characteristic polynomial data has a non-zero constant term."""


class CasError(RuntimeError):
    """Base class for computer-algebra engine failures."""


class EngineMissingError(CasError):
    """The engine executable cannot be found."""


class CasTimeoutError(CasError):
    """The engine did not answer within the task timeout."""


class ParseFailureError(CasError):
    """The engine output does not follow the sentinel protocol."""

    def __init__(self, message: str, raw: str = ""):
        """Initialize the error.

        Args:
            message: description of the failure.
            raw: the unparsed engine output.
        """
        super().__init__(message)
        self.raw = raw


class TaskUnsupportedError(CasError):
    """The requested engine task is not available for this record."""
