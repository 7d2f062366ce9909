"""Shared exception types.

The error names mirror the failure modes of the public operations:
bad arguments, structurally inapplicable requests, out-of-range
exponents, and resource refusals.
"""


class OpslabError(Exception):
    """Base class for all package errors."""


class InvalidParameter(OpslabError, ValueError):
    """An argument violates a precondition (wrong range, wrong shape)."""


class NotApplicable(OpslabError, ValueError):
    """The operation is structurally undefined for this input."""


class OutOfRange(OpslabError, ValueError):
    """An exponent lies outside the interval the operation supports."""


class InfeasibleBudget(OpslabError, ValueError):
    """A rank or size budget is too small for the requested problem."""


class BudgetExceeded(OpslabError, RuntimeError):
    """A requested computation exceeds the configured desk-scale caps."""


class ParseError(OpslabError, ValueError):
    """Expression text failed to parse; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position
