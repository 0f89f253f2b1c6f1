"""Exception types shared across the package."""

from __future__ import annotations


class RelsylError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(RelsylError):
    """Lexical or grammatical error in theory/sentence text."""

    def __init__(self, message: str, line: int = 1, col: int = 1):
        super().__init__(f"line {line}, column {col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class FragmentError(RelsylError):
    """Input lies outside the fragment a decider was asked to handle."""


class BudgetError(RelsylError):
    """A configured search or enumeration cap was exceeded."""


class InternalError(RelsylError):
    """An internal consistency check failed (a bug, never a valid answer)."""
