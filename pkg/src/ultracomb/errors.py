"""Exception types shared across the package."""


class UltracombError(Exception):
    """Base class for all package errors."""


class GroundMismatch(UltracombError, ValueError):
    """Operands live on different ground sets or product spaces."""


class CapExceeded(UltracombError, ValueError):
    """A size is beyond the exhaustive-check cap."""


class OverflowBeyondTruncation(UltracombError, ArithmeticError):
    """A pseudo-sum left the truncated segment [0, N)."""


class ShapeMismatch(UltracombError, ValueError):
    """A witness, certificate or tensor set does not match its spec."""


class SearchBudgetExceeded(UltracombError):
    """An exhaustive search ran out of its node budget before deciding."""


class NotFoundWithinPrefix(UltracombError):
    """The finite prefix is too short for the requested extraction."""


class NoInnerLimit(UltracombError):
    """An inner limit failed the Cauchy-tail test at its cap."""

    def __init__(self, message, n=None, spread=None):
        super().__init__(message)
        self.n = n
        self.spread = spread


class CapTooSmall(UltracombError):
    """The caps of a double-limit evaluation cannot certify the tolerance."""


class SetLangError(UltracombError, ValueError):
    """Syntax, sort or evaluation error in a set/function expression."""

    def __init__(self, message, text="", pos=None):
        self.text = text
        self.pos = pos
        self.line = self.column = None
        if pos is not None:
            before = text[:pos]
            self.line = before.count("\n") + 1
            self.column = pos - (before.rfind("\n") + 1) + 1
            message = f"{message} (line {self.line}, column {self.column})"
        super().__init__(message)
