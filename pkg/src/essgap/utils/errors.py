"""
Exception hierarchy for the essgap toolkit.

Every error derives from ValueError so callers that only know about bad
input keep working.
"""

from typing import Optional


class EssGapError(ValueError):
    """Base class for all toolkit errors."""

    def __init__(self, message: str, hint: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.hint = hint

    def to_dict(self) -> dict:
        return {"error": type(self).__name__, "message": self.message, "hint": self.hint}


class DimensionMismatchError(EssGapError):
    """Operands live over different variable counts."""


class CapExceededError(EssGapError):
    """A truth table would exceed the configured variable cap."""

    def __init__(self, n: int, cap: int, what: str = "function"):
        super().__init__(
            f"{what} needs {n} variables, above the cap of {cap}",
            hint=f"a table over {n} variables holds 2^{n} bits ({(1 << n) // 8 // 1024} KiB); "
            "shrink the parameters or pass --force",
        )
        self.n = n
        self.cap = cap


class InfeasibleCoverError(EssGapError):
    """Some element cannot be covered by any subset."""


class SearchLimitExceeded(EssGapError):
    """An exact search ran past its work budget."""


class PolarityError(EssGapError):
    """A point does not have the polarity the operation expects."""


class NotHornError(EssGapError):
    """The target function is not (definite) Horn."""


class UncertifiedVWError(EssGapError):
    """A V/W vector pair fails the e_i in S_j iff v^i >= w^j property."""


class RetryBudgetExhausted(EssGapError):
    """The randomized V/W construction failed on every attempt."""


class FormatError(EssGapError):
    """An input file does not follow its documented format."""
