"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class ZeroSumError(ValueError):
    """Base class for all errors raised by :mod:`zerosum`."""


class ChainViolation(ZeroSumError):
    pass


class BadFactor(ZeroSumError):
    pass


class RankMismatch(ZeroSumError):
    pass


class OutOfRange(ZeroSumError):
    pass


class NotAPGroup(ZeroSumError):
    pass


class SpecParseError(ZeroSumError):
    pass


class NotASubsequence(ZeroSumError):
    pass


class CapExceeded(ZeroSumError):
    """Enumeration or search space larger than the configured cap.

    ``required`` carries the size that would have been needed, when known.
    """

    def __init__(self, message: str, required: int | None = None):
        super().__init__(message)
        self.required = required


class BudgetExceeded(ZeroSumError):
    pass


class TooManyVariables(ZeroSumError):
    pass


class WindowViolation(ZeroSumError):
    pass


class HypothesisViolation(ZeroSumError):
    pass


class PremiseNotMet(ZeroSumError):
    pass


class PreconditionViolation(ZeroSumError):
    pass


class BadWindow(ZeroSumError):
    pass


class InadmissibleGroup(ZeroSumError):
    pass


class RejectionBudgetExhausted(ZeroSumError):
    pass


class GcdViolation(ZeroSumError):
    pass


class BadJ(ZeroSumError):
    pass


class CacheVerificationError(ZeroSumError):
    """A cached witness failed re-verification."""
