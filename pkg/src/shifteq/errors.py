"""Exception hierarchy shared by every module."""

from __future__ import annotations


class ShiftEqError(Exception):
    """Base class for all library errors."""


class IncompatibleIndexSets(ShiftEqError):
    """Two objects were combined across index sets that do not match."""


class NotSquare(ShiftEqError):
    """A square matrix was required."""


class NotAFactorization(ShiftEqError):
    """The supplied R, S do not satisfy A = RS and SR = B."""


class NotAnSEWitness(ShiftEqError):
    """The supplied R, S do not satisfy the shift equivalence equations."""


class BadLevel(ShiftEqError):
    """A level argument fell outside 1..lag."""


class TheoremViolation(ShiftEqError):
    """Classification flags disagreed on essential matrices.

    This is a self-check: if it ever fires the implementation is wrong.
    """


class VerificationFailure(ShiftEqError):
    """A reduction produced data whose defining equations do not hold."""


class TrimFailure(ShiftEqError):
    """A chain could not be trimmed to finitely many intermediate indices."""


class ParseError(ShiftEqError):
    """An artifact file could not be parsed.

    ``where`` names the line or field at fault.
    """

    def __init__(self, message: str, where: str | None = None):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)


class InvariantViolation(ShiftEqError):
    """A parsed value broke a type invariant; ``invariant`` names it."""

    def __init__(self, invariant: str, detail: str = ""):
        self.invariant = invariant
        self.detail = detail
        super().__init__(f"{invariant}: {detail}" if detail else invariant)
