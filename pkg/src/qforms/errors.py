"""Exception hierarchy.

Errors fall in three families which the command line maps to exit codes:
validation failures (an input violates a mathematical invariant), parse
failures (malformed input) and everything else (engine errors).
"""
from __future__ import annotations


class QFormsError(Exception):
    """Base class for every error raised by the engine."""


class EngineError(QFormsError):
    pass


class MismatchedAlgebra(EngineError):
    pass


class InfiniteBasis(EngineError):
    pass


class DegreeMismatch(EngineError):
    pass


class NotNilpotent(EngineError):
    pass


class ShapeError(EngineError):
    pass


class WeightNotPreserved(EngineError):
    pass


class NotClosed(EngineError):
    pass


class IndexOutOfRange(EngineError):
    pass


class MismatchedGroupoid(EngineError):
    pass


class NotNormalized(EngineError):
    pass


class ValidationError(QFormsError):
    """An input violates a named invariant; ``witness`` shows where."""

    def __init__(self, invariant: str, witness: object = None, message: str | None = None):
        self.invariant = invariant
        self.witness = witness
        if message is None:
            message = invariant if witness is None else f"{invariant}: {witness}"
        super().__init__(message)


class JacobiFailure(ValidationError):
    pass


class NotAnAction(ValidationError):
    pass


class NotMorphic(ValidationError):
    pass


class ParseError(QFormsError):
    def __init__(self, message: str, position: str = "$"):
        self.position = position
        self.message = message
        super().__init__(f"{position}: {message}")
