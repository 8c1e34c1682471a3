"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class OrthocatError(Exception):
    """Base class; ``witness`` carries a reproducible counterexample when one exists."""

    exit_code = 1

    def __init__(self, message: str = "", witness=None):
        super().__init__(message)
        self.witness = witness


class ParseError(OrthocatError):
    exit_code = 2


class PreconditionError(OrthocatError):
    exit_code = 3


class CycleDetected(PreconditionError):
    pass


class UnknownElement(PreconditionError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class NotASemilattice(PreconditionError):
    pass


class NotLocallyDistributive(PreconditionError):
    pass


class NotLocallyBoolean(PreconditionError):
    pass


class NotAFace(PreconditionError):
    pass


class EmptyComplex(PreconditionError):
    pass


class IncompatibleOrder(PreconditionError):
    pass


class UnknownVertex(PreconditionError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class NonPositiveLength(PreconditionError):
    pass


class NotAChain(PreconditionError):
    pass


class NotInComplex(PreconditionError):
    pass


class PreconditionViolated(PreconditionError):
    pass


class DisconnectedPoset(PreconditionError):
    pass


class NotLocated(PreconditionError):
    pass


class Disconnected(PreconditionError):
    pass


class BadParams(PreconditionError):
    pass


class BudgetExceeded(OrthocatError):
    """Raised when the gallery search stops early; ``result`` holds the best path found."""

    exit_code = 4

    def __init__(self, message: str, result=None):
        super().__init__(message)
        self.result = result
