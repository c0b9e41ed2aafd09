"""Exception types raised by btlab."""

from __future__ import annotations


class BtlabError(Exception):
    """Base class for all library errors."""


class RadiusExceedsPrecision(BtlabError):
    pass


class NonEisensteinPolynomial(BtlabError):
    pass


class InvalidResidueField(BtlabError):
    pass


class MixedContexts(BtlabError):
    pass


class NonUnitInverse(BtlabError):
    pass


class ReducibleExtension(BtlabError):
    pass


class KindConstraintViolated(BtlabError):
    pass


class NotDyadic(BtlabError):
    pass


class InsufficientPrecision(BtlabError):
    pass


class BadHasse(BtlabError):
    pass


class BadLevel(BtlabError):
    pass


class RegimeMismatch(BtlabError):
    pass


class WrongShape(BtlabError):
    pass


class IndexOutOfRange(BtlabError):
    pass


class IncompatibleLevels(BtlabError):
    pass


class BudgetExceeded(BtlabError):
    pass


class CapExceedsPrecision(BtlabError):
    pass


class NoWitness(BtlabError):
    pass


class UnknownCheck(BtlabError):
    pass


class SpecFormatError(BtlabError):
    """Malformed JSON input."""
