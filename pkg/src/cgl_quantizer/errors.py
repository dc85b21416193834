"""Exception hierarchy.

``InvalidInput`` subclasses map to CLI exit code 2, ``CapExceeded`` to 3,
anything else raised during construction to 1.
"""


class CGLError(Exception):
    """Base class for all package errors."""


class InvalidInput(CGLError):
    pass


class ParseError(InvalidInput):
    pass


class SchemaError(InvalidInput):
    pass


class ValidationFailed(InvalidInput):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class BadEpsilon(InvalidInput):
    pass


class NotDivisible(CGLError, ArithmeticError):
    pass


class CoefficientNotInL(CGLError):
    pass


class NotHomogeneousError(CGLError):
    pass


class AmbiguousPivot(CGLError):
    pass


class NoPivot(AmbiguousPivot):
    pass


class MultiplePivots(AmbiguousPivot):
    pass


class NotAMonomial(CGLError):
    pass


class NotLogCanonical(CGLError):
    pass


class ChainIdentityFailed(CGLError):
    pass


class SupportViolation(CGLError):
    pass


class NotInSubalgebra(CGLError):
    pass


class CapExceeded(CGLError):
    pass


class PivotMismatch(CGLError):
    pass


class NotQCommuting(CGLError):
    pass
