"""Exception hierarchy shared by the package."""


class ToroidalError(Exception):
    """Base class for all package errors."""


class DivisionByZero(ToroidalError, ZeroDivisionError):
    pass


class SpecializationCollapsesDenominator(ToroidalError):
    pass


class EvaluationAtPole(ToroidalError):
    pass


class NotAPole(ToroidalError):
    pass


class PoleNotSimple(ToroidalError):
    pass


class IncomparableBoxes(ToroidalError):
    pass


class InvalidState(ToroidalError):
    pass


class InvalidProhibitedBox(ToroidalError):
    pass


class InvalidSlope(ToroidalError):
    pass


class WindowTooLargeForBound(ToroidalError):
    pass


class UnknownKind(ToroidalError):
    pass


class ConstraintViolated(ToroidalError):
    pass


class SubstitutionSingular(ToroidalError):
    pass
