"""Exception hierarchy.

Soft failures (a randomized search ran out of budget) derive from
``SoftFailure``; everything else is a precondition or validation error.
The CLI maps the two families to different exit codes.
"""


class LabError(Exception):
    pass


class SoftFailure(LabError):
    pass


class BudgetExhausted(SoftFailure):
    pass


class NormalizationNotFound(SoftFailure):
    pass


class NotUnimodular(LabError):
    pass


class UnsupportedRing(LabError):
    pass


class MissingDimension(LabError):
    pass


class MissingMinimalPrimes(LabError):
    pass


class NotComaximal(LabError):
    pass


class SizeMismatch(LabError):
    pass


class NotSL(LabError):
    pass


class NotGenericPosition(LabError):
    def __init__(self, step, message=None):
        self.step = step
        super().__init__(message or f"zero pivot at reduction step {step}")


class NotInOpenSet(LabError):
    pass


class FiniteFieldUnsupported(LabError):
    pass


class NotInfiniteField(LabError):
    pass


class TooLarge(LabError):
    pass


class InternalInvariantViolation(LabError):
    pass


class HeightPreconditionFailed(LabError):
    pass


class DimensionHypothesisViolated(LabError):
    pass


class NotGeneric(LabError):
    pass


class NotApplicable(LabError):
    pass


class WitnessConstructionFailed(LabError):
    pass


class ParseError(LabError, ValueError):
    pass
