"""
Error taxonomy for the de Branges-Rovnyak lab.

Every error carries the process exit code the CLI should use when the error
reaches the top level.
"""


class LabError(Exception):
    """Base class for all lab errors."""

    exit_code = 4

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details

    def to_dict(self):
        return {
            "type": type(self).__name__,
            "message": str(self),
            "details": self.details,
        }


# hardy
class GridSizeError(LabError, ValueError):
    """Grid size is not a power of two or is too small for the data."""


class NotAnalytic(LabError, ValueError):
    """Boundary samples carry too much negative-frequency energy."""


class DegreeTooLow(LabError, ValueError):
    """Polynomial of degree 0 passed to a root finder."""


class ShapeMismatch(LabError, ValueError):
    pass


class PoleNearCircle(LabError, ValueError):
    """Rational denominator vanishes on or near the unit circle."""


# factorization
class ModulusExceedsOne(LabError, ValueError):
    pass


class LogNotIntegrable(LabError, ValueError):
    pass


class ExtremeInput(LabError, ValueError):
    """The input b is an extreme point of the unit ball."""

    exit_code = 3


class ZeroNearContour(LabError):
    pass


class InsufficientSamples(LabError):
    pass


class ZeroFunction(LabError, ValueError):
    pass


# operators
class NotAContraction(LabError, ValueError):
    pass


class SolveFailure(LabError):
    pass


class SampleMismatch(LabError, ValueError):
    pass


class NotStarInner(LabError, ValueError):
    pass


class NotPure(LabError, ValueError):
    pass


# dbr_model
class ZeroB(LabError, ValueError):
    pass


class IsometryResidualTooLarge(LabError):
    pass


class NotPSD(LabError):
    pass


# dilation
class AlphaOutOfRange(LabError, ValueError):
    pass


class KernelDimNotOne(LabError):
    pass


class NoConvergence(LabError):
    pass


class C1Violated(LabError, ValueError):
    pass


class DefectProfileUnexpected(LabError):
    pass


# conditions
class NotUnitaryCompletion(LabError):
    pass
