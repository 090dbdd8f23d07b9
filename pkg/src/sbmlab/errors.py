"""Typed error hierarchy shared by all modules."""


class SbmError(Exception):
    """Base class; the CLI maps these to exit code 1 with the class name."""


class NonSymmetric(SbmError):
    pass


class BadPrior(SbmError):
    pass


class DuplicateRows(SbmError):
    pass


class ProbabilityOverflow(SbmError):
    pass


class TooManyProfiles(SbmError):
    pass


class LengthMismatch(SbmError):
    pass


class ZeroEntry(SbmError):
    pass


class IndexOutOfRange(SbmError):
    pass


class BadPartition(SbmError):
    pass


class NumericalFailure(SbmError):
    pass


class DegenerateSpectrum(SbmError):
    pass


class BudgetExceeded(SbmError):
    pass


class ParameterError(SbmError):
    pass


class ClassificationFailed(SbmError):
    """A single unreliable classification run could not produce a labeling."""


class AllRunsFailed(SbmError):
    pass


class NotApplicable(SbmError):
    pass


class DimensionTooLarge(SbmError):
    pass
