"""Exception hierarchy.

Every error carries the CLI exit code it maps to: 2 for unparseable input,
3 for a violated precondition, 4 for a numerical failure.
"""


class AsymPolarError(Exception):
    exit_code = 1


class ParseError(AsymPolarError, ValueError):
    exit_code = 2


class PreconditionError(AsymPolarError, ValueError):
    exit_code = 3


class NumericalError(AsymPolarError, ArithmeticError):
    exit_code = 4


class DimensionMismatch(PreconditionError):
    pass


class SizeMismatch(PreconditionError):
    pass


class IndexOutOfRange(PreconditionError):
    pass


class NotHermitian(PreconditionError):
    pass


class NotPositiveSemidefinite(PreconditionError):
    pass


class SingularMatrix(PreconditionError):
    pass


class SingularM(SingularMatrix):
    pass


class SingularB(SingularMatrix):
    pass


class SingularC(SingularMatrix):
    pass


class SingularL(SingularMatrix):
    pass


class SingularInput(SingularMatrix):
    pass


class SingularBase(PreconditionError):
    """Non-positive power requested of a singular PSD matrix."""


class RankDeficient(PreconditionError):
    pass


class DefectiveOrIllConditioned(PreconditionError):
    """The eigenvector matrix is too ill-conditioned; supply a JordanSpec instead."""


class ZeroVector(PreconditionError):
    pass


class NotInSL(PreconditionError):
    pass


class ScheduleError(PreconditionError):
    pass


class NoConvergence(NumericalError):
    pass


class Overflow(NumericalError):
    pass


class AmbiguousClassification(NumericalError):
    pass
