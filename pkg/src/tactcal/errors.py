"""Exception and warning classes.

Every error carries an optional ``step`` attribute so the calibration
pipeline can say which stage failed without wrapping exceptions twice.
"""


class TactcalError(Exception):
    """Base class for all errors raised by this package."""

    step = None

    def with_step(self, step):
        self.step = step
        return self


class DomainError(TactcalError, ValueError):
    """An argument lies outside the domain of the model."""


class SingularInputError(DomainError):
    """The model is singular at the requested input (e.g. zero contact radius)."""


class RootFindingError(TactcalError, ArithmeticError):
    """A bracketed root search could not find a sign change.

    ``residuals`` holds the residual at both ends of the bracket.
    """

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class InconsistentSampleError(DomainError):
    """A measured sample violates its own invariant."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class InsufficientDataError(TactcalError):
    """Too few samples survive to fit the requested model."""


class DegenerateDesignError(TactcalError):
    """The least-squares design matrix is rank deficient."""


class InversionError(TactcalError):
    """The closed-form inversion produced a non-physical modulus."""

    def __init__(self, message, H1=None, H3=None):
        super().__init__(message)
        self.H1 = H1
        self.H3 = H3


class AlignmentError(TactcalError):
    """Repeated datasets do not share a commanded grid."""

    def __init__(self, message, unmatched=()):
        super().__init__(message)
        self.unmatched = list(unmatched)


class ResourceError(TactcalError):
    """A requested operator exceeds the configured memory budget."""


class SolverError(TactcalError, ArithmeticError):
    """A linear solve is numerically singular."""

    def __init__(self, message, suggested_lambda=None):
        super().__init__(message)
        self.suggested_lambda = suggested_lambda


class ModelPremiseWarning(UserWarning):
    """The configuration violates an assumption of the contact model."""


class CalibrationWarning(UserWarning):
    """A calibration quantity was clamped or is otherwise suspicious."""


class InputFormatError(DomainError):
    """A data or config file could not be parsed.

    ``line`` is 1-based; ``column`` is the 1-based field index when known.
    """

    def __init__(self, message, path=None, line=None, column=None):
        loc = ":".join(str(p) for p in (path, line, column) if p is not None)
        super().__init__(f"{loc}: {message}" if loc else message)
        self.path = path
        self.line = line
        self.column = column
