"""Exception hierarchy shared across the package."""


class CingLearError(Exception):
    """Base class for all package errors."""


class DataError(CingLearError):
    """Problems with input data (loading, shapes, missing values)."""


class NumericalError(CingLearError):
    """Numerical failures (singular systems, non-PSD covariances, divergence)."""


class MissingHour(DataError):
    pass


class NonMonotonicTimestamps(DataError):
    pass


class UnknownColumn(DataError):
    pass


class InvalidSpec(DataError):
    pass


class EmptyInput(DataError):
    pass


class InsufficientHistory(DataError):
    pass


class DegenerateColumn(DataError):
    pass


class EmptyDesign(DataError):
    pass


class InvalidGrid(DataError):
    pass


class NonFiniteInput(DataError):
    pass


class TooFewRows(DataError):
    pass


class ShapeMismatch(DataError):
    pass


class LengthMismatch(DataError):
    pass


class TooShort(DataError):
    pass


class SingularRegression(NumericalError):
    pass


class MissingExogenous(DataError):
    pass


class EmptyResiduals(DataError):
    pass


class NonPSD(NumericalError):
    pass


class InvalidLevel(DataError):
    pass


class TooFewSamples(DataError):
    pass


class InsufficientData(DataError):
    pass


class MissingDistribution(DataError):
    pass


class InvalidRule(DataError):
    pass


class SingularCovariance(NumericalError):
    pass


class EmptySupport(DataError):
    pass


class InvalidDimensions(DataError):
    pass


class TooFewMatrices(DataError):
    pass


class FailureBudgetExceeded(NumericalError):
    """Raised when more than the allowed share of backtest days fail."""
