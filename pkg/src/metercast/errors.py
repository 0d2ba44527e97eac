"""Exception and warning types shared across the toolkit."""


class MeterCastError(Exception):
    """Base class for all toolkit errors."""


class MalformedHeaderError(MeterCastError):
    """CSV header does not match the expected wide meter-file schema."""


class MalformedRowError(MeterCastError):
    """A data row has the wrong shape (e.g. wrong column count)."""

    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row


class UnparseableDateError(MeterCastError):
    """A date cell could not be parsed in any accepted format."""

    def __init__(self, row: int, token: str):
        super().__init__(f"row {row}: unparseable date {token!r}")
        self.row = row
        self.token = token


class UnparseableValueError(MeterCastError):
    """A numeric cell holds a token that is neither a number nor a missing marker."""

    def __init__(self, row: int, token: str):
        super().__init__(f"row {row}: unparseable value {token!r}")
        self.row = row
        self.token = token


class DuplicateDateError(MeterCastError):
    """Two input rows claim the same calendar date."""


class NoFlankError(MeterCastError):
    """A gap touches the series boundary, so it has no flanking value to interpolate from."""


class NoHistoryError(MeterCastError):
    """Neither the day-before nor the week-before reference value is available."""


class InsufficientHistoryError(MeterCastError):
    """A feature row reaches back before the start of the series (or into a missing value)."""


class DegenerateSeriesError(MeterCastError):
    """The series is constant, so autocorrelation is undefined."""


class NegativeValueError(MeterCastError):
    """Negative consumption cannot be log-transformed."""


class EmptyMatrixError(MeterCastError):
    """No series index has enough history to produce a single feature row."""


class DimensionMismatchError(MeterCastError):
    """A feature vector's length does not match the model's expected dimension."""


class EmptySideError(MeterCastError):
    """A temporal split leaves the train or test partition empty."""


class InsufficientDataError(MeterCastError):
    """Not enough rows for the requested resampling scheme."""


class LengthMismatchError(MeterCastError):
    """Paired sequences have different lengths."""


class EmptyInputError(MeterCastError):
    """An operation received an empty sequence."""


class ConstantTargetError(MeterCastError):
    """Relative error metrics are undefined for a constant observed series."""


class ZeroNormalizerError(MeterCastError):
    """The chosen NRMSE normalizer evaluates to zero."""


class InconsistentFixtureError(MeterCastError):
    """A fixture table violates one of its internal consistency identities."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class EmptyWindowError(MeterCastError):
    """The requested plot window contains no aligned data points."""


class UnitMismatchWarning(UserWarning):
    """A meter file declares a unit other than kWh; values are kept as-is."""


class TotalMismatchWarning(UserWarning):
    """A day's declared total disagrees with the sum of its present slots."""
