"""Exception types shared across the package.

Parameter-validation failures raise plain ``ValueError`` (the CLI maps those
to exit status 2); the classes below cover input-data problems (exit 3) and
numerical degeneracies such as zero-variance statistics (exit 4).
"""


class PremiaLabError(Exception):
    """Base class for package-specific errors."""


class DataError(PremiaLabError):
    """A problem with input data (files, rows, market series)."""


class MissingFileError(DataError):
    """Input file does not exist."""


class MalformedRowError(DataError):
    """A CSV row (or header) could not be parsed; message names the line."""


class NonIncreasingDatesError(DataError):
    """Dates in a price CSV are not strictly increasing."""


class NonPositivePriceError(DataError):
    """A price level is zero, negative, or not finite."""


class DegenerateError(PremiaLabError):
    """A statistic is undefined on this input (e.g. zero variance)."""
