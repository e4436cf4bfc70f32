"""Exception types shared across the package."""


class ChronoseriesError(Exception):
    """Base class for all library-specific errors."""


class UnitParseError(ChronoseriesError, ValueError):
    """A time unit string does not match <positive integer><suffix>."""


class ConsistencyError(ChronoseriesError, ValueError):
    """Series construction or extension would violate an invariant."""


class ResolutionError(ChronoseriesError, ValueError):
    """An operation needs a resolution the series does not have."""


class CsvError(ChronoseriesError, ValueError):
    """A CSV file could not be interpreted unambiguously."""


class FormatError(ChronoseriesError, ValueError):
    """A serialized document is malformed or has an unsupported version."""


class NotFittedError(ChronoseriesError, RuntimeError):
    """A model operation requires fit() to have been called first."""


class WindowError(ChronoseriesError, ValueError):
    """A series is too short for the model window it is used with."""
