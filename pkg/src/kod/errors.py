"""Exception types shared across the package."""


class KodError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(KodError, ValueError):
    """Caller-supplied data or options are malformed."""


class DegenerateDataError(KodError, ValueError):
    """The data admit no meaningful fit (zero spread, zero rank, ...)."""


class CsvParseError(KodError, ValueError):
    """Malformed CSV input; the message carries row/column context."""


class ModelFormatError(KodError, ValueError):
    """A persisted model file is unreadable, truncated or of the wrong version."""
