"""Exception types for the capture adapter."""


class PosecapError(Exception):
    """Base class for all adapter errors."""


class ValidationError(PosecapError):
    """A configuration or data invariant is violated."""


class SourceUnavailable(PosecapError):
    """The requested camera or recorded take cannot be opened."""


class ModelLoadError(PosecapError):
    """The pose-estimation backend is not installed or failed to load."""
