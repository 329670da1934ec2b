"""Exception types shared across the package."""


class SkelactError(Exception):
    """Base class for all library errors."""


class ParseError(SkelactError):
    """A file or record could not be parsed under its declared format."""


class ValidationError(SkelactError):
    """Parsed data violates an invariant (timestamps, NaN coordinates, ...)."""


class ShapeError(SkelactError):
    """An array has the wrong shape for the operation."""


class EmptyDataset(SkelactError):
    pass


class InsufficientDepth(SkelactError):
    """Too few valid depth samples to estimate a distance."""


class DegeneratePose(SkelactError):
    """Hip and shoulder midpoints coincide; scale/orientation undefined."""


class NonMonotonicTime(SkelactError):
    """Frame timestamps are not strictly increasing."""


class EmptyInput(SkelactError):
    pass


class LayoutMismatch(SkelactError):
    """Feature layout of the input does not match the fitted/expected layout."""


class Diverged(SkelactError):
    """Training loss became NaN."""


class InsufficientData(SkelactError):
    pass


class DimMismatch(SkelactError):
    pass


class EmptySequence(SkelactError):
    pass


class ClassTooSmall(SkelactError):
    """A class has fewer members than the number of folds."""


class CoincidentPositions(SkelactError):
    """UAV and human occupy the same point; bearing undefined."""


class ScriptOrderError(SkelactError):
    """Scenario script timestamps are not increasing."""


class ConfigError(SkelactError):
    """Unknown or ill-typed configuration key."""
