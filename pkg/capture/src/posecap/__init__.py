"""posecap: RGB-D pose capture adapter emitting the neutral raw-frame stream."""

from .adapter import AdapterConfig, CaptureStats, run_capture
from .errors import ModelLoadError, PosecapError, SourceUnavailable, ValidationError
from .landmarks import MODEL_TO_NEUTRAL, NEUTRAL_NAMES, NUM_NEUTRAL
from .schema import StreamReport, validate_file, validate_stream
from .sources import Intrinsics, RecordedSource, SourceFrame, open_source

__version__ = "0.1.0"

__all__ = [
    "AdapterConfig", "CaptureStats", "run_capture",
    "ModelLoadError", "PosecapError", "SourceUnavailable", "ValidationError",
    "MODEL_TO_NEUTRAL", "NEUTRAL_NAMES", "NUM_NEUTRAL",
    "StreamReport", "validate_file", "validate_stream",
    "Intrinsics", "RecordedSource", "SourceFrame", "open_source",
    "__version__",
]
