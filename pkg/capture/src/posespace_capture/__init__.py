"""Camera capture adapter: hand-tracking backend -> landmark stream records."""

from .backend import BackendError, CaptureBackend, SyntheticBackend
from .capture import BoundedWriter, CaptureConfig, CaptureStats, capture_stream

__all__ = [
    "BackendError",
    "BoundedWriter",
    "CaptureBackend",
    "CaptureConfig",
    "CaptureStats",
    "SyntheticBackend",
    "capture_stream",
]
