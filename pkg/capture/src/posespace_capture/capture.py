"""Capture loop: backend frames -> schema-valid landmark stream records."""

from __future__ import annotations

import logging
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

from posespace.geometry import LandmarkFrame, frame_to_record

from .backend import CaptureBackend

log = logging.getLogger("posespace_capture")


@dataclass(frozen=True)
class CaptureConfig:
    camera_index: int = 0
    fps: float = 30.0
    source_id: str = "camera-0"

    def __post_init__(self) -> None:
        if not 1.0 <= self.fps <= 60.0:
            raise ValueError(f"fps must be in [1, 60], got {self.fps}")

    @property
    def frame_interval(self) -> float:
        return 1.0 / self.fps


@dataclass
class CaptureStats:
    emitted: int = 0
    no_hand: int = 0
    skipped: int = 0      # backend raised on read
    duplicates: int = 0   # non-increasing timestamps dropped


def capture_stream(config: CaptureConfig, backend: CaptureBackend,
                   clock: Callable[[], float] = time.monotonic,
                   stats: Optional[CaptureStats] = None,
                   max_frames: Optional[int] = None) -> Iterator[dict]:
    """Yield one stream record per frame with a detected hand.

    Records are validated through LandmarkFrame before emission, so every
    yielded dict is schema-valid. Timestamps come from `clock` and are
    strictly increasing; frames that would repeat or rewind time are dropped.
    Per-frame backend errors skip the frame and are counted.
    """
    stats = stats if stats is not None else CaptureStats()
    last_t: Optional[float] = None
    read = 0
    while max_frames is None or read < max_frames:
        if getattr(backend, "exhausted", False):
            break
        read += 1
        t = clock()
        try:
            points = backend.read()
        except Exception as exc:
            stats.skipped += 1
            log.debug("frame skipped (backend error): %s", exc)
            continue
        if points is None:
            stats.no_hand += 1
            continue
        if last_t is not None and t <= last_t:
            stats.duplicates += 1
            continue
        try:
            frame = LandmarkFrame(timestamp=t, points=points,
                                  source_id=config.source_id)
        except Exception as exc:
            stats.skipped += 1
            log.debug("frame skipped (invalid landmarks): %s", exc)
            continue
        last_t = t
        stats.emitted += 1
        yield frame_to_record(frame)


class BoundedWriter:
    """Drop-oldest bounded queue in front of a record sink.

    Keeps the capture loop non-blocking when the destination (for example a
    network socket) is slower than the camera; dropped records are counted.
    """

    def __init__(self, sink: Callable[[dict], None], maxlen: int = 256) -> None:
        self._sink = sink
        self._queue: deque[dict] = deque(maxlen=maxlen)
        self.dropped = 0

    def push(self, record: dict) -> None:
        if len(self._queue) == self._queue.maxlen:
            self._queue.popleft()
            self.dropped += 1
        self._queue.append(record)

    def drain(self) -> int:
        sent = 0
        while self._queue:
            self._sink(self._queue.popleft())
            sent += 1
        return sent
