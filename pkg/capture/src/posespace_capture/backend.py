"""Hand-tracking backends.

A backend owns the camera and per-frame detection; `read()` returns a
(21, 3) landmark array when a hand is visible, or None when it is not.
All normalization happens downstream in the engine so live and replayed
input behave identically.
"""

from __future__ import annotations

from typing import Iterable, Optional, Protocol

import numpy as np


class BackendError(Exception):
    """Camera could not be opened or the detector failed to initialize."""


class CaptureBackend(Protocol):
    def open(self) -> None: ...

    def read(self) -> Optional[np.ndarray]:
        """Next frame's landmarks as (21, 3), or None when no hand is seen.
        May raise per-frame exceptions; the capture loop skips those frames."""
        ...

    def close(self) -> None: ...


class SyntheticBackend:
    """Replays a fixed sequence of landmark arrays; the default test double.

    Entries may be None (no hand detected) or an Exception instance (raised
    on read, exercising the skip path). The sequence ends with StopIteration
    from the capture loop's perspective: read() returns None forever after.
    """

    def __init__(self, frames: Iterable[object], fail_open: bool = False) -> None:
        self._frames = list(frames)
        self._pos = 0
        self._fail_open = fail_open
        self.opened = False
        self.closed = False

    def open(self) -> None:
        if self._fail_open:
            raise BackendError("camera 0 could not be opened")
        self.opened = True

    def read(self) -> Optional[np.ndarray]:
        if self._pos >= len(self._frames):
            return None
        item = self._frames[self._pos]
        self._pos += 1
        if isinstance(item, Exception):
            raise item
        return None if item is None else np.asarray(item, dtype=np.float64)

    @property
    def exhausted(self) -> bool:
        return self._pos >= len(self._frames)

    def close(self) -> None:
        self.closed = True


def mediapipe_backend(camera_index: int) -> CaptureBackend:
    """Live backend built on mediapipe Hands + OpenCV; optional dependency."""
    try:
        import cv2
        import mediapipe as mp
    except ImportError as exc:
        raise BackendError(f"mediapipe backend unavailable: {exc}") from exc

    class MediaPipeBackend:
        def __init__(self) -> None:
            self._cap = None
            self._hands = None

        def open(self) -> None:
            self._cap = cv2.VideoCapture(camera_index)
            if not self._cap.isOpened():
                raise BackendError(f"camera {camera_index} could not be opened")
            self._hands = mp.solutions.hands.Hands(
                max_num_hands=1, min_detection_confidence=0.5)

        def read(self) -> Optional[np.ndarray]:
            ok, frame = self._cap.read()
            if not ok:
                raise RuntimeError("camera read failed")
            result = self._hands.process(cv2.cvtColor(frame, cv2.COLOR_BGR2RGB))
            if not result.multi_hand_landmarks:
                return None
            lm = result.multi_hand_landmarks[0].landmark
            return np.array([[p.x, p.y, p.z] for p in lm], dtype=np.float64)

        def close(self) -> None:
            if self._hands is not None:
                self._hands.close()
            if self._cap is not None:
                self._cap.release()

    return MediaPipeBackend()
