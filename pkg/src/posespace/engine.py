"""Real-time session state machine.

Frames stream in, are canonicalized into a ring buffer of N poses, and every
full window is encoded and classified. Discrete gestures are debounced: the
same argmax class must hold with confidence >= tau for k consecutive windows,
and a cooldown must have elapsed since the previous trigger. Pinch toggles
IDLE <-> EXPLORING; double-pinch in EXPLORING selects the nearest track;
circle triggers are reported but bound to no action. While EXPLORING, every
window moves the cursor (latent -> calibrated unit square) and re-checks the
nearest emotion center.

Timestamps come from the input stream, never the wall clock, so replaying a
recorded stream reproduces the event log byte for byte.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DegenerateHand, TooFewPoints
from .geometry import POSE_DIM, CanonicalPose, LandmarkFrame, canonicalize, window_vector
from .musicspace import Cursor, MusicSpace, nearest_emotion, nearest_track, EMOTIONS
from .nets import (DISCRETE_CLASSES, Checkpoint, GestureClass, classify, encode,
                   softmax)

log = logging.getLogger("posespace.engine")

IDLE = "IDLE"
EXPLORING = "EXPLORING"


@dataclass(frozen=True)
class EngineConfig:
    confidence_threshold: float = 0.8
    consecutive_windows: int = 3
    cooldown_s: float = 0.5

    def __post_init__(self) -> None:
        if not 0.0 < self.confidence_threshold <= 1.0:
            raise ValueError("confidence threshold must be in (0, 1]")
        if self.consecutive_windows < 1:
            raise ValueError("consecutive_windows must be >= 1")
        if self.cooldown_s < 0:
            raise ValueError("cooldown must be >= 0")


@dataclass(frozen=True)
class InteractionEvent:
    """One discrete output of the session: type, stream timestamp, payload."""

    type: str  # gesture-detected | cursor-moved | emotion-highlighted | track-selected | mode-changed
    t: float
    data: dict

    def to_record(self) -> dict:
        return {"type": self.type, "t": self.t, **self.data}


def map_to_unit(latent: np.ndarray, bounds: np.ndarray) -> np.ndarray:
    """Min-max map through calibration bounds, clamped to the unit square.
    A degenerate axis (min == max) maps to 0.5."""
    lo, hi = bounds[0], bounds[1]
    out = np.empty(2)
    for axis in range(2):
        span = hi[axis] - lo[axis]
        if span == 0:
            out[axis] = 0.5
        else:
            out[axis] = np.clip((latent[axis] - lo[axis]) / span, 0.0, 1.0)
    return out


class Session:
    """Single-hand interactive session; frames must arrive in stream order."""

    def __init__(self, checkpoint: Checkpoint, space: MusicSpace,
                 config: EngineConfig | None = None) -> None:
        self.checkpoint = checkpoint
        self.space = space
        self.config = config or EngineConfig()
        self.n_frames = checkpoint.autoencoder.n_frames
        self.calibration: Optional[np.ndarray] = (
            None if checkpoint.calibration is None
            else np.asarray(checkpoint.calibration, dtype=np.float64))
        self.mode = IDLE
        self.buffer: deque[CanonicalPose] = deque(maxlen=self.n_frames)
        self._candidate: Optional[int] = None
        self._agreement = 0
        self._latched: Optional[int] = None
        self._last_trigger_t: Optional[float] = None
        self._last_emotion: Optional[int] = None
        self.cursor: Optional[Cursor] = None
        self.dropped_frames = 0

    def reset(self) -> None:
        """Back to IDLE with an empty buffer; calibration is retained."""
        self.mode = IDLE
        self.buffer.clear()
        self._candidate = None
        self._agreement = 0
        self._latched = None
        self._last_trigger_t = None
        self._last_emotion = None
        self.cursor = None

    def calibrate(self, latents: np.ndarray) -> np.ndarray:
        """Set pose-space bounds from a set of (typically training) latents."""
        latents = np.asarray(latents, dtype=np.float64)
        if latents.ndim != 2 or latents.shape[1] != 2 or latents.shape[0] < 2:
            raise TooFewPoints("calibration needs >= 2 latent points of dim 2")
        self.calibration = np.stack([latents.min(axis=0), latents.max(axis=0)])
        return self.calibration

    def _window_latent(self) -> tuple[np.ndarray, np.ndarray]:
        """Encode the current window; returns (cursor latent, logits)."""
        ae = self.checkpoint.autoencoder
        clf = self.checkpoint.classifier
        vec = window_vector(list(self.buffer), self.n_frames, ae.mode)
        if ae.mode == "concat":
            z = encode(ae, vec)
            return z, classify(clf, z)
        z_pts = encode(ae, vec)
        return z_pts.mean(axis=0), classify(clf, z_pts)

    def push_frame(self, frame: LandmarkFrame) -> list[InteractionEvent]:
        try:
            pose = canonicalize(frame)
        except DegenerateHand as exc:
            self.dropped_frames += 1
            log.debug("dropped degenerate frame at t=%.3f: %s", frame.timestamp, exc)
            return []
        self.buffer.append(pose)
        if len(self.buffer) < self.n_frames:
            return []
        t = frame.timestamp
        events: list[InteractionEvent] = []

        latent, logits = self._window_latent()
        probs = softmax(logits)
        cls = int(np.argmax(probs)) + 1
        confidence = float(probs[cls - 1])

        if cls != self._candidate or confidence < self.config.confidence_threshold:
            self._candidate = cls if confidence >= self.config.confidence_threshold else None
            self._agreement = 1 if self._candidate is not None else 0
        else:
            self._agreement += 1
        if self._latched is not None and cls != self._latched:
            # A held gesture fires once; the latch clears when the argmax moves on.
            self._latched = None

        cursor = None
        if self.calibration is not None:
            music_xy = map_to_unit(latent, self.calibration)
            cursor = Cursor(pose_xy=latent.copy(), music_xy=music_xy)
            self.cursor = cursor

        if (self._candidate is not None
                and self._agreement >= self.config.consecutive_windows
                and GestureClass(cls) in DISCRETE_CLASSES
                and self._latched != cls
                and (self._last_trigger_t is None
                     or t - self._last_trigger_t >= self.config.cooldown_s)):
            events.extend(self._fire_trigger(GestureClass(cls), confidence, t, cursor))
            self._last_trigger_t = t
            self._latched = cls
            self._agreement = 0
            self._candidate = None

        if self.mode == EXPLORING and cursor is not None:
            events.append(InteractionEvent("cursor-moved", t, {
                "pose_xy": [float(v) for v in cursor.pose_xy],
                "music_xy": [float(v) for v in cursor.music_xy]}))
            if self.space.centers:
                emotion, _ = nearest_emotion(self.space, cursor)
                if emotion != self._last_emotion:
                    self._last_emotion = emotion
                    events.append(InteractionEvent("emotion-highlighted", t,
                                                   {"emotion": EMOTIONS[emotion]}))
        return events

    def _fire_trigger(self, cls: GestureClass, confidence: float, t: float,
                      cursor: Optional[Cursor]) -> list[InteractionEvent]:
        events = [InteractionEvent("gesture-detected", t,
                                   {"class": cls.name.lower(), "confidence": confidence})]
        if cls is GestureClass.PINCH:
            self.mode = EXPLORING if self.mode == IDLE else IDLE
            if self.mode == IDLE:
                self._last_emotion = None
            events.append(InteractionEvent("mode-changed", t, {"mode": self.mode}))
        elif cls is GestureClass.DOUBLE_PINCH and self.mode == EXPLORING:
            target = cursor or self.cursor
            if target is not None and self.space.track_ids:
                track_id, dist = nearest_track(self.space, target)
                events.append(InteractionEvent("track-selected", t,
                                               {"track_id": track_id, "distance": dist}))
        # Circle triggers carry no bound action yet.
        return events
