"""Newline-delimited JSON message protocol between the service and clients.

Client -> server:
  {"type": "frame", "t": ..., "hand": [[x,y,z] x21], "source": ...}
  {"type": "command", "name": "reset"}
  {"type": "command", "name": "calibrate", "latents": [[x,y], ...]}
  {"type": "command", "name": "set-config", "confidence_threshold": ...,
   "consecutive_windows": ..., "cooldown_s": ...}
Messages may carry "v" (protocol version); a mismatch is fatal.

Server -> client:
  {"type": "state-snapshot", ...}    always the first message
  {"type": "event", "event": {...}}  one per interaction event, in order
  {"type": "error", "code": ..., "message": ...}
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .engine import InteractionEvent
from .errors import ParseError, ProtocolError
from .geometry import LandmarkFrame, frame_from_record
from .musicspace import EMOTIONS, MusicSpace

PROTOCOL_VERSION = 1
SNAPSHOT_TRACK_LIMIT = 2000

CLIENT_TYPES = ("frame", "command")
COMMANDS = ("reset", "calibrate", "set-config")


def parse_client_message(line: str) -> dict[str, Any]:
    """Parse and validate one client line; raises ProtocolError when malformed
    and ProtocolError with code version-mismatch when the version is wrong."""
    try:
        msg = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"invalid JSON: {exc}") from exc
    if not isinstance(msg, dict):
        raise ProtocolError("message must be a JSON object")
    version = msg.get("v", PROTOCOL_VERSION)
    if version != PROTOCOL_VERSION:
        raise VersionMismatch(f"protocol version {version} != {PROTOCOL_VERSION}")
    mtype = msg.get("type")
    if mtype not in CLIENT_TYPES:
        raise ProtocolError(f"unknown message type {mtype!r}")
    if mtype == "command" and msg.get("name") not in COMMANDS:
        raise ProtocolError(f"unknown command {msg.get('name')!r}")
    return msg


class VersionMismatch(ProtocolError):
    """Client speaks a different protocol version; the connection must close."""


def frame_from_message(msg: dict[str, Any]) -> LandmarkFrame:
    try:
        return frame_from_record(msg)
    except ParseError as exc:
        raise ProtocolError(str(exc)) from exc


def serialize(msg: dict[str, Any]) -> str:
    return json.dumps(msg) + "\n"


def event_message(event: InteractionEvent) -> dict[str, Any]:
    return {"type": "event", "event": event.to_record()}


def error_message(code: str, message: str) -> dict[str, Any]:
    return {"type": "error", "code": code, "message": message}


def snapshot_message(space: MusicSpace, calibration: np.ndarray | None,
                     mode: str, n_frames: int) -> dict[str, Any]:
    """Full space geometry for the initial render. Very large catalogs are
    subsampled to a deterministic, evenly spaced 2000 tracks for display."""
    n = len(space.track_ids)
    if n > SNAPSHOT_TRACK_LIMIT:
        idx = np.linspace(0, n - 1, SNAPSHOT_TRACK_LIMIT).round().astype(int)
    else:
        idx = np.arange(n)
    from .musicspace import emotion_color
    tracks = [{"id": space.track_ids[i],
               "xy": space.unit_coords[i].tolist(),
               "emotion": EMOTIONS[int(space.dominant[i])],
               "color": emotion_color(int(space.dominant[i]), float(space.dominant_value[i]))}
              for i in idx]
    return {
        "type": "state-snapshot",
        "protocol": PROTOCOL_VERSION,
        "mode": mode,
        "frames_per_window": n_frames,
        "tracks": tracks,
        "centers": {EMOTIONS[e]: c.tolist() for e, c in sorted(space.centers.items())},
        "calibration": None if calibration is None else np.asarray(calibration).tolist(),
    }
