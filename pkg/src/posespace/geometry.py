"""Hand-landmark frames and palm-frame canonicalization.

A raw frame carries 21 ordered 3D landmarks in image-relative units. The
canonical pose re-expresses every landmark in the palm's own coordinate
frame so the downstream embedding is invariant to hand position, hand size,
and camera distance: translate by the wrist, de-rotate by the palm basis
quaternion, and divide by the wrist-to-middle-MCP distance.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import DegenerateHand, ParseError, WrongWindowLength

NUM_LANDMARKS = 21
POSE_DIM = NUM_LANDMARKS * 3

# Standard hand-landmark index convention.
WRIST = 0
THUMB_TIP = 4
INDEX_MCP = 5
INDEX_TIP = 8
MIDDLE_MCP = 9
PINKY_MCP = 17

AREA_EPS = 1e-9
SCALE_EPS = 1e-6

WINDOW_SIZES = (1, 2, 8)


@dataclass(frozen=True)
class LandmarkFrame:
    """One timestamped set of 21 ordered 3D hand landmarks."""

    timestamp: float
    points: np.ndarray  # (21, 3) float64
    source_id: str = ""

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.shape != (NUM_LANDMARKS, 3):
            raise ParseError(f"expected {NUM_LANDMARKS}x3 landmarks, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ParseError("non-finite landmark coordinate")
        if not np.isfinite(self.timestamp) or self.timestamp < 0:
            raise ParseError(f"invalid timestamp {self.timestamp!r}")
        object.__setattr__(self, "points", pts)


@dataclass(frozen=True)
class PalmFrame:
    """Palm pose: wrist origin, orientation quaternion (w>=0), palm scale."""

    origin: np.ndarray       # (3,)
    rotation: np.ndarray     # (4,) unit quaternion (w, x, y, z), w >= 0
    palm_scale: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "origin", np.asarray(self.origin, dtype=np.float64))
        q = np.asarray(self.rotation, dtype=np.float64)
        if abs(np.linalg.norm(q) - 1.0) > 1e-9 or q[0] < 0:
            raise ValueError("rotation must be a unit quaternion with w >= 0")
        object.__setattr__(self, "rotation", q)
        if self.palm_scale <= 0:
            raise ValueError("palm_scale must be positive")


@dataclass(frozen=True)
class CanonicalPose:
    """63-component pose vector: wrist at origin, middle MCP at distance 1."""

    values: np.ndarray  # (63,)

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != (POSE_DIM,):
            raise ParseError(f"canonical pose must have {POSE_DIM} components, got {v.shape}")
        object.__setattr__(self, "values", v)

    def landmarks(self) -> np.ndarray:
        return self.values.reshape(NUM_LANDMARKS, 3)


def _quaternion_from_matrix(r: np.ndarray) -> np.ndarray:
    """Rotation matrix -> unit quaternion (w, x, y, z), hemisphere-fixed w >= 0."""
    tr = np.trace(r)
    if tr > 0:
        s = np.sqrt(tr + 1.0) * 2.0
        q = np.array([0.25 * s,
                      (r[2, 1] - r[1, 2]) / s,
                      (r[0, 2] - r[2, 0]) / s,
                      (r[1, 0] - r[0, 1]) / s])
    else:
        i = int(np.argmax(np.diag(r)))
        if i == 0:
            s = np.sqrt(1.0 + r[0, 0] - r[1, 1] - r[2, 2]) * 2.0
            q = np.array([(r[2, 1] - r[1, 2]) / s,
                          0.25 * s,
                          (r[0, 1] + r[1, 0]) / s,
                          (r[0, 2] + r[2, 0]) / s])
        elif i == 1:
            s = np.sqrt(1.0 + r[1, 1] - r[0, 0] - r[2, 2]) * 2.0
            q = np.array([(r[0, 2] - r[2, 0]) / s,
                          (r[0, 1] + r[1, 0]) / s,
                          0.25 * s,
                          (r[1, 2] + r[2, 1]) / s])
        else:
            s = np.sqrt(1.0 + r[2, 2] - r[0, 0] - r[1, 1]) * 2.0
            q = np.array([(r[1, 0] - r[0, 1]) / s,
                          (r[0, 2] + r[2, 0]) / s,
                          (r[1, 2] + r[2, 1]) / s,
                          0.25 * s])
    q /= np.linalg.norm(q)
    if q[0] < 0:
        q = -q
    return q


def _palm_basis(frame: LandmarkFrame) -> tuple[np.ndarray, float]:
    """Orthonormal palm basis (columns u, v, n) and palm scale."""
    pts = frame.points
    wrist = pts[WRIST]
    a = pts[INDEX_MCP] - wrist
    b = pts[PINKY_MCP] - wrist
    area = 0.5 * np.linalg.norm(np.cross(a, b))
    if area <= AREA_EPS:
        raise DegenerateHand(f"collinear palm landmarks (triangle area {area:.3e})")
    scale = float(np.linalg.norm(pts[MIDDLE_MCP] - wrist))
    if scale < SCALE_EPS:
        raise DegenerateHand(f"collapsed palm (scale {scale:.3e})")
    u = a / np.linalg.norm(a)
    n = np.cross(u, b)
    n /= np.linalg.norm(n)
    v = np.cross(n, u)
    return np.column_stack([u, v, n]), scale


def palm_frame(frame: LandmarkFrame) -> PalmFrame:
    """Extract the palm pose (origin, quaternion, scale) from one frame.

    The basis is built from three rigid, widely separated landmarks:
    u = wrist->index-MCP, n = u x (wrist->pinky-MCP), v = n x u.
    """
    basis, scale = _palm_basis(frame)
    return PalmFrame(origin=frame.points[WRIST].copy(),
                     rotation=_quaternion_from_matrix(basis),
                     palm_scale=scale)


def canonicalize(frame: LandmarkFrame) -> CanonicalPose:
    """Map every landmark p to R^-1 (p - wrist) / palm_scale."""
    basis, scale = _palm_basis(frame)
    wrist = frame.points[WRIST]
    local = (frame.points - wrist) @ basis / scale
    return CanonicalPose(values=local.reshape(-1))


def window_vector(poses: Sequence[CanonicalPose], n: int, mode: str = "concat") -> np.ndarray:
    """Stack N canonical poses into one inference input, oldest first.

    concat mode returns a flat 63*N vector; point-set mode an (N, 63) array.
    """
    if n not in WINDOW_SIZES:
        raise WrongWindowLength(f"window size must be one of {WINDOW_SIZES}, got {n}")
    if len(poses) != n:
        raise WrongWindowLength(f"expected {n} poses, got {len(poses)}")
    stacked = np.stack([p.values for p in poses])
    if mode == "concat":
        return stacked.reshape(-1)
    if mode == "point-set":
        return stacked
    raise ValueError(f"unknown window mode {mode!r}")


# ---------------------------------------------------------------------------
# Landmark stream format: one JSON record per line, fields "t", "hand", "source".

def frame_to_record(frame: LandmarkFrame) -> dict:
    return {"t": frame.timestamp, "hand": frame.points.tolist(), "source": frame.source_id}


def frame_from_record(record: dict) -> LandmarkFrame:
    try:
        return LandmarkFrame(timestamp=float(record["t"]),
                             points=np.asarray(record["hand"], dtype=np.float64),
                             source_id=str(record.get("source", "")))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad landmark record: {exc}") from exc


def format_stream_line(frame: LandmarkFrame) -> str:
    return json.dumps(frame_to_record(frame))


def parse_stream_line(line: str, lineno: int | None = None) -> LandmarkFrame:
    where = f" (line {lineno})" if lineno is not None else ""
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON{where}: {exc}") from exc
    try:
        return frame_from_record(record)
    except ParseError as exc:
        raise ParseError(f"{exc}{where}") from exc


def read_stream(lines: Iterable[str]) -> Iterator[LandmarkFrame]:
    for i, line in enumerate(lines, start=1):
        line = line.strip()
        if line:
            yield parse_stream_line(line, lineno=i)
