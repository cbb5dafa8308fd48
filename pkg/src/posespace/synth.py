"""Deterministic synthetic gesture clips and track catalogs.

The real gesture recordings and the commercial track catalog are not
available, so tests and desk-scale experiments run on generated data whose
ground truth is known by construction. Each gesture class animates a base
21-landmark hand template:

  arm open/close   wrist drifts along a depth trajectory with shrinking /
                   growing projected scale while the fingers progressively
                   spread / curl (the articulation is what survives
                   canonicalization and keeps the pair separable);
  circle cw/ccw    index fingertip traces a planar circle with signed
                   angular velocity, other fingers curled;
  pinch            thumb-tip <-> index-tip distance closes and reopens once;
  double pinch     twice (so per-window articulation speed is doubled).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import TooFew
from .geometry import INDEX_TIP, NUM_LANDMARKS, LandmarkFrame
from .musicspace import EMOTIONS, NUM_GENRES, NUM_STYLES, TrackProfile
from .nets import GestureClass

FPS = 30.0


@dataclass(frozen=True)
class SynthParams:
    seed: int = 0
    frames_per_clip: int = 45          # 1.5 s at 30 fps
    jitter_sigma: float = 0.003        # image-relative Gaussian noise
    hand_scale_range: tuple[float, float] = (0.7, 1.3)
    offset_range: float = 0.15         # max |start offset| per axis
    depth_scale_range: tuple[float, float] = (0.8, 1.2)

    def __post_init__(self) -> None:
        if self.jitter_sigma < 0:
            raise ValueError("jitter sigma must be >= 0")
        if self.frames_per_clip < 2:
            raise ValueError("need at least 2 frames per clip")
        for lo, hi in (self.hand_scale_range, self.depth_scale_range):
            if not lo <= hi:
                raise ValueError("empty parameter range")


@dataclass
class LabeledClip:
    clip_id: str
    label: GestureClass
    frames: list[LandmarkFrame]


# ---------------------------------------------------------------------------
# Hand template, in palm units (wrist at origin, wrist->middle-MCP = 1).

_MCPS = {
    "index": np.array([-0.30, 0.97, 0.0]),
    "middle": np.array([0.0, 1.0, 0.0]),
    "ring": np.array([0.24, 0.96, 0.0]),
    "pinky": np.array([0.46, 0.85, 0.0]),
}
_SEGMENTS = (0.45, 0.28, 0.20)
_THUMB_CMC = np.array([-0.42, 0.30, 0.05])


def _finger_chain(mcp: np.ndarray, direction: np.ndarray, curl: float) -> list[np.ndarray]:
    """Three joints from an MCP; curl in [0, 1] bends each segment toward the palm."""
    pts = []
    p = mcp.copy()
    d = direction / np.linalg.norm(direction)
    bend = curl * np.deg2rad(65.0)
    for seg in _SEGMENTS:
        # Rotate the running direction about the palm's x-axis (toward camera).
        c, s = np.cos(bend), np.sin(bend)
        d = np.array([d[0], c * d[1] - s * d[2], s * d[1] + c * d[2]])
        d = d / np.linalg.norm(d)
        p = p + seg * d
        pts.append(p.copy())
    return pts


def _hand_template(curl: dict[str, float], spread: float,
                   thumb_tip: np.ndarray | None = None,
                   index_tip: np.ndarray | None = None) -> np.ndarray:
    """21 landmarks in palm units. spread scales the MCP fan-out directions;
    explicit thumb/index tips override the chain (joints interpolate)."""
    pts = np.zeros((NUM_LANDMARKS, 3))
    # Thumb: 1..4
    thumb_dir = np.array([-0.75 - 0.2 * spread, 0.65, 0.12])
    chain = _finger_chain(_THUMB_CMC, thumb_dir, curl.get("thumb", 0.0))
    pts[1] = _THUMB_CMC
    pts[2], pts[3], pts[4] = chain
    for base, name in ((5, "index"), (9, "middle"), (13, "ring"), (17, "pinky")):
        mcp = _MCPS[name]
        direction = np.array([mcp[0] * (0.4 + 0.9 * spread), 1.0, 0.0])
        pts[base] = mcp
        chain = _finger_chain(mcp, direction, curl.get(name, 0.0))
        pts[base + 1], pts[base + 2], pts[base + 3] = chain
    if thumb_tip is not None:
        pts[4] = thumb_tip
        pts[2] = _THUMB_CMC + (thumb_tip - _THUMB_CMC) / 3.0
        pts[3] = _THUMB_CMC + 2.0 * (thumb_tip - _THUMB_CMC) / 3.0
    if index_tip is not None:
        mcp = _MCPS["index"]
        pts[INDEX_TIP] = index_tip
        pts[6] = mcp + (index_tip - mcp) / 3.0
        pts[7] = mcp + 2.0 * (index_tip - mcp) / 3.0
    return pts


_CURLED = {"index": 0.85, "middle": 0.9, "ring": 0.9, "pinky": 0.85, "thumb": 0.5}

_CIRCLE_CENTER = np.array([-0.35, 1.55, 0.1])
_CIRCLE_RADIUS = 0.55
_CIRCLE_TURNS = 2.0
_PINCH_THUMB_OPEN = np.array([-1.25, 0.95, 0.25])
_PINCH_INDEX_OPEN = np.array([-0.25, 1.95, 0.0])


def _pose_for(cls: GestureClass, s: float) -> np.ndarray:
    """Template landmarks for phase s in [0, 1], in palm units."""
    if cls is GestureClass.CONTINUOUS_ARM_OPEN or cls is GestureClass.CONTINUOUS_ARM_CLOSE:
        opening = s if cls is GestureClass.CONTINUOUS_ARM_OPEN else 1.0 - s
        # Fingers lag behind the arm motion, so at equal spread an opening
        # hand is slightly more curled than a closing one.
        lag = 0.1 if cls is GestureClass.CONTINUOUS_ARM_OPEN else -0.1
        curl_amt = float(np.clip(0.9 * (1.0 - opening) + lag, 0.0, 1.0))
        curl = {k: curl_amt for k in ("index", "middle", "ring", "pinky")}
        curl["thumb"] = 0.5 * (1.0 - opening)
        return _hand_template(curl, spread=opening)
    if cls is GestureClass.CIRCLE_CLOCKWISE or cls is GestureClass.CIRCLE_COUNTERCLOCKWISE:
        sign = -1.0 if cls is GestureClass.CIRCLE_CLOCKWISE else 1.0
        theta = sign * 2.0 * np.pi * _CIRCLE_TURNS * s
        tip = _CIRCLE_CENTER + _CIRCLE_RADIUS * np.array([np.cos(theta), np.sin(theta), 0.0])
        return _hand_template(dict(_CURLED, index=0.0), spread=0.3, index_tip=tip)
    # Pinch family: tips converge toward their midpoint; closure profile has
    # one (pinch) or two (double pinch) full cycles across the clip. The
    # double pinch is shallower and keeps the free fingers half-open.
    if cls is GestureClass.PINCH:
        closure = 0.95 * np.sin(np.pi * s) ** 2
        rest = dict(_CURLED, index=0.0, thumb=0.0)
    else:
        closure = 0.78 * np.sin(2.0 * np.pi * s) ** 2
        rest = dict(_CURLED, index=0.0, thumb=0.0, ring=0.45, pinky=0.4, middle=0.5)
    mid = 0.5 * (_PINCH_THUMB_OPEN + _PINCH_INDEX_OPEN)
    thumb = _PINCH_THUMB_OPEN + closure * (mid - _PINCH_THUMB_OPEN)
    index = _PINCH_INDEX_OPEN + closure * (mid - _PINCH_INDEX_OPEN)
    return _hand_template(rest, spread=0.3, thumb_tip=thumb, index_tip=index)


def synth_gesture(cls: GestureClass, params: SynthParams, rng: np.random.Generator,
                  clip_id: str = "clip-0") -> LabeledClip:
    """Generate one labeled clip with per-clip random placement and noise."""
    scale = 0.22 * rng.uniform(*params.hand_scale_range)
    offset = np.array([0.5 + rng.uniform(-params.offset_range, params.offset_range),
                       0.55 + rng.uniform(-params.offset_range, params.offset_range),
                       rng.uniform(-0.05, 0.05)])
    depth_scale = rng.uniform(*params.depth_scale_range)
    arm = cls in (GestureClass.CONTINUOUS_ARM_OPEN, GestureClass.CONTINUOUS_ARM_CLOSE)
    frames = []
    t_total = params.frames_per_clip
    for i in range(t_total):
        s = i / (t_total - 1)
        pts = _pose_for(cls, s)
        frame_scale = scale
        frame_offset = offset.copy()
        if arm:
            # Moving away from (open) or toward (close) the camera: projected
            # scale shrinks/grows and depth drifts.
            away = s if cls is GestureClass.CONTINUOUS_ARM_OPEN else 1.0 - s
            frame_scale = scale * (1.0 - 0.25 * away)
            frame_offset[2] += 0.4 * away
        world = pts * frame_scale
        world[:, 2] *= depth_scale
        world = world + frame_offset
        if params.jitter_sigma > 0:
            world = world + rng.normal(0.0, params.jitter_sigma, size=world.shape)
        frames.append(LandmarkFrame(timestamp=i / FPS, points=world,
                                    source_id=f"synth/{clip_id}"))
    return LabeledClip(clip_id=clip_id, label=cls, frames=frames)


def synth_dataset(clips_per_class: int, params: SynthParams) -> list[LabeledClip]:
    """clips_per_class clips for each of the 6 classes, seeded from params."""
    rng = np.random.default_rng(params.seed)
    clips = []
    for cls in GestureClass:
        for k in range(clips_per_class):
            cid = f"{cls.name.lower()}-{k:03d}"
            clips.append(synth_gesture(cls, params, rng, clip_id=cid))
    return clips


# ---------------------------------------------------------------------------
# Track catalog with planted emotion clusters.

@dataclass
class PlantedCatalog:
    tracks: list[TrackProfile]
    planted_labels: list[int]  # dominant-emotion index per track, by construction

    def planted_means(self, unit_coords: np.ndarray) -> dict[int, np.ndarray]:
        """Mean unit-square coordinate per planted emotion label."""
        out = {}
        labels = np.asarray(self.planted_labels)
        for e in range(len(EMOTIONS)):
            mask = labels == e
            if mask.any():
                out[e] = unit_coords[mask].mean(axis=0)
        return out


def synth_catalog(n: int, rng: np.random.Generator) -> PlantedCatalog:
    """n tracks assigned round-robin to the 6 emotions; the planted emotion's
    score is drawn in [0.6, 1.0], all others in [0, 0.4]."""
    if n < len(EMOTIONS):
        raise TooFew(f"need at least {len(EMOTIONS)} tracks, got {n}")
    tracks = []
    labels = []
    for i in range(n):
        e = i % len(EMOTIONS)
        emotions = rng.uniform(0.0, 0.4, size=len(EMOTIONS))
        emotions[e] = rng.uniform(0.6, 1.0)
        tracks.append(TrackProfile(
            track_id=f"trk-{i:05d}",
            title=f"Synthetic Track {i}",
            emotions=emotions,
            genres=rng.uniform(0.0, 1.0, size=NUM_GENRES),
            styles=rng.uniform(0.0, 1.0, size=NUM_STYLES)))
        labels.append(e)
    return PlantedCatalog(tracks=tracks, planted_labels=labels)
