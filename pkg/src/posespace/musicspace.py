"""2D music space: embed 34-feature track profiles, cluster centers, queries.

Tracks carry 6 emotion + 14 genre + 14 style scores in [0, 1]. A 2D
embedding (built-in PCA or an imported file) is min-max rescaled to the
unit square; per-emotion cluster centers are the means of the tracks whose
dominant emotion is that emotion. Live cursors are matched to the nearest
center / track by exhaustive Euclidean scan.
"""

from __future__ import annotations

import colorsys
import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (DuplicateTrack, EmptySpace, MissingTrack, NoCenters, ParseError,
                     RangeError, TooFewTracks)

EMOTIONS = ("sadness", "joy", "fear", "erotic", "anger", "tenderness")
NUM_GENRES = 14
NUM_STYLES = 14
NUM_FEATURES = len(EMOTIONS) + NUM_GENRES + NUM_STYLES  # 34

SPACE_FORMAT = "posespace-space-v1"

# Fixed hue per emotion (degrees); lightness encodes the emotional value.
_EMOTION_HUES = {
    "sadness": 215.0,
    "joy": 48.0,
    "fear": 275.0,
    "erotic": 330.0,
    "anger": 5.0,
    "tenderness": 130.0,
}


@dataclass(frozen=True)
class TrackProfile:
    track_id: str
    title: str
    emotions: np.ndarray  # (6,) in [0, 1], EMOTIONS order
    genres: np.ndarray    # (14,) in [0, 1]
    styles: np.ndarray    # (14,) in [0, 1]

    def __post_init__(self) -> None:
        for name, arr, want in (("emotions", self.emotions, len(EMOTIONS)),
                                ("genres", self.genres, NUM_GENRES),
                                ("styles", self.styles, NUM_STYLES)):
            a = np.asarray(arr, dtype=np.float64)
            if a.shape != (want,):
                raise ParseError(f"track {self.track_id}: {name} must have {want} values")
            if np.any(a < 0) or np.any(a > 1) or not np.all(np.isfinite(a)):
                raise RangeError(f"track {self.track_id}: {name} outside [0, 1]")
            object.__setattr__(self, name, a)

    @property
    def features(self) -> np.ndarray:
        return np.concatenate([self.emotions, self.genres, self.styles])

    @property
    def dominant_emotion(self) -> int:
        """argmax over emotion scores; ties resolve to the lowest index."""
        return int(np.argmax(self.emotions))


@dataclass(frozen=True)
class Cursor:
    pose_xy: np.ndarray   # raw pose-space coordinate
    music_xy: np.ndarray  # image in the unit square (clamped)

    def __post_init__(self) -> None:
        object.__setattr__(self, "pose_xy", np.asarray(self.pose_xy, dtype=np.float64))
        object.__setattr__(self, "music_xy", np.asarray(self.music_xy, dtype=np.float64))


@dataclass
class MusicSpace:
    track_ids: list[str]
    titles: list[str]
    unit_coords: np.ndarray          # (n, 2) in [0, 1]^2
    dominant: np.ndarray             # (n,) emotion index per track
    dominant_value: np.ndarray       # (n,) score of the dominant emotion
    centers: dict[int, np.ndarray]   # emotion index -> (2,) unit coords
    axis_min: np.ndarray             # (2,) raw-coordinate transform
    axis_max: np.ndarray
    embedding_source: str            # "pca" | "imported"


# ---------------------------------------------------------------------------
# Catalog I/O: delimited text with a header row.

CATALOG_COLUMNS = (["track_id", "title"]
                   + [f"emo_{e}" for e in EMOTIONS]
                   + [f"genre_{i:02d}" for i in range(NUM_GENRES)]
                   + [f"style_{i:02d}" for i in range(NUM_STYLES)])


def load_catalog(source: str | Path | Iterable[str]) -> list[TrackProfile]:
    """Parse a catalog file (or iterable of lines) into validated profiles."""
    if isinstance(source, (str, Path)):
        with open(source, newline="") as fh:
            return load_catalog(list(fh))
    reader = csv.reader(source)
    rows = list(reader)
    if not rows:
        raise ParseError("empty catalog")
    header = [c.strip() for c in rows[0]]
    if header != CATALOG_COLUMNS:
        raise ParseError(f"bad catalog header: {header[:4]}...")
    profiles = []
    for i, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(CATALOG_COLUMNS):
            raise ParseError(f"row {i}: expected {len(CATALOG_COLUMNS)} columns, got {len(row)}")
        try:
            vals = np.asarray([float(v) for v in row[2:]], dtype=np.float64)
        except ValueError as exc:
            raise ParseError(f"row {i}: {exc}") from exc
        if np.any(vals < 0) or np.any(vals > 1):
            raise RangeError(f"row {i}: feature outside [0, 1]")
        profiles.append(TrackProfile(track_id=row[0], title=row[1],
                                     emotions=vals[:6], genres=vals[6:20], styles=vals[20:]))
    return profiles


def save_catalog(path: str | Path, profiles: Sequence[TrackProfile]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CATALOG_COLUMNS)
        for p in profiles:
            writer.writerow([p.track_id, p.title]
                            + [repr(float(v)) for v in p.features])


# ---------------------------------------------------------------------------
# Embedding.

def pca2(profiles: Sequence[TrackProfile]) -> np.ndarray:
    """Mean-centered projection onto the top-2 covariance eigenvectors.

    Sign convention: each eigenvector is flipped so its largest-magnitude
    component is positive, making the projection deterministic.
    """
    if len(profiles) < 3:
        raise TooFewTracks(f"PCA needs >= 3 tracks, got {len(profiles)}")
    x = np.stack([p.features for p in profiles])
    x = x - x.mean(axis=0)
    cov = x.T @ x / x.shape[0]
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(evals)[::-1][:2]
    basis = evecs[:, order]
    for j in range(basis.shape[1]):
        k = int(np.argmax(np.abs(basis[:, j])))
        if basis[k, j] < 0:
            basis[:, j] = -basis[:, j]
    return x @ basis


def import_embedding(source: str | Path | Iterable[str],
                     profiles: Sequence[TrackProfile]) -> np.ndarray:
    """Adopt precomputed 2D coordinates; every catalog id must appear once."""
    if isinstance(source, (str, Path)):
        with open(source, newline="") as fh:
            return import_embedding(list(fh), profiles)
    coords: dict[str, np.ndarray] = {}
    reader = csv.reader(source)
    rows = list(reader)
    start = 0
    if rows and rows[0] and rows[0][0].strip() == "track_id":
        start = 1
    for i, row in enumerate(rows[start:], start=start + 1):
        if not row:
            continue
        if len(row) != 3:
            raise ParseError(f"row {i}: expected track_id,x,y")
        tid = row[0]
        if tid in coords:
            raise DuplicateTrack(f"track {tid} appears twice (row {i})")
        try:
            coords[tid] = np.array([float(row[1]), float(row[2])])
        except ValueError as exc:
            raise ParseError(f"row {i}: {exc}") from exc
    out = np.zeros((len(profiles), 2))
    for j, p in enumerate(profiles):
        if p.track_id not in coords:
            raise MissingTrack(f"embedding missing track {p.track_id}")
        out[j] = coords[p.track_id]
    return out


def unit_rescale(coords: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-axis min-max map to [0, 1]; a degenerate axis maps to 0.5."""
    lo = coords.min(axis=0)
    hi = coords.max(axis=0)
    span = hi - lo
    unit = np.empty_like(coords, dtype=np.float64)
    for axis in range(coords.shape[1]):
        if span[axis] == 0:
            unit[:, axis] = 0.5
        else:
            unit[:, axis] = (coords[:, axis] - lo[axis]) / span[axis]
    return unit, lo, hi


def build_space(coords: np.ndarray, profiles: Sequence[TrackProfile],
                embedding_source: str = "pca") -> MusicSpace:
    """Rescale raw coordinates to the unit square and compute emotion centers."""
    coords = np.asarray(coords, dtype=np.float64)
    if coords.shape != (len(profiles), 2):
        raise ParseError(f"coords shape {coords.shape} vs {len(profiles)} profiles")
    unit, lo, hi = unit_rescale(coords)
    dominant = np.array([p.dominant_emotion for p in profiles], dtype=np.int64)
    centers = {}
    for e in range(len(EMOTIONS)):
        mask = dominant == e
        if mask.any():
            centers[e] = unit[mask].mean(axis=0)
    return MusicSpace(
        track_ids=[p.track_id for p in profiles],
        titles=[p.title for p in profiles],
        unit_coords=unit,
        dominant=dominant,
        dominant_value=np.array([p.emotions[p.dominant_emotion] for p in profiles]),
        centers=centers,
        axis_min=lo, axis_max=hi,
        embedding_source=embedding_source)


# ---------------------------------------------------------------------------
# Queries.

def nearest_emotion(space: MusicSpace, cursor: Cursor) -> tuple[int, float]:
    """Nearest emotion center to the cursor; ties -> lowest emotion index."""
    if not space.centers:
        raise NoCenters("music space has no emotion centers")
    best = None
    for e in sorted(space.centers):
        d = float(np.linalg.norm(space.centers[e] - cursor.music_xy))
        if best is None or d < best[1]:
            best = (e, d)
    return best


def nearest_track(space: MusicSpace, cursor: Cursor) -> tuple[str, float]:
    """Nearest track point; ties -> lexicographically smallest track id."""
    n = len(space.track_ids)
    if n == 0:
        raise EmptySpace("music space has no tracks")
    d = np.linalg.norm(space.unit_coords - cursor.music_xy, axis=1)
    dmin = d.min()
    candidates = [space.track_ids[i] for i in np.flatnonzero(d == dmin)]
    return min(candidates), float(dmin)


def emotion_color(emotion: int | str, value: float) -> str:
    """Hex color for an emotion at a given value; higher value -> darker."""
    if isinstance(emotion, str):
        if emotion not in EMOTIONS:
            raise RangeError(f"unknown emotion {emotion!r}")
        name = emotion
    else:
        if not 0 <= emotion < len(EMOTIONS):
            raise RangeError(f"emotion index {emotion} out of range")
        name = EMOTIONS[emotion]
    if not 0.0 <= value <= 1.0 or not np.isfinite(value):
        raise RangeError(f"emotion value {value} outside [0, 1]")
    hue = _EMOTION_HUES[name] / 360.0
    lightness = 0.88 - 0.62 * value
    r, g, b = colorsys.hls_to_rgb(hue, lightness, 0.72)
    return "#{:02x}{:02x}{:02x}".format(round(r * 255), round(g * 255), round(b * 255))


# ---------------------------------------------------------------------------
# Space file: a single JSON document used by serve/replay.

def save_space(path: str | Path, space: MusicSpace) -> None:
    doc = {
        "format": SPACE_FORMAT,
        "source": space.embedding_source,
        "axis_min": space.axis_min.tolist(),
        "axis_max": space.axis_max.tolist(),
        "centers": {EMOTIONS[e]: c.tolist() for e, c in space.centers.items()},
        "tracks": [
            {"id": tid, "title": title, "xy": xy.tolist(),
             "emotion": EMOTIONS[int(dom)], "value": float(val),
             "color": emotion_color(int(dom), float(val))}
            for tid, title, xy, dom, val in zip(
                space.track_ids, space.titles, space.unit_coords,
                space.dominant, space.dominant_value)
        ],
    }
    Path(path).write_text(json.dumps(doc))


def load_space(path: str | Path) -> MusicSpace:
    doc = json.loads(Path(path).read_text())
    if doc.get("format") != SPACE_FORMAT:
        raise ParseError(f"not a {SPACE_FORMAT} file: {doc.get('format')!r}")
    tracks = doc["tracks"]
    return MusicSpace(
        track_ids=[t["id"] for t in tracks],
        titles=[t["title"] for t in tracks],
        unit_coords=np.array([t["xy"] for t in tracks], dtype=np.float64).reshape(len(tracks), 2),
        dominant=np.array([EMOTIONS.index(t["emotion"]) for t in tracks], dtype=np.int64),
        dominant_value=np.array([t["value"] for t in tracks], dtype=np.float64),
        centers={EMOTIONS.index(name): np.asarray(c, dtype=np.float64)
                 for name, c in doc["centers"].items()},
        axis_min=np.asarray(doc["axis_min"], dtype=np.float64),
        axis_max=np.asarray(doc["axis_max"], dtype=np.float64),
        embedding_source=doc["source"])
