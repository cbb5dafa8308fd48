"""Joint optimization loop, dataset windowing, and evaluation metrics.

Windows are stride-1 slices of canonicalized clips and never cross clip
boundaries; the train/test split is by clip id so near-duplicate adjacent
windows cannot leak across the split. Precision is micro-averaged argmax
accuracy; mAP is one-vs-rest average precision from ranked softmax scores,
averaged over classes.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import MissingClass, ParseError, ShapeMismatch, TooFewPoints
from .geometry import POSE_DIM, CanonicalPose, LandmarkFrame, canonicalize, window_vector
from .nets import (NUM_CLASSES, AdamState, Autoencoder, Checkpoint, Classifier,
                   GestureClass, adam_update, classify, encode, joint_loss,
                   parameters, softmax)
from .synth import LabeledClip


@dataclass(frozen=True)
class TrainConfig:
    frames_per_window: int = 2
    mode: str = "concat"
    lam: float = 1.0
    batch_size: int = 64
    epochs: int = 30
    seed: int = 0
    learning_rate: float = 1e-3
    weight_decay: float = 1e-3
    split_fraction: float = 0.82

    def __post_init__(self) -> None:
        if self.frames_per_window not in (1, 2, 8):
            raise ValueError("frames_per_window must be 1, 2 or 8")
        if not 0.0 < self.split_fraction < 1.0:
            raise ValueError("split fraction must be in (0, 1)")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.mode not in ("concat", "point-set"):
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass
class Window:
    frames: list[LandmarkFrame]      # raw frames, for latency timing
    poses: np.ndarray                # (N, 63) canonical poses, oldest first
    label: GestureClass
    clip_id: str


@dataclass
class GestureDataset:
    windows: list[Window]
    n_frames: int

    @property
    def class_counts(self) -> dict[GestureClass, int]:
        counts = {c: 0 for c in GestureClass}
        for w in self.windows:
            counts[w.label] += 1
        return counts

    def inputs(self, mode: str) -> np.ndarray:
        stacked = np.stack([w.poses for w in self.windows])  # (M, N, 63)
        if mode == "concat":
            return stacked.reshape(len(self.windows), -1)
        return stacked

    def labels(self) -> np.ndarray:
        return np.array([int(w.label) for w in self.windows], dtype=np.int64)


def make_windows(clips: Sequence[LabeledClip], n: int) -> GestureDataset:
    """Stride-1 sliding windows within each clip; short clips yield none."""
    windows = []
    for clip in clips:
        poses = [canonicalize(f).values for f in clip.frames]
        for start in range(len(poses) - n + 1):
            windows.append(Window(
                frames=clip.frames[start:start + n],
                poses=np.stack(poses[start:start + n]),
                label=GestureClass(clip.label),
                clip_id=clip.clip_id))
    return GestureDataset(windows=windows, n_frames=n)


def split_by_clip(dataset: GestureDataset, fraction: float,
                  seed: int) -> tuple[GestureDataset, GestureDataset]:
    """Deterministic clip-level split: shuffled per class so every class can
    land in both halves."""
    by_class: dict[GestureClass, list[str]] = {}
    for w in dataset.windows:
        ids = by_class.setdefault(w.label, [])
        if w.clip_id not in ids:
            ids.append(w.clip_id)
    rng = np.random.default_rng(seed)
    train_ids: set[str] = set()
    for cls in sorted(by_class):
        ids = sorted(by_class[cls])
        rng.shuffle(ids)
        k = max(1, int(round(fraction * len(ids))))
        if k == len(ids) and len(ids) > 1:
            k -= 1
        train_ids.update(ids[:k])
    train = [w for w in dataset.windows if w.clip_id in train_ids]
    test = [w for w in dataset.windows if w.clip_id not in train_ids]
    return (GestureDataset(train, dataset.n_frames),
            GestureDataset(test, dataset.n_frames))


@dataclass
class EpochStats:
    epoch: int
    train_loss: float
    train_recon: float
    train_ce: float
    test_precision: float


@dataclass
class TrainResult:
    checkpoint: Checkpoint
    history: list[EpochStats]
    train_set: GestureDataset
    test_set: GestureDataset


def _precision(ae: Autoencoder, clf: Classifier, x: np.ndarray, y: np.ndarray) -> float:
    if len(y) == 0:
        return float("nan")
    logits = _forward_logits(ae, clf, x)
    pred = logits.argmax(axis=1) + 1
    return float(np.mean(pred == y) * 100.0)


def _forward_logits(ae: Autoencoder, clf: Classifier, x: np.ndarray) -> np.ndarray:
    if ae.mode == "concat":
        return classify(clf, encode(ae, x))
    b, n, _ = x.shape
    z = encode(ae, x.reshape(b * n, POSE_DIM)).reshape(b, n, -1)
    return classify(clf, z)


def train_joint(dataset: GestureDataset, config: TrainConfig) -> TrainResult:
    """Train autoencoder + classifier jointly; deterministic under the seed."""
    if not dataset.windows:
        raise MissingClass("empty dataset")
    if dataset.n_frames != config.frames_per_window:
        raise ShapeMismatch(f"dataset has N={dataset.n_frames}, config wants "
                            f"{config.frames_per_window}")
    train_set, test_set = split_by_clip(dataset, config.split_fraction, config.seed)
    present = {w.label for w in train_set.windows}
    missing = [c.name for c in GestureClass if c not in present]
    if missing:
        raise MissingClass(f"classes absent from training split: {missing}")

    rng = np.random.default_rng(config.seed)
    ae = Autoencoder.create(config.frames_per_window, config.mode, rng)
    clf = Classifier.create(config.mode, rng)
    params = parameters(ae, clf)
    state = AdamState.create(params, learning_rate=config.learning_rate,
                             weight_decay=config.weight_decay)

    x_train = train_set.inputs(config.mode)
    y_train = train_set.labels()
    x_test = test_set.inputs(config.mode) if test_set.windows else None
    y_test = test_set.labels()

    history = []
    m = len(y_train)
    for epoch in range(config.epochs):
        order = rng.permutation(m)
        losses, recons, ces, weights = [], [], [], []
        for start in range(0, m, config.batch_size):
            idx = order[start:start + config.batch_size]
            result = joint_loss(ae, clf, x_train[idx], y_train[idx], config.lam)
            adam_update(params, result.grads, state)
            losses.append(result.loss)
            recons.append(result.recon)
            ces.append(result.cross_entropy)
            weights.append(len(idx))
        w = np.asarray(weights, dtype=np.float64)
        test_prec = (_precision(ae, clf, x_test, y_test)
                     if x_test is not None else float("nan"))
        history.append(EpochStats(
            epoch=epoch,
            train_loss=float(np.average(losses, weights=w)),
            train_recon=float(np.average(recons, weights=w)),
            train_ce=float(np.average(ces, weights=w)),
            test_precision=test_prec))

    latents = _train_latents(ae, x_train)
    calibration = np.stack([latents.min(axis=0), latents.max(axis=0)])
    ckpt = Checkpoint(autoencoder=ae, classifier=clf, lam=config.lam,
                      seed=config.seed, calibration=calibration)
    return TrainResult(checkpoint=ckpt, history=history,
                       train_set=train_set, test_set=test_set)


def _train_latents(ae: Autoencoder, x: np.ndarray) -> np.ndarray:
    if ae.mode == "concat":
        return encode(ae, x)
    b, n, _ = x.shape
    return encode(ae, x.reshape(b * n, POSE_DIM)).reshape(b, n, -1).mean(axis=1)


# ---------------------------------------------------------------------------
# Metrics.

def average_precision(scores: np.ndarray, positives: np.ndarray) -> float:
    """AP of a ranked list: mean of precision@k over positive items.

    Sort is by descending score with index as the deterministic tie-break.
    """
    scores = np.asarray(scores, dtype=np.float64)
    positives = np.asarray(positives, dtype=bool)
    if not positives.any():
        return float("nan")
    order = np.lexsort((np.arange(len(scores)), -scores))
    hits = positives[order]
    cum = np.cumsum(hits)
    ranks = np.arange(1, len(scores) + 1)
    return float(np.mean(cum[hits] / ranks[hits]))


def mean_average_precision(score_matrix: np.ndarray, labels: np.ndarray) -> float:
    """One-vs-rest AP averaged over the classes present in the labels."""
    aps = []
    for cls in range(1, NUM_CLASSES + 1):
        positives = labels == cls
        if positives.any():
            aps.append(average_precision(score_matrix[:, cls - 1], positives))
    return float(np.mean(aps))


def silhouette(points: np.ndarray, labels: np.ndarray) -> float:
    """Mean silhouette score with Euclidean distance."""
    points = np.asarray(points, dtype=np.float64)
    labels = np.asarray(labels)
    classes = np.unique(labels)
    if len(classes) < 2:
        raise TooFewPoints("silhouette needs at least 2 classes")
    for c in classes:
        if np.sum(labels == c) < 2:
            raise TooFewPoints(f"class {c} has fewer than 2 points")
    d = np.linalg.norm(points[:, None, :] - points[None, :, :], axis=2)
    n = len(points)
    s = np.empty(n)
    masks = {c: labels == c for c in classes}
    for i in range(n):
        own = masks[labels[i]].copy()
        own[i] = False
        a = d[i, own].mean()
        b = min(d[i, masks[c]].mean() for c in classes if c != labels[i])
        s[i] = (b - a) / max(a, b)
    return float(s.mean())


@dataclass
class EvalReport:
    per_class_precision: dict[str, float]   # %
    overall_precision: float                # %
    map_pct: float                          # %
    confusion: np.ndarray                   # (6, 6) counts, rows = true class
    latency_mean_ms: float
    latency_p95_ms: float
    silhouette_score: float

    def to_dict(self) -> dict:
        return {
            "per_class_precision": self.per_class_precision,
            "overall_precision": self.overall_precision,
            "map": self.map_pct,
            "confusion": self.confusion.tolist(),
            "latency_mean_ms": self.latency_mean_ms,
            "latency_p95_ms": self.latency_p95_ms,
            "silhouette": self.silhouette_score,
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2))


def evaluate(checkpoint: Checkpoint, dataset: GestureDataset) -> EvalReport:
    """Score a checkpoint on a window dataset, timing the full inference path
    (canonicalize + encode + classify) per window."""
    ae, clf = checkpoint.autoencoder, checkpoint.classifier
    if dataset.n_frames != ae.n_frames:
        raise ShapeMismatch(f"dataset N={dataset.n_frames} vs checkpoint N={ae.n_frames}")
    latencies = []
    preds = np.empty(len(dataset.windows), dtype=np.int64)
    scores = np.empty((len(dataset.windows), NUM_CLASSES))
    latents = np.empty((len(dataset.windows), 2))
    for i, w in enumerate(dataset.windows):
        t0 = time.perf_counter()
        poses = [canonicalize(f) for f in w.frames]
        vec = window_vector(poses, dataset.n_frames, ae.mode)
        if ae.mode == "concat":
            z = encode(ae, vec)
            logits = classify(clf, z)
        else:
            z_pts = encode(ae, vec)
            logits = classify(clf, z_pts)
            z = z_pts.mean(axis=0)
        latencies.append((time.perf_counter() - t0) * 1000.0)
        preds[i] = int(np.argmax(logits)) + 1
        scores[i] = softmax(logits)
        latents[i] = z

    y = dataset.labels()
    confusion = np.zeros((NUM_CLASSES, NUM_CLASSES), dtype=np.int64)
    for true, pred in zip(y, preds):
        confusion[true - 1, pred - 1] += 1
    per_class = {}
    for cls in GestureClass:
        predicted = int(confusion[:, cls - 1].sum())
        tp = int(confusion[cls - 1, cls - 1])
        per_class[cls.name.lower()] = 100.0 * tp / predicted if predicted else 0.0
    try:
        sil = silhouette(latents, y)
    except TooFewPoints:
        sil = float("nan")
    lat = np.asarray(latencies)
    return EvalReport(
        per_class_precision=per_class,
        overall_precision=float(np.mean(preds == y) * 100.0),
        map_pct=mean_average_precision(scores, y) * 100.0,
        confusion=confusion,
        latency_mean_ms=float(lat.mean()),
        latency_p95_ms=float(np.percentile(lat, 95)),
        silhouette_score=sil)


# ---------------------------------------------------------------------------
# Labeled-clip dataset file: one JSON record per line, frames in stream format.

def save_clips(path: str | Path, clips: Sequence[LabeledClip]) -> None:
    from .geometry import frame_to_record
    with open(path, "w") as fh:
        for clip in clips:
            fh.write(json.dumps({"clip": clip.clip_id, "label": int(clip.label),
                                 "frames": [frame_to_record(f) for f in clip.frames]}))
            fh.write("\n")


def load_clips(path: str | Path) -> list[LabeledClip]:
    from .geometry import frame_from_record
    clips = []
    with open(path) as fh:
        for i, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
                clips.append(LabeledClip(
                    clip_id=str(rec["clip"]),
                    label=GestureClass(int(rec["label"])),
                    frames=[frame_from_record(r) for r in rec["frames"]]))
            except (KeyError, ValueError, TypeError) as exc:
                raise ParseError(f"bad clip record at line {i}: {exc}") from exc
    return clips
