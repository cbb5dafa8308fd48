"""Dense network substrate: layers, autoencoder, classifier, joint loss, Adam.

Everything is plain numpy with hand-written backpropagation; the model is
tiny (encoder 63N->128->96->64->2 plus a 6-way head), so there is nothing a
tensor framework would buy except nondeterminism. Forward passes on frozen
parameters are pure; training mutates parameters in place and must be
serialized by the caller.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import EmptyBatch, ParseError, ShapeMismatch
from .geometry import POSE_DIM

ENCODER_WIDTHS = (128, 96, 64, 2)
LATENT_DIM = 2
NUM_CLASSES = 6
DEFAULT_ALPHA = 0.01
CHECKPOINT_FORMAT = "posespace-ckpt-v1"

LEAKY_RELU = "leaky-relu"
IDENTITY = "identity"


class GestureClass(IntEnum):
    """Gesture taxonomy, fixed ordering. Values are the on-disk labels 1..6."""

    CONTINUOUS_ARM_OPEN = 1
    CONTINUOUS_ARM_CLOSE = 2
    CIRCLE_CLOCKWISE = 3
    CIRCLE_COUNTERCLOCKWISE = 4
    PINCH = 5
    DOUBLE_PINCH = 6


#: Triggers recognized after completion; arm open/close are continuous poses.
DISCRETE_CLASSES = frozenset({
    GestureClass.CIRCLE_CLOCKWISE,
    GestureClass.CIRCLE_COUNTERCLOCKWISE,
    GestureClass.PINCH,
    GestureClass.DOUBLE_PINCH,
})


@dataclass
class DenseLayer:
    weights: np.ndarray  # (out_dim, in_dim)
    bias: np.ndarray     # (out_dim,)
    activation: str = LEAKY_RELU
    alpha: float = DEFAULT_ALPHA

    def __post_init__(self) -> None:
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64)
        if self.weights.ndim != 2 or self.bias.shape != (self.weights.shape[0],):
            raise ShapeMismatch(f"inconsistent layer shapes {self.weights.shape} / {self.bias.shape}")
        if not (np.all(np.isfinite(self.weights)) and np.all(np.isfinite(self.bias))):
            raise ValueError("non-finite layer parameters")
        if self.activation not in (LEAKY_RELU, IDENTITY):
            raise ValueError(f"unknown activation {self.activation!r}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")

    @property
    def in_dim(self) -> int:
        return self.weights.shape[1]

    @property
    def out_dim(self) -> int:
        return self.weights.shape[0]


def init_layer(rng: np.random.Generator, in_dim: int, out_dim: int,
               activation: str = LEAKY_RELU, alpha: float = DEFAULT_ALPHA) -> DenseLayer:
    """He-style uniform init scaled by fan-in, zero bias."""
    limit = np.sqrt(6.0 / in_dim)
    w = rng.uniform(-limit, limit, size=(out_dim, in_dim))
    return DenseLayer(weights=w, bias=np.zeros(out_dim), activation=activation, alpha=alpha)


def _activate(layer: DenseLayer, pre: np.ndarray) -> np.ndarray:
    if layer.activation == IDENTITY:
        return pre
    return np.where(pre >= 0, pre, layer.alpha * pre)


def _activate_grad(layer: DenseLayer, pre: np.ndarray) -> np.ndarray:
    if layer.activation == IDENTITY:
        return np.ones_like(pre)
    return np.where(pre >= 0, 1.0, layer.alpha)


def mlp_forward(layers: Sequence[DenseLayer], x: np.ndarray) -> tuple[np.ndarray, list]:
    """Batched forward pass; returns output and the cache needed for backward."""
    cache = []
    out = x
    for layer in layers:
        pre = out @ layer.weights.T + layer.bias
        cache.append((out, pre))
        out = _activate(layer, pre)
    return out, cache


def mlp_backward(layers: Sequence[DenseLayer], cache: list,
                 d_out: np.ndarray) -> tuple[np.ndarray, list[tuple[np.ndarray, np.ndarray]]]:
    """Backprop through an MLP; returns d_input and per-layer (dW, db)."""
    grads: list[tuple[np.ndarray, np.ndarray]] = [None] * len(layers)  # type: ignore[list-item]
    d = d_out
    for i in range(len(layers) - 1, -1, -1):
        layer = layers[i]
        x_in, pre = cache[i]
        d_pre = d * _activate_grad(layer, pre)
        grads[i] = (d_pre.T @ x_in, d_pre.sum(axis=0))
        d = d_pre @ layer.weights
    return d, grads


@dataclass
class Autoencoder:
    """Encoder/decoder pair. Input is 63*N (concat) or 63 per frame (point-set)."""

    encoder: list[DenseLayer]
    decoder: list[DenseLayer]
    mode: str = "concat"
    n_frames: int = 2

    @property
    def input_dim(self) -> int:
        return self.encoder[0].in_dim

    @classmethod
    def create(cls, n_frames: int, mode: str, rng: np.random.Generator) -> "Autoencoder":
        in_dim = POSE_DIM * n_frames if mode == "concat" else POSE_DIM
        enc_dims = [in_dim, *ENCODER_WIDTHS]
        dec_dims = list(reversed(enc_dims))
        encoder = [init_layer(rng, enc_dims[i], enc_dims[i + 1],
                              IDENTITY if i == len(enc_dims) - 2 else LEAKY_RELU)
                   for i in range(len(enc_dims) - 1)]
        decoder = [init_layer(rng, dec_dims[i], dec_dims[i + 1],
                              IDENTITY if i == len(dec_dims) - 2 else LEAKY_RELU)
                   for i in range(len(dec_dims) - 1)]
        model = cls(encoder=encoder, decoder=decoder, mode=mode, n_frames=n_frames)
        model.validate()
        return model

    def validate(self) -> None:
        in_dim = POSE_DIM * self.n_frames if self.mode == "concat" else POSE_DIM
        enc = [in_dim, *ENCODER_WIDTHS]
        dims = [(l.in_dim, l.out_dim) for l in self.encoder]
        if dims != list(zip(enc[:-1], enc[1:])):
            raise ShapeMismatch(f"encoder dims {dims} do not match {enc}")
        dec = list(reversed(enc))
        dims = [(l.in_dim, l.out_dim) for l in self.decoder]
        if dims != list(zip(dec[:-1], dec[1:])):
            raise ShapeMismatch(f"decoder dims {dims} do not match {dec}")
        for stack in (self.encoder, self.decoder):
            for i, layer in enumerate(stack):
                want = IDENTITY if i == len(stack) - 1 else LEAKY_RELU
                if layer.activation != want:
                    raise ValueError(f"layer {i} must use {want}")


@dataclass
class Classifier:
    """6-way gesture head.

    concat mode: an MLP 2 -> 64 -> 64 -> 6 on the window latent.
    point-set mode: shared per-point layers 2 -> 64 -> 64, coordinate-wise max
    pooling over the N latent points, then a 64 -> 6 head.
    """

    shared: list[DenseLayer]           # empty in concat mode
    head: list[DenseLayer]
    mode: str = "concat"

    @classmethod
    def create(cls, mode: str, rng: np.random.Generator) -> "Classifier":
        if mode == "concat":
            head = [init_layer(rng, LATENT_DIM, 64),
                    init_layer(rng, 64, 64),
                    init_layer(rng, 64, NUM_CLASSES, IDENTITY)]
            return cls(shared=[], head=head, mode=mode)
        shared = [init_layer(rng, LATENT_DIM, 64), init_layer(rng, 64, 64)]
        head = [init_layer(rng, 64, NUM_CLASSES, IDENTITY)]
        return cls(shared=shared, head=head, mode=mode)


def _as_batch(x: np.ndarray, dim: int, what: str) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        if x.shape[0] != dim:
            raise ShapeMismatch(f"{what}: expected length {dim}, got {x.shape[0]}")
        return x[None, :], True
    if x.ndim == 2 and x.shape[1] == dim:
        return x, False
    raise ShapeMismatch(f"{what}: expected (*, {dim}), got {x.shape}")


def encode(model: Autoencoder, x: np.ndarray) -> np.ndarray:
    """Feature vector(s) -> 2D latent(s). Accepts a single vector or a batch."""
    x, single = _as_batch(x, model.input_dim, "encode input")
    z, _ = mlp_forward(model.encoder, x)
    return z[0] if single else z


def decode(model: Autoencoder, z: np.ndarray) -> np.ndarray:
    """2D latent(s) -> reconstructed feature vector(s)."""
    z, single = _as_batch(z, LATENT_DIM, "decode input")
    out, _ = mlp_forward(model.decoder, z)
    return out[0] if single else out


def classify(model: Classifier, latent: np.ndarray) -> np.ndarray:
    """Latent input -> 6 logits.

    concat mode takes a single 2-vector (or a batch of them); point-set mode
    takes (N, 2) latent points (or a batch (B, N, 2)) and max-pools.
    """
    latent = np.asarray(latent, dtype=np.float64)
    if model.mode == "concat":
        z, single = _as_batch(latent, LATENT_DIM, "classifier input")
        logits, _ = mlp_forward(model.head, z)
        return logits[0] if single else logits
    single = latent.ndim == 2
    if single:
        latent = latent[None]
    if latent.ndim != 3 or latent.shape[2] != LATENT_DIM:
        raise ShapeMismatch(f"point-set classifier expects (*, N, 2), got {latent.shape}")
    b, n, _ = latent.shape
    feat, _ = mlp_forward(model.shared, latent.reshape(b * n, LATENT_DIM))
    pooled = feat.reshape(b, n, -1).max(axis=1)
    logits, _ = mlp_forward(model.head, pooled)
    return logits[0] if single else logits


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def parameters(ae: Autoencoder, clf: Classifier) -> list[np.ndarray]:
    """All trainable arrays in a fixed order (weights, bias per layer)."""
    params: list[np.ndarray] = []
    for layer in [*ae.encoder, *ae.decoder, *clf.shared, *clf.head]:
        params.append(layer.weights)
        params.append(layer.bias)
    return params


@dataclass
class JointLossResult:
    loss: float
    recon: float
    cross_entropy: float
    grads: list[np.ndarray]  # aligned with parameters(ae, clf)


def joint_loss(ae: Autoencoder, clf: Classifier, windows: np.ndarray,
               labels: np.ndarray, lam: float = 1.0) -> JointLossResult:
    """Joint objective: reconstruction MSE + lam * mean cross-entropy.

    windows: (B, 63N) in concat mode, (B, N, 63) in point-set mode.
    labels: (B,) GestureClass values (1..6).
    Gradients flow through both heads into the shared encoder.
    """
    windows = np.asarray(windows, dtype=np.float64)
    labels = np.asarray(labels)
    if windows.shape[0] == 0:
        raise EmptyBatch("joint_loss on empty batch")
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    targets = labels.astype(np.int64) - 1
    if targets.min() < 0 or targets.max() >= NUM_CLASSES:
        raise ValueError("labels must be GestureClass values 1..6")
    b = windows.shape[0]

    if ae.mode == "concat":
        if windows.ndim != 2 or windows.shape[1] != ae.input_dim:
            raise ShapeMismatch(f"expected (B, {ae.input_dim}), got {windows.shape}")
        x = windows
        n_points = 1
    else:
        if windows.ndim != 3 or windows.shape[2] != ae.input_dim:
            raise ShapeMismatch(f"expected (B, N, {ae.input_dim}), got {windows.shape}")
        n_points = windows.shape[1]
        x = windows.reshape(b * n_points, ae.input_dim)

    z, enc_cache = mlp_forward(ae.encoder, x)
    recon_out, dec_cache = mlp_forward(ae.decoder, z)

    diff = recon_out - x
    recon = float(np.mean(diff ** 2))
    d_recon_out = 2.0 * diff / diff.size

    if clf.mode == "concat":
        logits, head_cache = mlp_forward(clf.head, z)
        shared_cache = None
        pooled = None
    else:
        feat, shared_cache = mlp_forward(clf.shared, z)
        feat3 = feat.reshape(b, n_points, -1)
        argmax = feat3.argmax(axis=1)                      # (B, F)
        pooled = np.take_along_axis(feat3, argmax[:, None, :], axis=1)[:, 0, :]
        logits, head_cache = mlp_forward(clf.head, pooled)

    probs = softmax(logits)
    ce = float(-np.mean(np.log(probs[np.arange(b), targets] + 1e-300)))
    loss = recon + lam * ce

    # Backward: classifier branch.
    d_logits = probs.copy()
    d_logits[np.arange(b), targets] -= 1.0
    d_logits *= lam / b
    d_head_in, head_grads = mlp_backward(clf.head, head_cache, d_logits)
    if clf.mode == "concat":
        shared_grads: list[tuple[np.ndarray, np.ndarray]] = []
        d_z_clf = d_head_in
    else:
        d_feat3 = np.zeros((b, n_points, d_head_in.shape[1]))
        np.put_along_axis(d_feat3, argmax[:, None, :], d_head_in[:, None, :], axis=1)
        d_feat = d_feat3.reshape(b * n_points, -1)
        d_z_clf, shared_grads = mlp_backward(clf.shared, shared_cache, d_feat)

    # Backward: decoder branch, then the shared encoder.
    d_z_dec, dec_grads = mlp_backward(ae.decoder, dec_cache, d_recon_out)
    _, enc_grads = mlp_backward(ae.encoder, enc_cache, d_z_dec + d_z_clf)

    grads: list[np.ndarray] = []
    for dw, db in [*enc_grads, *dec_grads, *shared_grads, *head_grads]:
        grads.append(dw)
        grads.append(db)
    return JointLossResult(loss=loss, recon=recon, cross_entropy=ce, grads=grads)


@dataclass
class AdamState:
    """Adam accumulators with decoupled (multiplicative) weight decay."""

    m: list[np.ndarray]
    v: list[np.ndarray]
    step: int = 0
    learning_rate: float = 1e-3
    weight_decay: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def create(cls, params: Sequence[np.ndarray], learning_rate: float = 1e-3,
               weight_decay: float = 1e-3) -> "AdamState":
        return cls(m=[np.zeros_like(p) for p in params],
                   v=[np.zeros_like(p) for p in params],
                   learning_rate=learning_rate, weight_decay=weight_decay)


def adam_update(params: Sequence[np.ndarray], grads: Sequence[np.ndarray],
                state: AdamState) -> AdamState:
    """One Adam step, in place. Weight decay shrinks parameters before the
    moment update (decoupled from the gradient)."""
    if len(params) != len(grads) or len(params) != len(state.m):
        raise ShapeMismatch("parameter/gradient/state count mismatch")
    state.step += 1
    t = state.step
    for p, g, m, v in zip(params, grads, state.m, state.v):
        if p.shape != g.shape:
            raise ShapeMismatch(f"gradient shape {g.shape} vs parameter {p.shape}")
        if state.weight_decay:
            p *= 1.0 - state.learning_rate * state.weight_decay
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * g * g
        m_hat = m / (1.0 - state.beta1 ** t)
        v_hat = v / (1.0 - state.beta2 ** t)
        p -= state.learning_rate * m_hat / (np.sqrt(v_hat) + state.eps)
    return state


# ---------------------------------------------------------------------------
# Checkpoint format: one JSON document, parameters flat row-major per layer.

def _layer_record(layer: DenseLayer, role: str) -> dict:
    return {"role": role, "in": layer.in_dim, "out": layer.out_dim,
            "activation": layer.activation, "alpha": layer.alpha,
            "weights": layer.weights.reshape(-1).tolist(),
            "bias": layer.bias.tolist()}


def _layer_from_record(rec: dict) -> DenseLayer:
    w = np.asarray(rec["weights"], dtype=np.float64).reshape(rec["out"], rec["in"])
    return DenseLayer(weights=w, bias=np.asarray(rec["bias"], dtype=np.float64),
                      activation=rec["activation"], alpha=rec.get("alpha", DEFAULT_ALPHA))


@dataclass
class Checkpoint:
    autoencoder: Autoencoder
    classifier: Classifier
    lam: float
    seed: int
    calibration: np.ndarray | None = None  # (2, 2): [min_xy, max_xy] of training latents

    def save(self, path: str | Path) -> None:
        layers = ([_layer_record(l, "encoder") for l in self.autoencoder.encoder]
                  + [_layer_record(l, "decoder") for l in self.autoencoder.decoder]
                  + [_layer_record(l, "clf-shared") for l in self.classifier.shared]
                  + [_layer_record(l, "clf-head") for l in self.classifier.head])
        doc = {"format": CHECKPOINT_FORMAT,
               "mode": self.autoencoder.mode,
               "frames": self.autoencoder.n_frames,
               "lambda": self.lam,
               "seed": self.seed,
               "dims": [ENCODER_WIDTHS[-1]] + [l.out_dim for l in self.autoencoder.encoder],
               "layers": layers,
               "calibration": None if self.calibration is None else self.calibration.tolist()}
        Path(path).write_text(json.dumps(doc))

    @classmethod
    def load(cls, path: str | Path) -> "Checkpoint":
        doc = json.loads(Path(path).read_text())
        if doc.get("format") != CHECKPOINT_FORMAT:
            raise ParseError(f"not a {CHECKPOINT_FORMAT} checkpoint: {doc.get('format')!r}")
        by_role: dict[str, list[DenseLayer]] = {"encoder": [], "decoder": [],
                                                "clf-shared": [], "clf-head": []}
        for rec in doc["layers"]:
            by_role[rec["role"]].append(_layer_from_record(rec))
        ae = Autoencoder(encoder=by_role["encoder"], decoder=by_role["decoder"],
                         mode=doc["mode"], n_frames=doc["frames"])
        ae.validate()
        clf = Classifier(shared=by_role["clf-shared"], head=by_role["clf-head"],
                         mode=doc["mode"])
        calib = doc.get("calibration")
        return cls(autoencoder=ae, classifier=clf, lam=doc["lambda"], seed=doc["seed"],
                   calibration=None if calib is None else np.asarray(calib, dtype=np.float64))
