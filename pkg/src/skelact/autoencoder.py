"""Dense autoencoder for per-frame dimensionality reduction.

A mirror-symmetric MLP (tanh hidden layers, linear latent and output)
trained on individual scaled feature frames by minimizing the mean squared
reconstruction error with mini-batch Adam updates. Training is
single-threaded and fully seeded: identical seed and data give an
identical model.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import Diverged, InsufficientData, LayoutMismatch, ParseError, ValidationError
from .features import FeatureSequence

_MAGIC = "skelact-mlp"
_FORMAT_VERSION = 1


@dataclass
class Layer:
    weights: np.ndarray   # (out, in)
    bias: np.ndarray      # (out,)
    activation: str       # "tanh" | "linear"


@dataclass
class MLPModel:
    encoder: list[Layer]
    decoder: list[Layer]
    layout: str                       # feature layout the model expects
    history: list[dict] | None = field(default=None, repr=False)

    @property
    def input_dim(self) -> int:
        return self.encoder[0].weights.shape[1]

    @property
    def latent_dim(self) -> int:
        return self.encoder[-1].weights.shape[0]

    @property
    def fingerprint(self) -> str:
        return hashlib.md5(json.dumps(self._header(), sort_keys=True)
                           .encode()).hexdigest()[:8]

    def _header(self) -> dict:
        layers = self.encoder + self.decoder
        return {
            "magic": _MAGIC, "version": _FORMAT_VERSION, "layout": self.layout,
            "n_encoder": len(self.encoder),
            "dims": [list(l.weights.shape) for l in layers],
            "activations": [l.activation for l in layers],
        }

    def encode(self, x: np.ndarray) -> np.ndarray:
        return _forward(self.encoder, np.atleast_2d(x))[-1]

    def decode(self, z: np.ndarray) -> np.ndarray:
        return _forward(self.decoder, np.atleast_2d(z))[-1]

    def reconstruct(self, x: np.ndarray) -> np.ndarray:
        return self.decode(self.encode(x))

    @property
    def latent_layout(self) -> str:
        return f"latent:{self.fingerprint}:d{self.latent_dim}"


@dataclass
class TrainConfig:
    hidden: tuple[int, ...] = (256, 64)
    latent_dim: int = 16
    learning_rate: float = 1e-3
    epochs: int = 200
    batch_size: int = 64
    seed: int = 0
    patience: int = 20          # early stop after this many non-improving epochs
    val_fraction: float = 0.1

    def __post_init__(self):
        if self.latent_dim <= 0 or self.epochs <= 0 or self.batch_size <= 0 \
                or self.learning_rate <= 0 or self.patience <= 0 \
                or any(h <= 0 for h in self.hidden):
            raise ValidationError("TrainConfig fields must be positive")


def _act(z: np.ndarray, kind: str) -> np.ndarray:
    return np.tanh(z) if kind == "tanh" else z


def _act_grad(a: np.ndarray, kind: str) -> np.ndarray:
    # Derivative expressed through the activation output.
    return 1.0 - a * a if kind == "tanh" else np.ones_like(a)


def _forward(layers: list[Layer], x: np.ndarray) -> list[np.ndarray]:
    """Activations per layer, input first; output is the last entry."""
    acts = [x]
    for layer in layers:
        z = acts[-1] @ layer.weights.T + layer.bias
        acts.append(_act(z, layer.activation))
    return acts


def loss_and_gradients(layers: list[Layer], x: np.ndarray
                       ) -> tuple[float, list[tuple[np.ndarray, np.ndarray]]]:
    """Reconstruction MSE and its gradient w.r.t. every weight and bias.

    The loss is the mean squared element error of the batch; gradients come
    from plain backpropagation in a single pass.
    """
    acts = _forward(layers, x)
    out = acts[-1]
    diff = out - x
    loss = float(np.mean(diff * diff))

    grads: list[tuple[np.ndarray, np.ndarray]] = [None] * len(layers)
    delta = 2.0 * diff / diff.size          # dL/d(output)
    for i in range(len(layers) - 1, -1, -1):
        layer = layers[i]
        delta = delta * _act_grad(acts[i + 1], layer.activation)
        grads[i] = (delta.T @ acts[i], delta.sum(axis=0))
        if i > 0:
            delta = delta @ layer.weights
    return loss, grads


def build_layers(sizes: list[int], rng: np.random.Generator,
                 latent_index: int) -> list[Layer]:
    """Glorot-initialized layers; tanh everywhere except latent and output."""
    layers = []
    for i, (d_in, d_out) in enumerate(zip(sizes[:-1], sizes[1:])):
        limit = np.sqrt(6.0 / (d_in + d_out))
        w = rng.uniform(-limit, limit, size=(d_out, d_in))
        act = "linear" if i in (latent_index, len(sizes) - 2) else "tanh"
        layers.append(Layer(weights=w, bias=np.zeros(d_out), activation=act))
    return layers


def make_model(input_dim: int, cfg: TrainConfig, layout: str,
               rng: np.random.Generator) -> MLPModel:
    sizes = [input_dim, *cfg.hidden, cfg.latent_dim,
             *reversed(cfg.hidden), input_dim]
    n_enc = len(cfg.hidden) + 1
    layers = build_layers(sizes, rng, latent_index=n_enc - 1)
    return MLPModel(encoder=layers[:n_enc], decoder=layers[n_enc:], layout=layout)


class _Adam:
    def __init__(self, layers: list[Layer], lr: float,
                 beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.t = 0
        self.m = [(np.zeros_like(l.weights), np.zeros_like(l.bias)) for l in layers]
        self.v = [(np.zeros_like(l.weights), np.zeros_like(l.bias)) for l in layers]

    def step(self, layers: list[Layer], grads) -> None:
        self.t += 1
        b1c = 1.0 - self.beta1 ** self.t
        b2c = 1.0 - self.beta2 ** self.t
        for i, (layer, (gw, gb)) in enumerate(zip(layers, grads)):
            for j, (param, g) in enumerate(((layer.weights, gw), (layer.bias, gb))):
                m = self.m[i][j]
                v = self.v[i][j]
                m += (1 - self.beta1) * (g - m)
                v += (1 - self.beta2) * (g * g - v)
                param -= self.lr * (m / b1c) / (np.sqrt(v / b2c) + self.eps)


def train_codec(sequences: list[FeatureSequence],
                cfg: TrainConfig | None = None) -> MLPModel:
    """Train the autoencoder on every frame of the given scaled sequences.

    Keeps the weights from the epoch with the best loss on a 10% holdout;
    stops early once the holdout loss has not improved for ``patience``
    epochs. Raises Diverged if the loss goes NaN.
    """
    cfg = cfg or TrainConfig()
    frames = np.concatenate([s.values for s in sequences], axis=0)
    layout = sequences[0].layout
    if any(s.layout != layout for s in sequences):
        raise LayoutMismatch("mixed feature layouts in training data")
    n = frames.shape[0]
    if n < cfg.batch_size:
        raise InsufficientData(f"{n} frames < batch size {cfg.batch_size}")

    rng = np.random.default_rng(cfg.seed)
    order = rng.permutation(n)
    n_val = max(1, round(cfg.val_fraction * n))
    val, train = frames[order[:n_val]], frames[order[n_val:]]

    model = make_model(frames.shape[1], cfg, layout, rng)
    layers = model.encoder + model.decoder
    opt = _Adam(layers, cfg.learning_rate)

    best_val = np.inf
    best_weights = None
    stale = 0
    curve = []
    for epoch in range(cfg.epochs):
        perm = rng.permutation(train.shape[0])
        epoch_loss = 0.0
        n_batches = 0
        for start in range(0, train.shape[0], cfg.batch_size):
            batch = train[perm[start:start + cfg.batch_size]]
            loss, grads = loss_and_gradients(layers, batch)
            if not np.isfinite(loss):
                raise Diverged(f"loss became {loss} at epoch {epoch}")
            opt.step(layers, grads)
            epoch_loss += loss
            n_batches += 1
        val_loss, _ = loss_and_gradients(layers, val)
        if not np.isfinite(val_loss):
            raise Diverged(f"validation loss became {val_loss} at epoch {epoch}")
        curve.append({"epoch": epoch, "train_loss": epoch_loss / n_batches,
                      "val_loss": val_loss})
        if val_loss < best_val:
            best_val = val_loss
            best_weights = [(l.weights.copy(), l.bias.copy()) for l in layers]
            stale = 0
        else:
            stale += 1
            if stale >= cfg.patience:
                break

    for layer, (w, b) in zip(layers, best_weights):
        layer.weights, layer.bias = w, b
    model.history = curve
    return model


def encode_sequence(seq: FeatureSequence, model: MLPModel) -> FeatureSequence:
    """Apply the encoder frame by frame; timestamps are preserved."""
    if seq.layout != model.layout:
        raise LayoutMismatch(f"sequence layout {seq.layout}, "
                             f"model expects {model.layout}")
    latent = model.encode(seq.values)
    return FeatureSequence(timestamps=seq.timestamps.copy(), values=latent,
                           layout=model.latent_layout, label=seq.label)


def identity_model(dim: int, layout: str) -> MLPModel:
    """Latent dim equals input dim, weights are identity: encode(x) == x."""
    eye = Layer(weights=np.eye(dim), bias=np.zeros(dim), activation="linear")
    eye2 = Layer(weights=np.eye(dim), bias=np.zeros(dim), activation="linear")
    return MLPModel(encoder=[eye], decoder=[eye2], layout=layout)


# ---------------------------------------------------------------------------
# Serialization: one JSON header line, then row-major float64 blobs.

def save_model(model: MLPModel, path: str | Path) -> None:
    with open(path, "wb") as f:
        f.write((json.dumps(model._header(), sort_keys=True) + "\n").encode())
        for layer in model.encoder + model.decoder:
            f.write(np.ascontiguousarray(layer.weights, dtype="<f8").tobytes())
            f.write(np.ascontiguousarray(layer.bias, dtype="<f8").tobytes())


def load_model(path: str | Path) -> MLPModel:
    with open(path, "rb") as f:
        header_line = f.readline()
        try:
            header = json.loads(header_line)
        except json.JSONDecodeError as e:
            raise ParseError(f"{path}: bad model header: {e}") from e
        if header.get("magic") != _MAGIC or header.get("version") != _FORMAT_VERSION:
            raise ParseError(f"{path}: not a version-{_FORMAT_VERSION} model file")
        layers = []
        for (d_out, d_in), act in zip(header["dims"], header["activations"]):
            w = np.frombuffer(f.read(8 * d_out * d_in), dtype="<f8").reshape(d_out, d_in)
            b = np.frombuffer(f.read(8 * d_out), dtype="<f8")
            layers.append(Layer(weights=w.copy(), bias=b.copy(), activation=act))
    n_enc = header["n_encoder"]
    return MLPModel(encoder=layers[:n_enc], decoder=layers[n_enc:],
                    layout=header["layout"])
