"""Four-class backpropagation classifier.

One sigmoid hidden layer sized from the input count, softmax output trained
with cross-entropy by seeded mini-batch gradient descent with momentum. An
epoch that raises the full-set training loss is rolled back and the learning
rate halved, so the recorded loss sequence never increases.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import expit

from .errors import PipelineError
from .fsio import atomic_write_text

N_CLASSES = 4
MODEL_VERSION = 1


def hidden_size(inputs: int) -> int:
    """Hidden width floor(4 + 0.75 * inputs), capped at 2 * inputs - 1."""
    if inputs < 1:
        raise ValueError("inputs must be >= 1")
    return min(4 + (3 * inputs) // 4, 2 * inputs - 1)


@dataclass
class NetworkShape:
    inputs: int
    hidden: int
    outputs: int = N_CLASSES

    def __post_init__(self):
        if self.inputs < 1 or self.hidden < 1 or self.outputs < 2:
            raise ValueError("bad network shape")


@dataclass
class TrainConfig:
    learning_rate: float = 0.1
    momentum: float = 0.9
    batch_size: int = 16
    max_epochs: int = 500
    patience: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0 or not (0 <= self.momentum < 1):
            raise ValueError("bad optimizer constants")
        if self.batch_size < 1 or self.max_epochs < 1 or self.patience < 1:
            raise ValueError("bad training budget")


@dataclass
class Model:
    shape: NetworkShape
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray
    seed: int = 0
    epochs_run: int = 0
    final_loss: float = float("nan")
    feature_ids: list[int] | None = None  # 1-based ids the inputs were cut to
    loss_history: list[float] = field(default_factory=list, repr=False)


def _softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _forward(w1, b1, w2, b2, x):
    a1 = expit(x @ w1 + b1)
    return a1, _softmax(a1 @ w2 + b2)


def _loss(w1, b1, w2, b2, x, y) -> float:
    _, p = _forward(w1, b1, w2, b2, x)
    picked = p[np.arange(len(y)), y]
    with np.errstate(divide="ignore"):
        return float(-np.log(picked).mean())


def _grads(w1, b1, w2, b2, x, y):
    a1, p = _forward(w1, b1, w2, b2, x)
    delta2 = p.copy()
    delta2[np.arange(len(y)), y] -= 1.0
    delta2 /= len(y)
    gw2 = a1.T @ delta2
    gb2 = delta2.sum(axis=0)
    delta1 = (delta2 @ w2.T) * a1 * (1.0 - a1)
    gw1 = x.T @ delta1
    gb1 = delta1.sum(axis=0)
    return gw1, gb1, gw2, gb2


def _init_params(shape: NetworkShape, rng: np.random.Generator):
    lim1 = 1.0 / np.sqrt(shape.inputs)
    lim2 = 1.0 / np.sqrt(shape.hidden)
    w1 = rng.uniform(-lim1, lim1, (shape.inputs, shape.hidden))
    w2 = rng.uniform(-lim2, lim2, (shape.hidden, shape.outputs))
    return w1, np.zeros(shape.hidden), w2, np.zeros(shape.outputs)


def _check_training_data(x: np.ndarray, y: np.ndarray, shape: NetworkShape):
    if x.ndim != 2 or x.shape[1] != shape.inputs:
        raise PipelineError(
            "dimension-mismatch", f"expected {shape.inputs} inputs, got {x.shape}"
        )
    if len(x) != len(y):
        raise PipelineError("length-mismatch", f"{len(x)} rows vs {len(y)} labels")
    present = set(int(v) for v in np.unique(y))
    missing = sorted(set(range(shape.outputs)) - present)
    if missing:
        raise PipelineError("missing-class", f"classes absent from training data: {missing}")
    if not present <= set(range(shape.outputs)):
        raise ValueError("labels outside the class range")


def train(
    x: np.ndarray,
    y: np.ndarray,
    shape: NetworkShape | None = None,
    cfg: TrainConfig | None = None,
) -> Model:
    """Fit the network on integer-labelled rows; deterministic for a seed.

    Every class must appear in the training data ("missing-class"). A
    non-finite loss aborts with "diverged".
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=int)
    if x.ndim != 2 or x.shape[1] < 1:
        raise PipelineError("dimension-mismatch", f"expected a 2D feature matrix, got {x.shape}")
    if shape is None:
        shape = NetworkShape(x.shape[1], hidden_size(x.shape[1]))
    cfg = cfg or TrainConfig()
    _check_training_data(x, y, shape)

    rng = np.random.default_rng(cfg.seed)
    w1, b1, w2, b2 = _init_params(shape, rng)
    v = [np.zeros_like(p) for p in (w1, b1, w2, b2)]
    lr = cfg.learning_rate
    n = len(x)

    current = _loss(w1, b1, w2, b2, x, y)
    if not np.isfinite(current):
        raise PipelineError("diverged", "non-finite loss at initialization")
    best = current
    since_best = 0
    history: list[float] = []
    epochs_run = 0

    for epoch in range(cfg.max_epochs):
        snapshot = (w1.copy(), b1.copy(), w2.copy(), b2.copy())
        order = rng.permutation(n)
        for lo in range(0, n, cfg.batch_size):
            sel = order[lo : lo + cfg.batch_size]
            grads = _grads(w1, b1, w2, b2, x[sel], y[sel])
            for i, p in enumerate((w1, b1, w2, b2)):
                v[i] = cfg.momentum * v[i] - lr * grads[i]
                p += v[i]
        new = _loss(w1, b1, w2, b2, x, y)
        if not np.isfinite(new):
            raise PipelineError("diverged", f"non-finite loss at epoch {epoch}")
        if new > current:
            # reject the epoch and retry more carefully
            w1, b1, w2, b2 = snapshot
            v = [np.zeros_like(p) for p in v]
            lr *= 0.5
            new = current
        current = new
        history.append(current)
        epochs_run = epoch + 1
        if current < best - 1e-12:
            best = current
            since_best = 0
        else:
            since_best += 1
            if since_best >= cfg.patience:
                break
        if lr < 1e-12:
            break

    return Model(
        shape=shape,
        w1=w1,
        b1=b1,
        w2=w2,
        b2=b2,
        seed=cfg.seed,
        epochs_run=epochs_run,
        final_loss=current,
        loss_history=history,
    )


def predict(model: Model, x: np.ndarray) -> tuple[int, np.ndarray]:
    """Class index and the 4 softmax scores for a single feature vector."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size != model.shape.inputs:
        raise PipelineError(
            "dimension-mismatch", f"expected {model.shape.inputs} inputs, got {x.size}"
        )
    _, p = _forward(model.w1, model.b1, model.w2, model.b2, x[None, :])
    return int(np.argmax(p[0])), p[0]


def predict_batch(model: Model, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[1] != model.shape.inputs:
        raise PipelineError(
            "dimension-mismatch", f"expected {model.shape.inputs} inputs, got {x.shape}"
        )
    _, p = _forward(model.w1, model.b1, model.w2, model.b2, x)
    return np.argmax(p, axis=1)


def accuracy(model: Model, x: np.ndarray, y: np.ndarray) -> float:
    return float((predict_batch(model, x) == np.asarray(y, dtype=int)).mean())


def gradient_check(
    shape: NetworkShape, seed: int = 0, batch: int = 5, step: float = 1e-5
) -> float:
    """Largest relative disagreement between backprop and central finite
    differences over every parameter, for random weights and a random batch."""
    rng = np.random.default_rng(seed)
    w1, b1, w2, b2 = _init_params(shape, rng)
    x = rng.uniform(0.0, 1.0, (batch, shape.inputs))
    y = rng.integers(0, shape.outputs, batch)
    analytic = _grads(w1, b1, w2, b2, x, y)
    params = (w1, b1, w2, b2)
    worst = 0.0
    for p, g in zip(params, analytic):
        flat = p.ravel()
        gflat = g.ravel()
        for i in range(flat.size):
            keep = flat[i]
            flat[i] = keep + step
            up = _loss(w1, b1, w2, b2, x, y)
            flat[i] = keep - step
            down = _loss(w1, b1, w2, b2, x, y)
            flat[i] = keep
            numeric = (up - down) / (2.0 * step)
            denom = max(abs(gflat[i]), abs(numeric))
            if denom > 1e-10:
                worst = max(worst, abs(gflat[i] - numeric) / denom)
    return worst


def save_model(model: Model, path: str | Path) -> None:
    """Persist shape, seed and full-precision weights as JSON; reloading
    reproduces predictions bit-exactly."""
    doc = {
        "version": MODEL_VERSION,
        "shape": {
            "inputs": model.shape.inputs,
            "hidden": model.shape.hidden,
            "outputs": model.shape.outputs,
        },
        "seed": model.seed,
        "epochs_run": model.epochs_run,
        "final_loss": model.final_loss,
        "feature_ids": model.feature_ids,
        "w1": model.w1.tolist(),
        "b1": model.b1.tolist(),
        "w2": model.w2.tolist(),
        "b2": model.b2.tolist(),
    }
    atomic_write_text(path, json.dumps(doc, indent=1) + "\n")


def load_model(path: str | Path) -> Model:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise PipelineError("io", f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise PipelineError("schema", f"{path}: {exc}") from exc
    try:
        shape = NetworkShape(**doc["shape"])
        return Model(
            shape=shape,
            w1=np.array(doc["w1"], dtype=float),
            b1=np.array(doc["b1"], dtype=float),
            w2=np.array(doc["w2"], dtype=float),
            b2=np.array(doc["b2"], dtype=float),
            seed=int(doc["seed"]),
            epochs_run=int(doc["epochs_run"]),
            final_loss=float(doc["final_loss"]),
            feature_ids=doc.get("feature_ids"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise PipelineError("schema", f"{path}: {exc}") from exc
