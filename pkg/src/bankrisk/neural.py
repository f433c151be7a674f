"""Single-hidden-layer perceptron trained by full-batch backpropagation.

Architecture: 6 inputs -> `hidden` sigmoid units -> 1 sigmoid output read as
the probability of the bankrupt class. Loss is mean binary cross-entropy.
Initialization is uniform(-init_scale, init_scale) from a fixed seed, so
training is fully reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import EncodedMatrix, Label
from .errors import NonFiniteLoss, SingleClassTraining
from .linear_models import sigmoid


@dataclass(frozen=True)
class MlpConfig:
    hidden: int = 4
    learning_rate: float = 0.5
    epochs: int = 2000
    seed: int = 0
    init_scale: float = 0.5


@dataclass(frozen=True)
class MlpModel:
    w1: np.ndarray  # hidden x 6
    b1: np.ndarray  # hidden
    w2: np.ndarray  # hidden
    b2: float
    config: MlpConfig


@dataclass(frozen=True)
class MlpGradients:
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: float


def _forward_batch(model: MlpModel, rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    hidden = sigmoid(rows @ model.w1.T + model.b1)
    out = sigmoid(hidden @ model.w2 + model.b2)
    return hidden, out


def mlp_forward(model: MlpModel, x: np.ndarray) -> float:
    """Probability of the bankrupt class for one encoded 6-vector."""
    _, out = _forward_batch(model, np.asarray(x, dtype=float).reshape(1, -1))
    return float(out[0])


def mlp_label(model: MlpModel, x: np.ndarray) -> Label:
    return Label.BANKRUPT if mlp_forward(model, x) >= 0.5 else Label.NON_BANKRUPT


def mlp_loss(model: MlpModel, rows: np.ndarray, targets: np.ndarray) -> float:
    """Mean binary cross-entropy of the batch."""
    _, out = _forward_batch(model, rows)
    eps = 1e-12
    out = np.clip(out, eps, 1.0 - eps)
    return float(-np.mean(targets * np.log(out) + (1.0 - targets) * np.log(1.0 - out)))


def mlp_gradients(model: MlpModel, rows: np.ndarray, targets: np.ndarray) -> MlpGradients:
    """Exact gradients of the mean binary cross-entropy via backprop."""
    rows = np.asarray(rows, dtype=float)
    targets = np.asarray(targets, dtype=float)
    n = len(targets)
    hidden, out = _forward_batch(model, rows)

    delta_out = (out - targets) / n                      # dL/d(pre-activation of output)
    grad_w2 = hidden.T @ delta_out
    grad_b2 = float(delta_out.sum())
    delta_hidden = np.outer(delta_out, model.w2) * hidden * (1.0 - hidden)
    grad_w1 = delta_hidden.T @ rows
    grad_b1 = delta_hidden.sum(axis=0)
    return MlpGradients(w1=grad_w1, b1=grad_b1, w2=grad_w2, b2=grad_b2)


def fit_mlp(m: EncodedMatrix, cfg: MlpConfig = MlpConfig()) -> MlpModel:
    """Full-batch gradient descent for cfg.epochs epochs."""
    if len(np.unique(m.y)) < 2:
        raise SingleClassTraining("MLP training needs both classes present")
    rng = np.random.default_rng(cfg.seed)
    s = cfg.init_scale
    model = MlpModel(
        w1=rng.uniform(-s, s, size=(cfg.hidden, m.x.shape[1])),
        b1=rng.uniform(-s, s, size=cfg.hidden),
        w2=rng.uniform(-s, s, size=cfg.hidden),
        b2=float(rng.uniform(-s, s)),
        config=cfg,
    )
    targets = m.y.astype(float)
    lr = cfg.learning_rate
    for _ in range(cfg.epochs):
        g = mlp_gradients(model, m.x, targets)
        model = MlpModel(
            w1=model.w1 - lr * g.w1,
            b1=model.b1 - lr * g.b1,
            w2=model.w2 - lr * g.w2,
            b2=model.b2 - lr * g.b2,
            config=cfg,
        )
        if not np.isfinite(mlp_loss(model, m.x, targets)):
            raise NonFiniteLoss("MLP loss diverged; lower the learning rate")
    return model
