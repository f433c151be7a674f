"""Logistic regression and categorical naive Bayes.

Both predict the bankrupt class (encoded 1) from the six encoded ratings.
Logistic regression trains by deterministic full-batch gradient descent on
the L2-regularized mean negative log-likelihood; naive Bayes is closed-form
category counting with Laplace smoothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, EncodedMatrix, Label, Rating, Record
from .errors import MissingLabel, NonFiniteLoss, SingleClassTraining


def sigmoid(z):
    """Numerically stable logistic function, elementwise on arrays."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    if out.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class LogisticConfig:
    learning_rate: float = 0.5
    l2_lambda: float = 1e-4
    max_iters: int = 5000
    tolerance: float = 1e-6


@dataclass(frozen=True)
class LogisticModel:
    weights: np.ndarray
    bias: float
    config: LogisticConfig


def _logistic_loss(x: np.ndarray, y: np.ndarray, w: np.ndarray, b: float, l2: float) -> float:
    z = x @ w + b
    # mean NLL written via log1p(exp(-|z|)) to stay finite for large |z|
    nll = np.mean(np.log1p(np.exp(-np.abs(z))) + np.maximum(z, 0.0) - y * z)
    return float(nll + 0.5 * l2 * (w @ w))


def logistic_gradient(
    x: np.ndarray, y: np.ndarray, w: np.ndarray, b: float, l2: float
) -> tuple[np.ndarray, float]:
    """Gradient of the regularized mean NLL w.r.t. (weights, bias).
    The bias is not regularized."""
    p = sigmoid(x @ w + b)
    residual = p - y
    grad_w = x.T @ residual / len(y) + l2 * w
    grad_b = float(residual.mean())
    return grad_w, grad_b


def fit_logistic(m: EncodedMatrix, cfg: LogisticConfig = LogisticConfig()) -> LogisticModel:
    """Full-batch gradient descent from zero initialization; stops when the
    gradient max-norm falls below cfg.tolerance or at cfg.max_iters."""
    y = m.y.astype(float)
    if len(np.unique(m.y)) < 2:
        raise SingleClassTraining("logistic regression needs both classes present")
    w = np.zeros(m.x.shape[1])
    b = 0.0
    for _ in range(cfg.max_iters):
        grad_w, grad_b = logistic_gradient(m.x, y, w, b, cfg.l2_lambda)
        if max(np.abs(grad_w).max(), abs(grad_b)) < cfg.tolerance:
            break
        w = w - cfg.learning_rate * grad_w
        b = b - cfg.learning_rate * grad_b
        if not np.isfinite(_logistic_loss(m.x, y, w, b, cfg.l2_lambda)):
            raise NonFiniteLoss("logistic loss diverged; lower the learning rate")
    return LogisticModel(weights=w, bias=b, config=cfg)


def predict_logistic(model: LogisticModel, x: np.ndarray) -> float:
    """Probability of the bankrupt class for one encoded 6-vector."""
    return float(sigmoid(float(model.weights @ np.asarray(x, dtype=float) + model.bias)))


def logistic_label(model: LogisticModel, x: np.ndarray) -> Label:
    """Threshold at 0.5; the tie goes to the risk class."""
    return Label.BANKRUPT if predict_logistic(model, x) >= 0.5 else Label.NON_BANKRUPT


@dataclass(frozen=True)
class NaiveBayesModel:
    """Class priors plus per-feature category likelihoods.

    likelihoods[feature_index][rating][label] = p(rating | label), smoothed
    with `alpha` pseudo-counts per category.
    """

    priors: dict[Label, float]
    likelihoods: tuple[dict[Rating, dict[Label, float]], ...]
    alpha: float = 1.0


def fit_naive_bayes(dataset: Dataset, alpha: float = 1.0) -> NaiveBayesModel:
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    n_by_class = {Label.NON_BANKRUPT: 0, Label.BANKRUPT: 0}
    counts = [
        {r: {lab: 0 for lab in Label} for r in Rating} for _ in range(6)
    ]
    for i, record in enumerate(dataset):
        if record.label is None:
            raise MissingLabel(i)
        n_by_class[record.label] += 1
        for j, rating in enumerate(record.ratings()):
            counts[j][rating][record.label] += 1
    total = sum(n_by_class.values())
    if min(n_by_class.values()) == 0:
        raise SingleClassTraining("naive Bayes needs both classes present")

    priors = {lab: n / total for lab, n in n_by_class.items()}
    likelihoods = []
    for j in range(6):
        table: dict[Rating, dict[Label, float]] = {}
        for rating in Rating:
            table[rating] = {
                lab: (counts[j][rating][lab] + alpha) / (n_by_class[lab] + 3 * alpha)
                for lab in Label
            }
        likelihoods.append(table)
    return NaiveBayesModel(priors=priors, likelihoods=tuple(likelihoods), alpha=alpha)


def predict_naive_bayes(model: NaiveBayesModel, record: Record) -> dict[Label, float]:
    """Normalized class posteriors, computed in log space.

    With alpha=0 a record can have zero likelihood under both classes; the
    posterior then falls back to the priors.
    """
    log_post = {}
    for lab in Label:
        lp = math.log(model.priors[lab]) if model.priors[lab] > 0 else -math.inf
        for j, rating in enumerate(record.ratings()):
            p = model.likelihoods[j][rating][lab]
            lp += math.log(p) if p > 0 else -math.inf
        log_post[lab] = lp
    peak = max(log_post.values())
    if peak == -math.inf:
        return dict(model.priors)
    raw = {lab: math.exp(lp - peak) for lab, lp in log_post.items()}
    norm = sum(raw.values())
    return {lab: v / norm for lab, v in raw.items()}


def naive_bayes_label(model: NaiveBayesModel, record: Record) -> Label:
    post = predict_naive_bayes(model, record)
    if post[Label.BANKRUPT] >= post[Label.NON_BANKRUPT]:
        return Label.BANKRUPT
    return Label.NON_BANKRUPT
