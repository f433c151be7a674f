"""Correlation-based redundancy filtering and information-gain ranking.

Two complementary relevance screens for the six rating columns: a Pearson
filter that drops a feature when it is too correlated (default |r| > 0.7)
with a stronger already-kept feature, and an entropy-based ranking of how
much each feature reduces label uncertainty.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import EncodedMatrix
from .errors import ZeroVariance


def pearson(x: np.ndarray, y: np.ndarray) -> float:
    """Sample Pearson correlation coefficient of two equal-length vectors."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or x.size < 2:
        raise ValueError("pearson needs two 1-d vectors of equal length >= 2")
    dx = x - x.mean()
    dy = y - y.mean()
    sx = math.sqrt(float(dx @ dx))
    sy = math.sqrt(float(dy @ dy))
    if sx == 0.0 or sy == 0.0:
        raise ZeroVariance("correlation undefined for a constant vector")
    return float(dx @ dy) / (sx * sy)


@dataclass(frozen=True)
class CorrelationReport:
    """Outcome of the redundancy filter over all six features."""

    feature_class_corr: dict[str, float]
    feature_feature_corr: np.ndarray
    kept: tuple[str, ...]
    dropped: tuple[tuple[str, str], ...]  # (feature, conflicting kept feature)
    constant_features: tuple[str, ...] = ()
    threshold: float = 0.7


def correlation_filter(m: EncodedMatrix, threshold: float = 0.7) -> CorrelationReport:
    """Greedy redundancy filter: rank features by |correlation with the class|
    descending and drop a feature iff it correlates above `threshold` with a
    feature already kept.

    Constant features carry no redundancy signal: they are kept, reported
    with class correlation 0, and flagged in constant_features. Rank ties
    break by column order.
    """
    if not 0.0 < threshold <= 1.0:
        raise ValueError("threshold must be in (0, 1]")
    names = m.feature_names
    k = len(names)
    y = m.y.astype(float)

    class_corr: dict[str, float] = {}
    constant = []
    for j, name in enumerate(names):
        try:
            class_corr[name] = pearson(m.x[:, j], y)
        except ZeroVariance:
            class_corr[name] = 0.0
            constant.append(name)

    cross = np.eye(k)
    for i in range(k):
        for j in range(i + 1, k):
            if names[i] in constant or names[j] in constant:
                cross[i, j] = cross[j, i] = 0.0
            else:
                cross[i, j] = cross[j, i] = pearson(m.x[:, i], m.x[:, j])
    for name in constant:
        cross[names.index(name), names.index(name)] = 0.0

    order = sorted(range(k), key=lambda j: (-abs(class_corr[names[j]]), j))
    kept: list[int] = []
    dropped: list[tuple[str, str]] = []
    for j in order:
        if names[j] in constant:
            kept.append(j)
            continue
        conflict = next(
            (i for i in kept if names[i] not in constant and abs(cross[j, i]) > threshold),
            None,
        )
        if conflict is None:
            kept.append(j)
        else:
            dropped.append((names[j], names[conflict]))
    return CorrelationReport(
        feature_class_corr=class_corr,
        feature_feature_corr=cross,
        kept=tuple(names[j] for j in kept),
        dropped=tuple(dropped),
        constant_features=tuple(constant),
        threshold=threshold,
    )


def _entropy(labels: np.ndarray) -> float:
    """Shannon entropy (base 2) of a discrete label vector."""
    if labels.size == 0:
        return 0.0
    _, counts = np.unique(labels, return_counts=True)
    p = counts / labels.size
    return float(-(p * np.log2(p)).sum())


def information_gain(m: EncodedMatrix, feature: int) -> float:
    """Reduction of label entropy from conditioning on one feature's
    observed categories: H(y) - sum_v (n_v/n) H(y | feature=v)."""
    col = m.x[:, feature]
    h_y = _entropy(m.y)
    conditional = 0.0
    for v in np.unique(col):
        mask = col == v
        conditional += (mask.sum() / m.n) * _entropy(m.y[mask])
    return h_y - conditional


@dataclass(frozen=True)
class InfoGainReport:
    gains: tuple[tuple[str, float], ...]  # descending by gain


def rank_features(m: EncodedMatrix) -> InfoGainReport:
    """All features' information gains, sorted descending, ties broken by
    column order."""
    gains = [(name, information_gain(m, j)) for j, name in enumerate(m.feature_names)]
    order = sorted(range(len(gains)), key=lambda j: (-gains[j][1], j))
    return InfoGainReport(gains=tuple(gains[j] for j in order))
