"""Stratified splitting, cross-validation, confusion-matrix metrics, and ROC.

The bankrupt class is the positive class throughout. A classifier enters
evaluation as a `Trainer`: a callable that fits on a Dataset and returns a
`Predictor` mapping one Record to (label, score), where higher scores mean
more bankruptcy-like. Fold assignment is precomputed from the seed, so folds
may be evaluated serially or in parallel with identical results.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .dataset import Dataset, Label, Record
from .errors import (
    EmptyClass,
    InsufficientClassMembers,
    LengthMismatch,
    SingleClassInput,
)

Predictor = Callable[[Record], tuple[Label, float]]
Trainer = Callable[[Dataset], Predictor]


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class Metrics:
    """The four ratios; a ratio is None when its denominator is zero."""

    accuracy: Optional[float]
    tpr: Optional[float]
    fpr: Optional[float]
    precision: Optional[float]

    FIELDS = ("accuracy", "tpr", "fpr", "precision")


def confusion(y_true: Sequence[Label], y_pred: Sequence[Label]) -> ConfusionMatrix:
    if len(y_true) != len(y_pred):
        raise LengthMismatch(f"{len(y_true)} true labels vs {len(y_pred)} predictions")
    if len(y_true) == 0:
        raise LengthMismatch("need at least one record")
    tp = fp = fn = tn = 0
    for actual, predicted in zip(y_true, y_pred):
        if actual is Label.BANKRUPT:
            if predicted is Label.BANKRUPT:
                tp += 1
            else:
                fn += 1
        else:
            if predicted is Label.BANKRUPT:
                fp += 1
            else:
                tn += 1
    return ConfusionMatrix(tp=tp, fp=fp, fn=fn, tn=tn)


def _ratio(num: int, den: int) -> Optional[float]:
    return num / den if den > 0 else None


def metrics(cm: ConfusionMatrix) -> Metrics:
    return Metrics(
        accuracy=_ratio(cm.tp + cm.tn, cm.total),
        tpr=_ratio(cm.tp, cm.tp + cm.fn),
        fpr=_ratio(cm.fp, cm.fp + cm.tn),
        precision=_ratio(cm.tp, cm.tp + cm.fp),
    )


@dataclass(frozen=True)
class RocCurve:
    points: tuple[tuple[float, float], ...]  # (fpr, tpr) from (0,0) to (1,1)
    auc: float


def roc(y_true: Sequence[Label], scores: Sequence[float]) -> RocCurve:
    """Threshold sweep over the distinct scores, descending; tied scores
    collapse to one point. AUC is the trapezoidal area."""
    if len(y_true) != len(scores):
        raise LengthMismatch(f"{len(y_true)} labels vs {len(scores)} scores")
    pos = np.array([lab is Label.BANKRUPT for lab in y_true])
    n_pos = int(pos.sum())
    n_neg = len(pos) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClassInput("ROC needs at least one record of each class")

    scores = np.asarray(scores, dtype=float)
    order = np.argsort(-scores, kind="stable")
    points = [(0.0, 0.0)]
    tp = fp = 0
    i = 0
    while i < len(order):
        j = i
        while j < len(order) and scores[order[j]] == scores[order[i]]:
            tp += bool(pos[order[j]])
            fp += not pos[order[j]]
            j += 1
        points.append((fp / n_neg, tp / n_pos))
        i = j
    if points[-1] != (1.0, 1.0):
        points.append((1.0, 1.0))

    auc = 0.0
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        auc += (x1 - x0) * (y0 + y1) / 2.0
    return RocCurve(points=tuple(points), auc=auc)


def format_roc_points(curve: RocCurve) -> str:
    """Two-column (fpr, tpr) text for external plotting."""
    lines = [f"{x:.6f}\t{y:.6f}" for x, y in curve.points]
    return "\n".join(lines) + "\n"


def _round_half_up(v: float) -> int:
    return int(math.floor(v + 0.5))


def _class_indices(d: Dataset) -> dict[Label, list[int]]:
    by_class: dict[Label, list[int]] = {Label.NON_BANKRUPT: [], Label.BANKRUPT: []}
    for i, record in enumerate(d):
        if record.label is None:
            raise EmptyClass(f"record {i} is unlabeled")
        by_class[record.label].append(i)
    return by_class


def stratified_split(
    d: Dataset, train_fraction: float = 2.0 / 3.0, seed: int = 0
) -> tuple[Dataset, Dataset]:
    """Per-class shuffle, then the first round(fraction * n_class) of each
    class go to train and the rest to test."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must be in (0, 1)")
    by_class = _class_indices(d)
    rng = np.random.default_rng(seed)
    train_idx: list[int] = []
    test_idx: list[int] = []
    for label in (Label.NON_BANKRUPT, Label.BANKRUPT):
        members = by_class[label]
        if not members:
            raise EmptyClass(f"no {label.value} records to split")
        shuffled = [members[i] for i in rng.permutation(len(members))]
        n_train = _round_half_up(train_fraction * len(members))
        train_idx.extend(shuffled[:n_train])
        test_idx.extend(shuffled[n_train:])
    return (
        d.subset(sorted(train_idx), "train"),
        d.subset(sorted(test_idx), "test"),
    )


def stratified_fold_indices(y: np.ndarray, k: int, seed: int) -> list[np.ndarray]:
    """Deal each class's shuffled members round-robin into k folds."""
    if k < 2:
        raise ValueError("k must be >= 2")
    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    for value in np.unique(y):
        members = np.flatnonzero(y == value)
        if len(members) < k:
            raise InsufficientClassMembers(
                f"class {value} has {len(members)} members; k={k} folds need at least {k}"
            )
        for pos, idx in enumerate(members[rng.permutation(len(members))]):
            folds[pos % k].append(int(idx))
    return [np.array(sorted(fold)) for fold in folds]


@dataclass(frozen=True)
class CvResult:
    per_fold: tuple[Metrics, ...]
    mean: Metrics
    std: Metrics
    seed: int


def _aggregate(per_fold: Sequence[Metrics]) -> tuple[Metrics, Metrics]:
    means = {}
    stds = {}
    for name in Metrics.FIELDS:
        values = [getattr(f, name) for f in per_fold if getattr(f, name) is not None]
        if values:
            means[name] = float(np.mean(values))
            stds[name] = float(np.std(values))
        else:
            means[name] = None
            stds[name] = None
    return Metrics(**means), Metrics(**stds)


def evaluate_predictor(predictor: Predictor, d: Dataset) -> Metrics:
    y_true = [r.label for r in d]
    y_pred = [predictor(r)[0] for r in d]
    return metrics(confusion(y_true, y_pred))


def k_fold_cv(
    d: Dataset,
    trainer: Trainer,
    k: int = 10,
    seed: int = 0,
    parallel: bool = False,
) -> CvResult:
    """Stratified k-fold cross-validation.

    Each fold is evaluated by a model trained on the other k-1 folds. Fold
    assignment is precomputed from the seed; with parallel=True the folds
    run on a thread pool and the result is identical to the serial run.
    """
    y = np.array([r.label.encoded if r.label else -1 for r in d])
    if (y < 0).any():
        raise EmptyClass("cross-validation needs a fully labeled dataset")
    folds = stratified_fold_indices(y, k, seed)
    all_idx = np.arange(len(d))

    def run_fold(fold: np.ndarray) -> Metrics:
        train_idx = np.setdiff1d(all_idx, fold)
        predictor = trainer(d.subset(train_idx, "cvtrain"))
        return evaluate_predictor(predictor, d.subset(fold, "cvtest"))

    if parallel:
        with ThreadPoolExecutor() as pool:
            per_fold = list(pool.map(run_fold, folds))
    else:
        per_fold = [run_fold(fold) for fold in folds]
    mean, std = _aggregate(per_fold)
    return CvResult(per_fold=tuple(per_fold), mean=mean, std=std, seed=seed)


def heldout_cv(
    d: Dataset,
    trainer: Trainer,
    k: int = 10,
    seed: int = 0,
    train_fraction: float = 2.0 / 3.0,
) -> CvResult:
    """Literal train/test protocol: fit once on the stratified train split,
    then score each of k stratified subsamples of the held-out third."""
    train, test = stratified_split(d, train_fraction, seed)
    predictor = trainer(train)
    y = np.array([r.label.encoded for r in test])
    folds = stratified_fold_indices(y, k, seed)
    per_fold = [evaluate_predictor(predictor, test.subset(fold, "heldout")) for fold in folds]
    mean, std = _aggregate(per_fold)
    return CvResult(per_fold=tuple(per_fold), mean=mean, std=std, seed=seed)


def pooled_cv_scores(
    d: Dataset,
    trainer: Trainer,
    k: int = 10,
    seed: int = 0,
) -> tuple[list[Label], list[float]]:
    """Out-of-fold (label, score) pairs pooled across folds, for ROC curves."""
    y = np.array([r.label.encoded if r.label else -1 for r in d])
    folds = stratified_fold_indices(y, k, seed)
    all_idx = np.arange(len(d))
    labels: list[Label] = []
    scores: list[float] = []
    for fold in folds:
        train_idx = np.setdiff1d(all_idx, fold)
        predictor = trainer(d.subset(train_idx, "cvtrain"))
        for i in fold:
            record = d.records[i]
            labels.append(record.label)
            scores.append(predictor(record)[1])
    return labels, scores
