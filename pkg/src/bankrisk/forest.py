"""CART decision trees and a bootstrap-aggregated random forest.

Splits are binary thresholds on the {0, 0.5, 1} rating encoding (candidate
thresholds 0.25 and 0.75 enumerate every order-respecting partition) chosen
by Gini impurity decrease. The forest votes by majority with ties going to
the risk class, and reports the out-of-bag misclassification rate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .dataset import EncodedMatrix, Label
from .errors import EmptyNode, SingleClassTraining

THRESHOLDS = (0.25, 0.75)


def gini(counts: tuple[int, int]) -> float:
    """Gini impurity 1 - sum(p_k^2) of a (non_bankrupt, bankrupt) count pair."""
    n_nb, n_b = counts
    total = n_nb + n_b
    if total <= 0:
        raise EmptyNode("gini undefined for an empty node")
    p_nb = n_nb / total
    p_b = n_b / total
    return 1.0 - (p_nb * p_nb + p_b * p_b)


@dataclass(frozen=True)
class Leaf:
    label: Label
    class_counts: tuple[int, int]  # (non_bankrupt, bankrupt)


@dataclass(frozen=True)
class Split:
    feature: int
    threshold: float
    left: "TreeNode"   # encoded value <= threshold
    right: "TreeNode"  # encoded value >  threshold


TreeNode = Union[Leaf, Split]


@dataclass(frozen=True)
class TreeConfig:
    mtry: int = 2
    min_leaf: int = 1
    max_depth: Optional[int] = None


def _leaf(y: np.ndarray) -> Leaf:
    n_b = int(y.sum())
    n_nb = int(len(y) - n_b)
    label = Label.BANKRUPT if n_b >= n_nb else Label.NON_BANKRUPT
    return Leaf(label=label, class_counts=(n_nb, n_b))


def _best_split(x, y, indices, features, min_leaf) -> Optional[tuple[int, float, np.ndarray, float]]:
    """Highest-gain (feature, threshold) over the candidates, or None when no
    admissible split strictly decreases weighted impurity. Candidates are
    scanned in ascending feature then threshold order so ties resolve
    index-free."""
    n = len(indices)
    n_b = int(y[indices].sum())
    parent = gini((n - n_b, n_b))
    best = None
    best_gain = 0.0
    for feature in features:
        col = x[indices, feature]
        for threshold in THRESHOLDS:
            left = col <= threshold
            n_left = int(left.sum())
            if n_left < min_leaf or n - n_left < min_leaf:
                continue
            lb = int(y[indices[left]].sum())
            rb = n_b - lb
            g_left = gini((n_left - lb, lb))
            g_right = gini((n - n_left - rb, rb))
            gain = parent - (n_left * g_left + (n - n_left) * g_right) / n
            if gain > best_gain:
                best_gain = gain
                best = (feature, threshold, left, gain)
    return best


def grow_tree(
    m: EncodedMatrix,
    row_indices: np.ndarray,
    cfg: TreeConfig = TreeConfig(),
    rng: Optional[np.random.Generator] = None,
) -> TreeNode:
    """Recursive best-Gini split over `cfg.mtry` features sampled without
    replacement per node. Stops on purity, min_leaf, max_depth, or when no
    split has positive gain."""
    rng = rng or np.random.default_rng(0)
    indices = np.asarray(row_indices)
    if indices.size == 0:
        raise EmptyNode("cannot grow a tree from zero rows")
    n_features = m.x.shape[1]
    mtry = min(cfg.mtry, n_features)

    def build(idx: np.ndarray, depth: int) -> TreeNode:
        y_node = m.y[idx]
        if (
            (cfg.max_depth is not None and depth >= cfg.max_depth)
            or len(idx) < 2 * cfg.min_leaf
            or y_node.min() == y_node.max()
        ):
            return _leaf(y_node)
        features = np.sort(rng.choice(n_features, size=mtry, replace=False))
        found = _best_split(m.x, m.y, idx, features, cfg.min_leaf)
        if found is None:
            return _leaf(y_node)
        feature, threshold, left_mask, gain = found
        assert gain > 0.0
        left_idx = idx[left_mask]
        right_idx = idx[~left_mask]
        return Split(
            feature=int(feature),
            threshold=float(threshold),
            left=build(left_idx, depth + 1),
            right=build(right_idx, depth + 1),
        )

    return build(indices, 0)


def predict_tree(node: TreeNode, x: np.ndarray) -> Label:
    while isinstance(node, Split):
        node = node.left if x[node.feature] <= node.threshold else node.right
    return node.label


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 100
    mtry: int = 2
    bootstrap: bool = True
    min_leaf: int = 1
    max_depth: Optional[int] = None


@dataclass(frozen=True)
class ForestModel:
    trees: tuple[TreeNode, ...]
    config: ForestConfig
    seed: int
    oob_error: Optional[float]  # None when bootstrap is off or coverage incomplete


def fit_forest(m: EncodedMatrix, cfg: ForestConfig = ForestConfig(), seed: int = 0) -> ForestModel:
    """Train cfg.n_trees trees, each on its own bootstrap sample and with an
    independent RNG stream (seed + tree index), so results do not depend on
    training order. OOB error is the vote-of-uninvolved-trees error rate."""
    if cfg.n_trees < 1:
        raise ValueError("n_trees must be >= 1")
    if len(np.unique(m.y)) < 2:
        raise SingleClassTraining("forest training needs both classes present")
    n = m.n
    tree_cfg = TreeConfig(mtry=cfg.mtry, min_leaf=cfg.min_leaf, max_depth=cfg.max_depth)
    trees = []
    oob_votes_b = np.zeros(n, dtype=int)
    oob_votes_total = np.zeros(n, dtype=int)
    for t in range(cfg.n_trees):
        rng = np.random.default_rng(seed + t)
        if cfg.bootstrap:
            sample = rng.integers(0, n, size=n)
        else:
            sample = np.arange(n)
        tree = grow_tree(m, sample, tree_cfg, rng)
        trees.append(tree)
        if cfg.bootstrap:
            oob = np.setdiff1d(np.arange(n), sample, assume_unique=False)
            for i in oob:
                vote = predict_tree(tree, m.x[i])
                oob_votes_total[i] += 1
                oob_votes_b[i] += vote is Label.BANKRUPT

    oob_error = None
    if cfg.bootstrap and oob_votes_total.min() > 0:
        # majority with ties to the risk class, mirroring predict_forest
        pred_b = oob_votes_b * 2 >= oob_votes_total
        oob_error = float(np.mean(pred_b != (m.y == 1)))
    return ForestModel(trees=tuple(trees), config=cfg, seed=seed, oob_error=oob_error)


def forest_votes(model: ForestModel, x: np.ndarray) -> float:
    """Fraction of trees voting bankrupt; used as the ranking score."""
    votes = sum(predict_tree(tree, x) is Label.BANKRUPT for tree in model.trees)
    return votes / len(model.trees)


def predict_forest(model: ForestModel, x: np.ndarray) -> Label:
    """Mode of the individual tree votes; an exact tie goes to the risk class."""
    return Label.BANKRUPT if forest_votes(model, x) >= 0.5 else Label.NON_BANKRUPT
