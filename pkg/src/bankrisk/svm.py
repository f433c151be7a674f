"""Soft-margin RBF support vector machine trained by sequential minimal
optimization, plus cross-validated grid search over (C, gamma).

The dual is solved by repeated analytic optimization of one multiplier pair:
the first index sweeps over KKT violators, the second is chosen by the
largest error difference and falls back to seeded random scans, so a run is
fully reproducible from its seed. Targets are encoded bankrupt -> +1,
non-bankrupt -> -1, and the decision rule is sign-based with ties (value 0)
going to the risk class.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dataset import EncodedMatrix, Label
from .errors import NegativeGamma, SingleClassTraining

HARD_ITERATION_CAP = 1_000_000


def rbf_kernel(x: np.ndarray, z: np.ndarray, gamma: float) -> float:
    """exp(-gamma * ||x - z||^2)."""
    if gamma < 0:
        raise NegativeGamma("gamma must be >= 0")
    d = np.asarray(x, dtype=float) - np.asarray(z, dtype=float)
    return float(np.exp(-gamma * (d @ d)))


def _kernel_matrix(a: np.ndarray, b: np.ndarray, gamma: float) -> np.ndarray:
    sq = (
        (a * a).sum(axis=1)[:, None]
        + (b * b).sum(axis=1)[None, :]
        - 2.0 * (a @ b.T)
    )
    return np.exp(-gamma * np.maximum(sq, 0.0))


@dataclass(frozen=True)
class SvmModel:
    support_vectors: np.ndarray  # rows with alpha > 0
    alphas: np.ndarray           # multipliers in (0, C]
    sv_targets: np.ndarray       # +1 bankrupt / -1 non-bankrupt
    bias: float
    gamma: float
    c: float
    converged: bool = True


def _dual_objective(alphas: np.ndarray, y: np.ndarray, k: np.ndarray) -> float:
    ay = alphas * y
    return float(alphas.sum() - 0.5 * (ay @ k @ ay))


def smo_train(
    m: EncodedMatrix,
    c: float,
    gamma: float = 1.0 / 6.0,
    tol: float = 1e-3,
    max_passes: int = 10,
    seed: int = 0,
    objective_trace: Optional[list] = None,
) -> SvmModel:
    """Solve the soft-margin dual by SMO.

    Terminates once `max_passes` consecutive full sweeps make no progress on
    any KKT violation beyond `tol`, or flags the model as non-converged at
    the hard iteration cap and returns the best iterate. When a list is
    passed as `objective_trace`, the dual objective is appended after every
    accepted pair update (test instrumentation; quadratic cost).
    """
    if c <= 0:
        raise ValueError("c must be positive")
    if gamma < 0:
        raise NegativeGamma("gamma must be >= 0")
    classes = np.unique(m.y)
    if len(classes) < 2:
        raise SingleClassTraining("SVM training needs both classes present")

    x = m.x
    y = (2 * m.y - 1).astype(float)
    n = m.n
    k = _kernel_matrix(x, x, gamma)
    rng = np.random.default_rng(seed)

    alphas = np.zeros(n)
    bias = 0.0
    # errors[i] = f(x_i) - y_i; with all alphas zero, f is just the bias
    errors = np.full(n, bias) - y
    steps = 0
    converged = True

    def take_step(i: int, j: int) -> bool:
        nonlocal bias, steps
        if i == j:
            return False
        a_i, a_j = alphas[i], alphas[j]
        y_i, y_j = y[i], y[j]
        e_i, e_j = errors[i], errors[j]
        s = y_i * y_j
        if s > 0:
            low, high = max(0.0, a_i + a_j - c), min(c, a_i + a_j)
        else:
            low, high = max(0.0, a_j - a_i), min(c, c + a_j - a_i)
        if low >= high:
            return False
        eta = k[i, i] + k[j, j] - 2.0 * k[i, j]
        if eta > 0:
            a_j_new = a_j + y_j * (e_i - e_j) / eta
            a_j_new = min(max(a_j_new, low), high)
        else:
            # flat or degenerate direction: evaluate the objective at both ends
            # (bias-free outputs g = f - bias, per the pairwise expansion)
            f_i = y_i * (e_i - bias) - a_i * k[i, i] - s * a_j * k[i, j]
            f_j = y_j * (e_j - bias) - s * a_i * k[i, j] - a_j * k[j, j]
            l_i = a_i + s * (a_j - low)
            h_i = a_i + s * (a_j - high)
            obj_low = (
                l_i * f_i + low * f_j + 0.5 * l_i**2 * k[i, i]
                + 0.5 * low**2 * k[j, j] + s * low * l_i * k[i, j]
            )
            obj_high = (
                h_i * f_i + high * f_j + 0.5 * h_i**2 * k[i, i]
                + 0.5 * high**2 * k[j, j] + s * high * h_i * k[i, j]
            )
            if obj_low < obj_high - 1e-12:
                a_j_new = low
            elif obj_high < obj_low - 1e-12:
                a_j_new = high
            else:
                return False
        if abs(a_j_new - a_j) < 1e-12 * (a_j_new + a_j + 1e-12):
            return False
        a_i_new = a_i + s * (a_j - a_j_new)

        d_i = a_i_new - a_i
        d_j = a_j_new - a_j
        b1 = bias - e_i - y_i * d_i * k[i, i] - y_j * d_j * k[i, j]
        b2 = bias - e_j - y_i * d_i * k[i, j] - y_j * d_j * k[j, j]
        if 0.0 < a_i_new < c:
            new_bias = b1
        elif 0.0 < a_j_new < c:
            new_bias = b2
        else:
            new_bias = 0.5 * (b1 + b2)

        alphas[i] = a_i_new
        alphas[j] = a_j_new
        errors[:] += y_i * d_i * k[i] + y_j * d_j * k[j] + (new_bias - bias)
        bias = new_bias
        steps += 1
        assert abs(alphas @ y) <= 1e-8
        if objective_trace is not None:
            objective_trace.append(_dual_objective(alphas, y, k))
        return True

    def examine(i: int) -> bool:
        r = errors[i] * y[i]
        if not ((r < -tol and alphas[i] < c) or (r > tol and alphas[i] > 0)):
            return False
        non_bound = np.flatnonzero((alphas > 0) & (alphas < c))
        if len(non_bound) > 1:
            j = int(non_bound[np.argmax(np.abs(errors[i] - errors[non_bound]))])
            if take_step(i, j):
                return True
        if len(non_bound) > 0:
            start = rng.integers(len(non_bound))
            for j in np.roll(non_bound, -start):
                if take_step(i, int(j)):
                    return True
        start = rng.integers(n)
        for j in range(n):
            if take_step(i, (j + start) % n):
                return True
        return False

    quiet_sweeps = 0
    while quiet_sweeps < max_passes:
        changed = 0
        for i in range(n):
            changed += examine(i)
            if steps >= HARD_ITERATION_CAP:
                converged = False
                break
        if not converged:
            break
        quiet_sweeps = quiet_sweeps + 1 if changed == 0 else 0

    # final bias: average over margin support vectors, else the midpoint of
    # the interval the KKT inequalities leave for it
    g = (alphas * y) @ k  # decision values without bias
    margin = (alphas > 1e-8) & (alphas < c - 1e-8)
    if margin.any():
        bias = float(np.mean(y[margin] - g[margin]))
    else:
        lower, upper = [], []
        at_zero, at_c = alphas <= 1e-8, alphas >= c - 1e-8
        lower.extend(1.0 - g[at_zero & (y > 0)])
        lower.extend(-1.0 - g[at_c & (y < 0)])
        upper.extend(-1.0 - g[at_zero & (y < 0)])
        upper.extend(1.0 - g[at_c & (y > 0)])
        lo = max(lower) if lower else None
        hi = min(upper) if upper else None
        if lo is not None and hi is not None:
            bias = 0.5 * (lo + hi)
        else:
            bias = lo if lo is not None else (hi if hi is not None else bias)

    keep = alphas > 0
    return SvmModel(
        support_vectors=x[keep].copy(),
        alphas=alphas[keep].copy(),
        sv_targets=y[keep].copy(),
        bias=float(bias),
        gamma=gamma,
        c=c,
        converged=converged,
    )


def decision_value(model: SvmModel, x: np.ndarray) -> float:
    """sum_i alpha_i y_i K(sv_i, x) + bias."""
    if len(model.alphas) == 0:
        return model.bias
    x = np.asarray(x, dtype=float).reshape(1, -1)
    kx = _kernel_matrix(model.support_vectors, x, model.gamma)[:, 0]
    return float((model.alphas * model.sv_targets) @ kx + model.bias)


def predict_svm(model: SvmModel, x: np.ndarray) -> Label:
    return Label.BANKRUPT if decision_value(model, x) >= 0.0 else Label.NON_BANKRUPT


C_GRID = (0.1, 1.0, 10.0, 100.0)
GAMMA_GRID = (0.01, 0.1, 0.5, 1.0, 2.0)


@dataclass(frozen=True)
class GridCell:
    c: float
    gamma: float
    mean_cv_accuracy: float
    error: Optional[str] = None


@dataclass(frozen=True)
class GridSearchResult:
    best_c: float
    best_gamma: float
    table: tuple[GridCell, ...]


def grid_search(
    m: EncodedMatrix,
    c_grid: tuple[float, ...] = C_GRID,
    gamma_grid: tuple[float, ...] = GAMMA_GRID,
    k: int = 10,
    seed: int = 0,
) -> GridSearchResult:
    """Mean stratified k-fold CV accuracy for every (c, gamma) cell.

    Fold assignment comes from the evaluation module and is shared by all
    cells; each cell's SMO run gets a seed derived from the master seed, so
    cells may be evaluated in any order (or concurrently) with identical
    results. Ties break toward smaller c, then smaller gamma.
    """
    from .evaluation import stratified_fold_indices

    folds = stratified_fold_indices(m.y, k, seed)
    all_idx = np.arange(m.n)
    cells = []
    for idx, (c, gamma) in enumerate((c, g) for c in c_grid for g in gamma_grid):
        cell_seed = seed + 7919 * (idx + 1)
        try:
            fold_acc = []
            for fold in folds:
                train_idx = np.setdiff1d(all_idx, fold)
                sub = EncodedMatrix(
                    x=m.x[train_idx], y=m.y[train_idx], feature_names=m.feature_names
                )
                model = smo_train(sub, c=c, gamma=gamma, seed=cell_seed)
                hits = sum(predict_svm(model, m.x[i]).encoded == m.y[i] for i in fold)
                fold_acc.append(hits / len(fold))
            cells.append(GridCell(c=c, gamma=gamma, mean_cv_accuracy=float(np.mean(fold_acc))))
        except Exception as exc:  # record the failure, keep scanning
            cells.append(GridCell(c=c, gamma=gamma, mean_cv_accuracy=0.0, error=str(exc)))

    best = max(cells, key=lambda cell: (cell.mean_cv_accuracy, -cell.c, -cell.gamma))
    return GridSearchResult(best_c=best.c, best_gamma=best.gamma, table=tuple(cells))


def format_grid_table(result: GridSearchResult) -> str:
    """Tab-delimited (c, gamma, mean_accuracy) rows for external plotting."""
    lines = ["c\tgamma\tmean_accuracy"]
    for cell in result.table:
        lines.append(f"{cell.c:g}\t{cell.gamma:g}\t{cell.mean_cv_accuracy:.6f}")
    return "\n".join(lines) + "\n"
