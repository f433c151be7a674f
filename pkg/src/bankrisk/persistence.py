"""Versioned model artifacts and the prediction CSV export.

Artifacts are JSON documents (extension .isvmodel) with a format_version,
the algorithm tag, hyperparameters, the full parameter payload, and training
provenance (corpus content hash, seed, timestamp). Floats serialize at full
shortest-round-trip precision, so a load reproduces every parameter exactly.
Files are written atomically (temp file + rename).
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Optional, Sequence, Union

import numpy as np

from .dataset import FEATURE_NAMES, Label, Rating, Record
from .errors import (
    ArtifactParseError,
    InvariantViolation,
    SinkWriteError,
    UnsupportedAlgorithm,
    UnsupportedVersion,
)
from .evaluation import Metrics
from .forest import ForestConfig, ForestModel, Leaf, Split, TreeNode
from .linear_models import LogisticConfig, LogisticModel, NaiveBayesModel
from .neural import MlpConfig, MlpModel
from .svm import SvmModel

FORMAT_VERSION = 1
MODEL_EXTENSION = ".isvmodel"
ALGORITHM_TAGS = ("logistic", "naive_bayes", "forest", "mlp", "svm")

# CLI/service tags to artifact tags ("nb" is the user-facing shorthand)
_TAG_ALIASES = {"nb": "naive_bayes"}


def canonical_tag(algorithm: str) -> str:
    return _TAG_ALIASES.get(algorithm, algorithm)


@dataclass(frozen=True)
class ModelArtifact:
    format_version: int
    algorithm: str
    hyperparameters: dict
    parameters: dict
    training: dict  # dataset_hash, seed, timestamp
    metrics_summary: Optional[Metrics] = None


def dataset_hash(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


# --- model object <-> parameter payload ------------------------------------

def _tree_to_doc(node: TreeNode) -> dict:
    if isinstance(node, Leaf):
        return {"leaf": {"label": node.label.value, "counts": list(node.class_counts)}}
    return {
        "split": {
            "feature": node.feature,
            "threshold": node.threshold,
            "left": _tree_to_doc(node.left),
            "right": _tree_to_doc(node.right),
        }
    }


def _tree_from_doc(doc: dict) -> TreeNode:
    if "leaf" in doc:
        leaf = doc["leaf"]
        return Leaf(label=Label(leaf["label"]), class_counts=tuple(leaf["counts"]))
    if "split" in doc:
        split = doc["split"]
        return Split(
            feature=int(split["feature"]),
            threshold=float(split["threshold"]),
            left=_tree_from_doc(split["left"]),
            right=_tree_from_doc(split["right"]),
        )
    raise ArtifactParseError("tree node is neither a leaf nor a split")


def artifact_from_model(
    model,
    algorithm: str,
    training: dict,
    metrics_summary: Optional[Metrics] = None,
) -> ModelArtifact:
    tag = canonical_tag(algorithm)
    if tag == "logistic":
        hyper = {
            "learning_rate": model.config.learning_rate,
            "l2_lambda": model.config.l2_lambda,
            "max_iters": model.config.max_iters,
            "tolerance": model.config.tolerance,
        }
        params = {"weights": model.weights.tolist(), "bias": model.bias}
    elif tag == "naive_bayes":
        hyper = {"alpha": model.alpha}
        params = {
            "priors": {lab.value: model.priors[lab] for lab in Label},
            "likelihoods": [
                {r.value: {lab.value: table[r][lab] for lab in Label} for r in Rating}
                for table in model.likelihoods
            ],
        }
    elif tag == "forest":
        hyper = {
            "n_trees": model.config.n_trees,
            "mtry": model.config.mtry,
            "bootstrap": model.config.bootstrap,
            "min_leaf": model.config.min_leaf,
            "max_depth": model.config.max_depth,
            "seed": model.seed,
        }
        params = {
            "trees": [_tree_to_doc(t) for t in model.trees],
            "oob_error": model.oob_error,
        }
    elif tag == "mlp":
        hyper = {
            "hidden": model.config.hidden,
            "learning_rate": model.config.learning_rate,
            "epochs": model.config.epochs,
            "seed": model.config.seed,
            "init_scale": model.config.init_scale,
        }
        params = {
            "w1": model.w1.tolist(),
            "b1": model.b1.tolist(),
            "w2": model.w2.tolist(),
            "b2": model.b2,
        }
    elif tag == "svm":
        hyper = {"c": model.c, "gamma": model.gamma}
        params = {
            "support_vectors": model.support_vectors.tolist(),
            "alphas": model.alphas.tolist(),
            "sv_targets": model.sv_targets.tolist(),
            "bias": model.bias,
            "converged": model.converged,
        }
    else:
        raise UnsupportedAlgorithm(algorithm)
    return ModelArtifact(
        format_version=FORMAT_VERSION,
        algorithm=tag,
        hyperparameters=hyper,
        parameters=params,
        training=training,
        metrics_summary=metrics_summary,
    )


def _require_finite(values, what: str):
    arr = np.asarray(values, dtype=float)
    if not np.isfinite(arr).all():
        raise InvariantViolation(f"{what} contains non-finite values")
    return arr


def model_from_artifact(artifact: ModelArtifact):
    """Rebuild the in-memory model, re-checking its stored invariants."""
    tag = artifact.algorithm
    hyper = artifact.hyperparameters
    params = artifact.parameters
    if tag == "logistic":
        weights = _require_finite(params["weights"], "logistic weights")
        bias = float(params["bias"])
        _require_finite([bias], "logistic bias")
        return LogisticModel(weights=weights, bias=bias, config=LogisticConfig(**hyper))
    if tag == "naive_bayes":
        priors = {Label(k): float(v) for k, v in params["priors"].items()}
        if abs(sum(priors.values()) - 1.0) > 1e-9:
            raise InvariantViolation("naive Bayes priors do not sum to 1")
        likelihoods = []
        for j, table_doc in enumerate(params["likelihoods"]):
            table = {
                Rating(r): {Label(lab): float(p) for lab, p in probs.items()}
                for r, probs in table_doc.items()
            }
            for lab in Label:
                total = sum(table[r][lab] for r in Rating)
                if abs(total - 1.0) > 1e-9:
                    raise InvariantViolation(
                        f"feature {j} likelihoods for {lab.value} sum to {total!r}, not 1"
                    )
            likelihoods.append(table)
        return NaiveBayesModel(
            priors=priors, likelihoods=tuple(likelihoods), alpha=float(hyper["alpha"])
        )
    if tag == "forest":
        trees = tuple(_tree_from_doc(doc) for doc in params["trees"])
        cfg = ForestConfig(**{k: v for k, v in hyper.items() if k != "seed"})
        if len(trees) != cfg.n_trees:
            raise InvariantViolation("tree count does not match n_trees")
        return ForestModel(
            trees=trees,
            config=cfg,
            seed=int(hyper.get("seed", 0)),
            oob_error=params.get("oob_error"),
        )
    if tag == "mlp":
        return MlpModel(
            w1=_require_finite(params["w1"], "mlp w1"),
            b1=_require_finite(params["b1"], "mlp b1"),
            w2=_require_finite(params["w2"], "mlp w2"),
            b2=float(params["b2"]),
            config=MlpConfig(**hyper),
        )
    if tag == "svm":
        alphas = _require_finite(params["alphas"], "svm alphas")
        targets = _require_finite(params["sv_targets"], "svm targets")
        c = float(hyper["c"])
        if len(alphas) and (alphas.min() <= 0 or alphas.max() > c * (1 + 1e-12)):
            raise InvariantViolation("svm multipliers outside (0, c]")
        if abs(float(alphas @ targets)) > 1e-8:
            raise InvariantViolation("svm multipliers violate the equality constraint")
        return SvmModel(
            support_vectors=_require_finite(params["support_vectors"], "svm vectors"),
            alphas=alphas,
            sv_targets=targets,
            bias=float(params["bias"]),
            gamma=float(hyper["gamma"]),
            c=c,
            converged=bool(params.get("converged", True)),
        )
    raise UnsupportedAlgorithm(tag)


# --- artifact <-> bytes ------------------------------------------------------

def _artifact_to_doc(artifact: ModelArtifact) -> dict:
    summary = None
    if artifact.metrics_summary is not None:
        summary = {
            name: getattr(artifact.metrics_summary, name) for name in Metrics.FIELDS
        }
    return {
        "format_version": artifact.format_version,
        "algorithm": artifact.algorithm,
        "hyperparameters": artifact.hyperparameters,
        "parameters": artifact.parameters,
        "training": artifact.training,
        "metrics_summary": summary,
    }


def artifact_bytes(artifact: ModelArtifact) -> bytes:
    return (json.dumps(_artifact_to_doc(artifact), indent=2) + "\n").encode("utf-8")


def save_model(artifact: ModelArtifact, sink: Union[str, Path, IO[bytes]]) -> int:
    """Serialize to a path (atomically) or a binary file-like; returns bytes
    written."""
    payload = artifact_bytes(artifact)
    try:
        if isinstance(sink, (str, Path)):
            path = Path(sink)
            fd, tmp = tempfile.mkstemp(dir=path.parent or ".", suffix=".tmp")
            try:
                with os.fdopen(fd, "wb") as fh:
                    fh.write(payload)
                os.replace(tmp, path)
            except BaseException:
                if os.path.exists(tmp):
                    os.unlink(tmp)
                raise
        else:
            sink.write(payload)
    except OSError as exc:
        raise SinkWriteError(str(exc)) from exc
    return len(payload)


def load_model(source: Union[str, Path, bytes, IO[bytes]]) -> ModelArtifact:
    if isinstance(source, (str, Path)):
        data = Path(source).read_bytes()
    elif isinstance(source, bytes):
        data = source
    else:
        data = source.read()
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        location = f"line {exc.lineno}, column {exc.colno}" if hasattr(exc, "lineno") else "byte stream"
        raise ArtifactParseError(f"invalid model document at {location}: {exc}") from exc
    if not isinstance(doc, dict) or "format_version" not in doc:
        raise ArtifactParseError("model document is missing format_version")
    version = doc["format_version"]
    if not isinstance(version, int) or version > FORMAT_VERSION or version < 1:
        raise UnsupportedVersion(version, FORMAT_VERSION)
    algorithm = doc.get("algorithm")
    if algorithm not in ALGORITHM_TAGS:
        raise UnsupportedAlgorithm(str(algorithm))
    summary_doc = doc.get("metrics_summary")
    summary = Metrics(**summary_doc) if summary_doc is not None else None
    try:
        artifact = ModelArtifact(
            format_version=version,
            algorithm=algorithm,
            hyperparameters=doc["hyperparameters"],
            parameters=doc["parameters"],
            training=doc["training"],
            metrics_summary=summary,
        )
    except KeyError as exc:
        raise ArtifactParseError(f"model document is missing section {exc}") from exc
    model_from_artifact(artifact)  # validates the payload invariants
    return artifact


# --- prediction export -------------------------------------------------------

@dataclass(frozen=True)
class PredictionRow:
    ratings: tuple[Rating, ...]  # six, in column order
    predicted: Label
    score: float
    actual: Optional[Label] = None

    @classmethod
    def from_record(cls, record: Record, predicted: Label, score: float) -> "PredictionRow":
        return cls(
            ratings=record.ratings(), predicted=predicted, score=score, actual=record.label
        )


def export_predictions(rows: Sequence[PredictionRow], sink: Union[str, Path, IO[str]]) -> int:
    """Write the prediction CSV; returns the number of data rows written.

    Header is IR,MR,FF,CR,CO,OR,Predicted,Score and gains an Actual column
    iff the first row carries an actual label. Scores print with 6 decimals.
    """
    if not rows:
        raise ValueError("nothing to export")
    with_actual = rows[0].actual is not None
    lines = [",".join(FEATURE_NAMES) + ",Predicted,Score" + (",Actual" if with_actual else "")]
    for row in rows:
        cells = [r.value for r in row.ratings]
        cells.append(row.predicted.value)
        cells.append(f"{row.score:.6f}")
        if with_actual:
            cells.append(row.actual.value if row.actual is not None else "")
        lines.append(",".join(cells))
    text = "\n".join(lines) + "\n"
    try:
        if isinstance(sink, (str, Path)):
            path = Path(sink)
            fd, tmp = tempfile.mkstemp(dir=path.parent or ".", suffix=".tmp")
            try:
                with os.fdopen(fd, "w", encoding="utf-8") as fh:
                    fh.write(text)
                os.replace(tmp, path)
            except BaseException:
                if os.path.exists(tmp):
                    os.unlink(tmp)
                raise
        else:
            sink.write(text)
    except OSError as exc:
        raise SinkWriteError(str(exc)) from exc
    return len(rows)
