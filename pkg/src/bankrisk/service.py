"""HTTP prediction service for the decision-support UI.

Serves one immutable model loaded at startup. Request fields use the
lowercase keys ir, mr, ff, cr, co, opr ("opr" because "or" is reserved in
most languages; "or"/"OR" is accepted as an input alias). Invalid tokens get
a 400 with per-field messages; all endpoints except /healthz return 503
until a model is loaded.
"""

from __future__ import annotations

import hashlib
import io
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse

from .dataset import FIELD_KEYS, Record, load_dataset, parse_rating
from .errors import EmptyDataset, LineParseError, UnknownRating
from .evaluation import Predictor
from .persistence import (
    ModelArtifact,
    PredictionRow,
    artifact_bytes,
    export_predictions,
    load_model,
    model_from_artifact,
)
from .pipeline import predictor_for

_SERVICE_ALGORITHM_TAGS = {"naive_bayes": "nb"}  # artifact tag -> pipeline tag


class ModelHost:
    """The loaded artifact plus its ready-to-call predictor."""

    def __init__(self, artifact: ModelArtifact):
        self.artifact = artifact
        pipeline_tag = _SERVICE_ALGORITHM_TAGS.get(artifact.algorithm, artifact.algorithm)
        self.predictor: Predictor = predictor_for(
            pipeline_tag, model_from_artifact(artifact)
        )
        self.model_id = hashlib.sha256(artifact_bytes(artifact)).hexdigest()[:12]

    def predict_payload(self, record: Record) -> dict:
        label, score = self.predictor(record)
        return {
            "label": label.value,
            "score": score,
            "model_id": self.model_id,
            "algorithm": self.artifact.algorithm,
        }


def _field_alias(key: str) -> Optional[str]:
    lowered = key.strip().lower()
    if lowered == "or":
        return "opr"
    return lowered if lowered in FIELD_KEYS else None


def _record_from_body(body) -> tuple[Optional[Record], dict[str, str]]:
    """Validate a predict body; returns (record, field_errors)."""
    errors: dict[str, str] = {}
    if not isinstance(body, dict):
        return None, {"body": "expected a JSON object with the six rating fields"}
    values: dict[str, str] = {}
    for key, value in body.items():
        field = _field_alias(str(key))
        if field is not None:
            values[field] = value
    ratings = {}
    for field in FIELD_KEYS:
        if field not in values:
            errors[field] = "missing rating"
            continue
        try:
            ratings[field] = parse_rating(str(values[field]))
        except UnknownRating:
            errors[field] = f"invalid rating {values[field]!r}; expected P, A, or N"
    if errors:
        return None, errors
    return Record(**ratings), {}


def create_app(
    artifact: Optional[ModelArtifact] = None,
    artifact_path: Optional[str] = None,
) -> FastAPI:
    if artifact is None and artifact_path is not None:
        artifact = load_model(artifact_path)
    host = ModelHost(artifact) if artifact is not None else None

    app = FastAPI(title="bankrisk prediction service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def no_model() -> JSONResponse:
        return JSONResponse({"error": "no model loaded"}, status_code=503)

    @app.get("/healthz")
    def healthz():
        if host is None:
            return no_model()
        return {"status": "ok", "model_id": host.model_id}

    @app.get("/api/model")
    def model_info():
        if host is None:
            return no_model()
        art = host.artifact
        summary = None
        if art.metrics_summary is not None:
            summary = {
                "accuracy": art.metrics_summary.accuracy,
                "tpr": art.metrics_summary.tpr,
                "fpr": art.metrics_summary.fpr,
                "precision": art.metrics_summary.precision,
            }
        return {
            "algorithm": art.algorithm,
            "hyperparameters": art.hyperparameters,
            "training": art.training,
            "metrics_summary": summary,
            "format_version": art.format_version,
            "model_id": host.model_id,
        }

    @app.post("/api/predict")
    async def predict(request: Request):
        if host is None:
            return no_model()
        try:
            body = await request.json()
        except Exception:
            return JSONResponse({"errors": {"body": "invalid JSON"}}, status_code=400)
        record, errors = _record_from_body(body)
        if errors:
            return JSONResponse({"errors": errors}, status_code=400)
        return host.predict_payload(record)

    @app.post("/api/whatif")
    async def whatif(request: Request):
        if host is None:
            return no_model()
        try:
            body = await request.json()
        except Exception:
            return JSONResponse({"errors": {"body": "invalid JSON"}}, status_code=400)
        if not isinstance(body, dict):
            return JSONResponse(
                {"errors": {"body": "expected {base, feature}"}}, status_code=400
            )
        feature = _field_alias(str(body.get("feature", "")))
        if feature is None:
            return JSONResponse(
                {"errors": {"feature": f"unknown feature {body.get('feature')!r}"}},
                status_code=400,
            )
        record, errors = _record_from_body(body.get("base"))
        if errors:
            return JSONResponse({"errors": errors}, status_code=400)
        results = []
        for token in ("P", "A", "N"):
            varied = {key: getattr(record, key).value for key in FIELD_KEYS}
            varied[feature] = token
            probe, _ = _record_from_body(varied)
            results.append({"rating": token, "prediction": host.predict_payload(probe)})
        return {"feature": feature, "results": results}

    @app.post("/api/batch")
    async def batch(request: Request):
        if host is None:
            return no_model()
        payload = await request.body()
        if not payload.strip():
            return JSONResponse(
                {"errors": {"body": "empty batch; expected CSV rows"}}, status_code=400
            )
        try:
            dataset = load_dataset(payload, name="batch upload")
        except LineParseError as exc:
            return JSONResponse(
                {"errors": {"line": exc.line_number, "message": str(exc.cause)}},
                status_code=400,
            )
        except EmptyDataset:
            return JSONResponse(
                {"errors": {"body": "no parsable rows in batch"}}, status_code=400
            )
        rows = []
        hits = 0
        labeled = 0
        for record in dataset:
            label, score = host.predictor(record)
            rows.append(PredictionRow.from_record(record, label, score))
            if record.label is not None:
                labeled += 1
                hits += label is record.label
        buffer = io.StringIO()
        if labeled:
            error_percent = 100.0 * (1.0 - hits / labeled)
            buffer.write(f"# error_percent: {error_percent:.4f}\n")
        export_predictions(rows, buffer)
        return PlainTextResponse(buffer.getvalue(), media_type="text/csv")

    return app
