import io
import itertools
import json

import pytest

from bankrisk.dataset import Label, Rating, Record, parse_record
from bankrisk.errors import (
    ArtifactParseError,
    InvariantViolation,
    UnsupportedAlgorithm,
    UnsupportedVersion,
)
from bankrisk.persistence import (
    FORMAT_VERSION,
    PredictionRow,
    artifact_bytes,
    artifact_from_model,
    dataset_hash,
    export_predictions,
    load_model,
    model_from_artifact,
    save_model,
)
from bankrisk.pipeline import fit_model, predictor_for

ALL_RECORDS = [
    Record(*combo) for combo in itertools.product(Rating, repeat=6)
]

TRAINING = {"dataset_hash": "f" * 64, "seed": 0, "timestamp": "2026-08-10T00:00:00+00:00"}


def roundtrip(algorithm, corpus, tmp_path):
    model = fit_model(algorithm, corpus, seed=0)
    artifact = artifact_from_model(model, algorithm, TRAINING)
    path = tmp_path / f"model.isvmodel"
    n = save_model(artifact, path)
    assert n == path.stat().st_size
    loaded = load_model(path)
    return model, model_from_artifact(loaded)


@pytest.mark.parametrize("algorithm", ["logistic", "nb", "forest", "mlp", "svm"])
def test_roundtrip_predictions_identical_on_all_729(algorithm, corpus, tmp_path):
    original, restored = roundtrip(algorithm, corpus, tmp_path)
    before = predictor_for(algorithm, original)
    after = predictor_for(algorithm, restored)
    for record in ALL_RECORDS:
        label_a, score_a = before(record)
        label_b, score_b = after(record)
        assert label_a is label_b
        assert score_a == score_b  # bit-identical: full-precision serialization


def test_save_model_to_file_object(corpus):
    model = fit_model("logistic", corpus)
    artifact = artifact_from_model(model, "logistic", TRAINING)
    sink = io.BytesIO()
    n = save_model(artifact, sink)
    assert n == len(sink.getvalue())
    assert load_model(sink.getvalue()).algorithm == "logistic"


def test_load_model_rejects_unknown_algorithm(corpus):
    model = fit_model("logistic", corpus)
    doc = json.loads(artifact_bytes(artifact_from_model(model, "logistic", TRAINING)))
    doc["algorithm"] = "perceptron-forest"
    with pytest.raises(UnsupportedAlgorithm):
        load_model(json.dumps(doc).encode())


def test_load_model_rejects_future_version(corpus):
    model = fit_model("logistic", corpus)
    doc = json.loads(artifact_bytes(artifact_from_model(model, "logistic", TRAINING)))
    doc["format_version"] = FORMAT_VERSION + 1
    with pytest.raises(UnsupportedVersion):
        load_model(json.dumps(doc).encode())


def test_load_model_truncated_document(corpus):
    model = fit_model("logistic", corpus)
    payload = artifact_bytes(artifact_from_model(model, "logistic", TRAINING))
    with pytest.raises(ArtifactParseError) as err:
        load_model(payload[: len(payload) // 2])
    assert "line" in str(err.value)


def test_load_model_tampered_nb_likelihoods(corpus):
    model = fit_model("nb", corpus)
    doc = json.loads(artifact_bytes(artifact_from_model(model, "nb", TRAINING)))
    doc["parameters"]["likelihoods"][0]["P"]["B"] += 0.2  # row now sums to 1.2
    with pytest.raises(InvariantViolation):
        load_model(json.dumps(doc).encode())


def test_load_model_svm_constraint_recheck(corpus):
    model = fit_model("svm", corpus, c=10.0, gamma=0.5)
    artifact = artifact_from_model(model, "svm", TRAINING)
    restored = model_from_artifact(load_model(artifact_bytes(artifact)))
    assert abs(float(restored.alphas @ restored.sv_targets)) <= 1e-8

    doc = json.loads(artifact_bytes(artifact))
    doc["parameters"]["alphas"][0] += 0.5  # breaks the equality constraint
    with pytest.raises(InvariantViolation):
        load_model(json.dumps(doc).encode())


def test_artifact_numeric_fidelity(corpus):
    model = fit_model("mlp", corpus, epochs=50)
    artifact = artifact_from_model(model, "mlp", TRAINING)
    restored = model_from_artifact(load_model(artifact_bytes(artifact)))
    assert (restored.w1 == model.w1).all()
    assert (restored.b1 == model.b1).all()
    assert (restored.w2 == model.w2).all()
    assert restored.b2 == model.b2


def test_dataset_hash_is_content_hash():
    assert dataset_hash(b"abc") == dataset_hash(b"abc")
    assert dataset_hash(b"abc") != dataset_hash(b"abd")
    assert len(dataset_hash(b"abc")) == 64


# --- prediction export -------------------------------------------------------------

def test_export_predictions_format():
    row = PredictionRow(
        ratings=parse_record("P,P,P,P,P,P").ratings(),
        predicted=Label.NON_BANKRUPT,
        score=0.031,
    )
    sink = io.StringIO()
    assert export_predictions([row], sink) == 1
    lines = sink.getvalue().splitlines()
    assert lines[0] == "IR,MR,FF,CR,CO,OR,Predicted,Score"
    assert lines[1] == "P,P,P,P,P,P,NB,0.031000"


def test_export_predictions_with_actual_column():
    record = parse_record("N,N,N,N,N,N,B")
    row = PredictionRow.from_record(record, Label.BANKRUPT, 0.987654321)
    sink = io.StringIO()
    export_predictions([row], sink)
    lines = sink.getvalue().splitlines()
    assert lines[0].endswith(",Actual")
    assert lines[1] == "N,N,N,N,N,N,B,0.987654,B"
    assert len(lines[0].split(",")) == 9


def test_export_predictions_corpus_line_count(corpus, tmp_path):
    rows = [
        PredictionRow.from_record(r, Label.BANKRUPT, 0.5) for r in corpus
    ]
    path = tmp_path / "predictions.csv"
    export_predictions(rows, path)
    assert len(path.read_text().splitlines()) == 251


def test_export_predictions_rows_reparse(corpus):
    from bankrisk.dataset import parse_record as reparse

    rows = [PredictionRow.from_record(r, Label.NON_BANKRUPT, 0.25) for r in corpus.records[:20]]
    sink = io.StringIO()
    export_predictions(rows, sink)
    for line, row in zip(sink.getvalue().splitlines()[1:], rows):
        rebuilt = reparse(",".join(line.split(",")[:6]))
        assert rebuilt.ratings() == row.ratings
