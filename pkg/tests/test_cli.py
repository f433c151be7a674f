import json

import pytest

from bankrisk.cli import (
    EXIT_INPUT,
    EXIT_OK,
    build_parser,
    main,
)
from bankrisk.dataset import bundled_corpus_path


def run(argv):
    return main(argv)


def test_features_command_table_and_file(tmp_path, capsys):
    out_file = tmp_path / "features.tsv"
    assert run(["features", "--out", str(out_file)]) == EXIT_OK
    captured = capsys.readouterr().out
    assert "CO" in captured and "kept 6 of 6" in captured
    lines = out_file.read_text().splitlines()
    assert lines[0] == "feature\tclass_corr\tinfo_gain\tkept"
    assert len(lines) == 7
    assert all(line.endswith("\t1") for line in lines[1:])


def test_missing_data_file_exits_2(capsys):
    assert run(["features", "--data", "/nonexistent/corpus.csv"]) == EXIT_INPUT
    assert "/nonexistent/corpus.csv" in capsys.readouterr().err


def test_unknown_algorithm_exits_2():
    with pytest.raises(SystemExit) as err:
        run(["train", "--algorithm", "bogus"])
    assert err.value.code == 2


def test_train_and_predict_flow(tmp_path, capsys):
    model_path = tmp_path / "logistic.isvmodel"
    assert run(["train", "--algorithm", "logistic", "--model", str(model_path)]) == EXIT_OK
    assert model_path.exists()
    captured = capsys.readouterr().out
    assert "held-out test metrics" in captured

    out_csv = tmp_path / "scored.csv"
    assert run([
        "predict",
        "--model", str(model_path),
        "--input", str(bundled_corpus_path()),
        "--out", str(out_csv),
    ]) == EXIT_OK
    captured = capsys.readouterr().out
    assert "error prediction:" in captured
    assert len(out_csv.read_text().splitlines()) == 251


def test_train_twice_identical_modulo_timestamp(tmp_path):
    a = tmp_path / "a.isvmodel"
    b = tmp_path / "b.isvmodel"
    assert run(["train", "--algorithm", "nb", "--model", str(a)]) == EXIT_OK
    assert run(["train", "--algorithm", "nb", "--model", str(b)]) == EXIT_OK
    doc_a = json.loads(a.read_text())
    doc_b = json.loads(b.read_text())
    doc_a["training"].pop("timestamp")
    doc_b["training"].pop("timestamp")
    assert doc_a == doc_b


def test_predict_single_unlabeled_row(tmp_path, capsys):
    model_path = tmp_path / "nb.isvmodel"
    run(["train", "--algorithm", "nb", "--model", str(model_path)])
    input_csv = tmp_path / "one.csv"
    input_csv.write_text("N,N,N,N,N,N\n")
    out_csv = tmp_path / "one_scored.csv"
    capsys.readouterr()
    assert run([
        "predict", "--model", str(model_path), "--input", str(input_csv),
        "--out", str(out_csv),
    ]) == EXIT_OK
    lines = out_csv.read_text().splitlines()
    assert len(lines) == 2
    assert lines[1].split(",")[6] == "B"  # all-negative firm flagged as risk
    assert "error prediction" not in capsys.readouterr().out


def test_predict_all_negative_with_tuned_svm(tmp_path):
    model_path = tmp_path / "svm.isvmodel"
    assert run([
        "train", "--algorithm", "svm", "--model", str(model_path),
        "--c", "10", "--gamma", "0.5",
    ]) == EXIT_OK
    input_csv = tmp_path / "probe.csv"
    input_csv.write_text("N,N,N,N,N,N\nP,P,P,P,P,P\n")
    out_csv = tmp_path / "probe_scored.csv"
    assert run([
        "predict", "--model", str(model_path), "--input", str(input_csv),
        "--out", str(out_csv),
    ]) == EXIT_OK
    lines = out_csv.read_text().splitlines()
    assert lines[1].split(",")[6] == "B"
    assert lines[2].split(",")[6] == "NB"


def test_evaluate_command(capsys):
    assert run(["evaluate", "--algorithm", "nb", "--k", "5"]) == EXIT_OK
    captured = capsys.readouterr().out
    assert "5-fold CV" in captured
    assert "nb" in captured


def test_evaluate_heldout_mode(capsys):
    assert run(["evaluate", "--algorithm", "nb", "--k", "5", "--cv-mode", "heldout"]) == EXIT_OK
    assert "heldout mode" in capsys.readouterr().out


def test_parser_covers_all_commands():
    parser = build_parser()
    for command in ("features", "train", "evaluate", "reproduce", "predict", "serve"):
        assert command in parser.format_help()
