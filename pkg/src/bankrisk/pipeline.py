"""Uniform training/prediction interface over the five classifiers.

A Trainer fits on a Dataset and returns a Predictor mapping a Record to
(label, score). Scores are the bankrupt-class probability for logistic, MLP
and naive Bayes, the vote fraction for the forest, and the raw decision
value for the SVM.
"""

from __future__ import annotations

from .dataset import Dataset, Label, Record, encode
from .evaluation import Predictor, Trainer
from . import forest as forest_mod
from . import linear_models as lm
from . import neural
from . import svm as svm_mod

ALGORITHMS = ("logistic", "nb", "forest", "mlp", "svm")


def predictor_for(algorithm: str, model) -> Predictor:
    """Wrap a fitted model of the given algorithm as a Predictor."""
    if algorithm == "logistic":
        def predict(record: Record) -> tuple[Label, float]:
            p = lm.predict_logistic(model, record.encoded())
            return (Label.BANKRUPT if p >= 0.5 else Label.NON_BANKRUPT), p
    elif algorithm == "nb":
        def predict(record: Record) -> tuple[Label, float]:
            post = lm.predict_naive_bayes(model, record)
            p = post[Label.BANKRUPT]
            return (Label.BANKRUPT if p >= post[Label.NON_BANKRUPT] else Label.NON_BANKRUPT), p
    elif algorithm == "forest":
        def predict(record: Record) -> tuple[Label, float]:
            share = forest_mod.forest_votes(model, record.encoded())
            return (Label.BANKRUPT if share >= 0.5 else Label.NON_BANKRUPT), share
    elif algorithm == "mlp":
        def predict(record: Record) -> tuple[Label, float]:
            p = neural.mlp_forward(model, record.encoded())
            return (Label.BANKRUPT if p >= 0.5 else Label.NON_BANKRUPT), p
    elif algorithm == "svm":
        def predict(record: Record) -> tuple[Label, float]:
            value = svm_mod.decision_value(model, record.encoded())
            return (Label.BANKRUPT if value >= 0.0 else Label.NON_BANKRUPT), value
    else:
        raise ValueError(f"unknown algorithm: {algorithm!r}")
    return predict


def fit_model(algorithm: str, train: Dataset, seed: int = 0, **hyper):
    """Fit one algorithm on a dataset and return the raw model object."""
    if algorithm == "logistic":
        cfg = lm.LogisticConfig(**hyper) if hyper else lm.LogisticConfig()
        return lm.fit_logistic(encode(train), cfg)
    if algorithm == "nb":
        return lm.fit_naive_bayes(train, alpha=hyper.get("alpha", 1.0))
    if algorithm == "forest":
        cfg = forest_mod.ForestConfig(**hyper) if hyper else forest_mod.ForestConfig()
        return forest_mod.fit_forest(encode(train), cfg, seed=seed)
    if algorithm == "mlp":
        base = dict(hyper)
        base.setdefault("seed", seed)
        return neural.fit_mlp(encode(train), neural.MlpConfig(**base))
    if algorithm == "svm":
        params = {"c": 1.0, "gamma": 1.0 / 6.0}
        params.update(hyper)
        return svm_mod.smo_train(encode(train), seed=seed, **params)
    raise ValueError(f"unknown algorithm: {algorithm!r}")


def make_trainer(algorithm: str, seed: int = 0, **hyper) -> Trainer:
    def train(d: Dataset) -> Predictor:
        return predictor_for(algorithm, fit_model(algorithm, d, seed=seed, **hyper))
    return train


def tuned_svm_params(train: Dataset, k: int = 10, seed: int = 0) -> tuple[float, float, "svm_mod.GridSearchResult"]:
    """Grid-search (c, gamma) on the dataset; returns best pair + full table."""
    result = svm_mod.grid_search(encode(train), k=k, seed=seed)
    return result.best_c, result.best_gamma, result
