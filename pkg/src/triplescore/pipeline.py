"""End-to-end orchestration shared by the command-line layer and tests.

Every function here is a thin composition of library calls, so a CLI
command's output can be checked byte-for-byte against the same sequence
of library operations.
"""

from __future__ import annotations

import numpy as np

from .artifact import MODEL_MULTINOMIAL, MODEL_ORDINAL
from .baselines import MultinomialModel, first_baseline_predictions, fit_multinomial
from .corpus import Corpus
from .embeddings import EmbeddingStore
from .errors import InputFormatError
from .evaluation import CVResult, Trainer, cross_validate
from .features import (
    ObjectUniverse,
    Relation,
    Triple,
    extract,
    fit_standardizer,
    matrix,
)
from .ordinal import ARGMAX, FitConfig, OrdinalModel
from .ordinal import fit as fit_ordinal

MODEL_FIRST = "first"
CV_MODEL_TYPES = (MODEL_FIRST, MODEL_MULTINOMIAL, MODEL_ORDINAL)


def truth_labels(triples: list[Triple]) -> np.ndarray:
    """Ground-truth scores as an int array; every triple must carry one."""
    labels = []
    for t in triples:
        if t.truth is None:
            raise InputFormatError(
                f"triple {t.entity}/{t.object} has no truth score; "
                "training and evaluation need three-column rows"
            )
        labels.append(t.truth)
    return np.asarray(labels, dtype=int)


def extract_matrix(store: EmbeddingStore, corpus: Corpus, universe: ObjectUniverse,
                   triples: list[Triple], *, ops_denominator: str = "embedded",
                   max_workers: int = 1):
    """Feature vectors plus their (n, 4) matrix form."""
    vectors = extract(
        store, corpus, universe, triples,
        ops_denominator=ops_denominator, max_workers=max_workers,
    )
    return vectors, matrix(vectors)


def train_model(triples: list[Triple], X, *, model_type: str = MODEL_ORDINAL,
                fit_config: FitConfig | None = None,
                relation: Relation | None = None):
    """Standardize on the given rows, then fit the requested model."""
    y = truth_labels(triples)
    standardizer = fit_standardizer(X)
    X_std = standardizer.apply(X)
    if model_type == MODEL_ORDINAL:
        return fit_ordinal(X_std, y, fit_config, standardizer=standardizer,
                           relation=relation)
    if model_type == MODEL_MULTINOMIAL:
        return fit_multinomial(X_std, y, fit_config, standardizer=standardizer,
                               relation=relation)
    raise ValueError(f"unknown model type {model_type!r}")


def predict_scores(model: OrdinalModel | MultinomialModel, X,
                   rule: str = ARGMAX) -> list[int]:
    """Apply the model's own standardizer, then predict raw feature rows."""
    X = np.asarray(X, dtype=float)
    if model.standardizer is not None:
        X = model.standardizer.apply(X)
    if isinstance(model, OrdinalModel):
        return model.predict_many(X, rule)
    return model.predict_many(X)


def make_trainer(model_type: str, *, fit_config: FitConfig | None = None,
                 corpus: Corpus | None = None,
                 prediction_rule: str = ARGMAX) -> Trainer:
    """Trainer in the cross_validate calling convention.

    The rule baseline ignores features and labels entirely; the two
    learned models standardize on the training rows they are handed.
    """
    if model_type == MODEL_FIRST:
        if corpus is None:
            raise ValueError("the first-mention baseline needs the corpus")

        def first_trainer(train_triples, X_train, y_train):
            def predict(test_triples, X_test):
                return first_baseline_predictions(corpus, test_triples)
            return predict

        return first_trainer

    if model_type in (MODEL_ORDINAL, MODEL_MULTINOMIAL):

        def model_trainer(train_triples, X_train, y_train):
            model = train_model(
                train_triples, X_train, model_type=model_type, fit_config=fit_config
            )

            def predict(test_triples, X_test):
                return predict_scores(model, X_test, prediction_rule)
            return predict

        return model_trainer

    raise ValueError(f"unknown model type {model_type!r}")


def run_cv_comparison(triples: list[Triple], X, corpus: Corpus, *,
                      fit_config: FitConfig | None = None, folds: int = 5,
                      seed: int = 0, delta: int = 2, tau_variant: str = "b",
                      singleton_policy: str = "one",
                      prediction_rule: str = ARGMAX,
                      max_workers: int = 1) -> dict[str, CVResult]:
    """Cross-validate every model type on identical fold assignments.

    Fold splits depend only on the triples, fold count, and seed, so the
    three result sets are directly comparable.
    """
    results = {}
    for model_type in CV_MODEL_TYPES:
        trainer = make_trainer(
            model_type, fit_config=fit_config, corpus=corpus,
            prediction_rule=prediction_rule,
        )
        results[model_type] = cross_validate(
            triples, X, trainer, folds=folds, seed=seed, delta=delta,
            tau_variant=tau_variant, singleton_policy=singleton_policy,
            max_workers=max_workers,
        )
    return results
