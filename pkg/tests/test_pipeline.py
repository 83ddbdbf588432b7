"""Pipeline glue: training, prediction, and the three-way CV comparison."""

import numpy as np
import pytest

from triplescore.baselines import MultinomialModel
from triplescore.errors import InputFormatError
from triplescore.evaluation import cross_validate
from triplescore.features import Relation, Triple, fit_standardizer
from triplescore.ordinal import EXPECTED_ROUNDED, FitConfig, OrdinalModel
from triplescore.pipeline import (
    CV_MODEL_TYPES,
    MODEL_FIRST,
    extract_matrix,
    make_trainer,
    predict_scores,
    run_cv_comparison,
    train_model,
    truth_labels,
)


class TestTruthLabels:
    def test_collects_scores(self, micro):
        labels = truth_labels(micro["triples"])
        assert labels.tolist() == [7, 5, 2, 0, 7, 4, 1, 3, 6, 0]

    def test_unscored_triple_rejected(self):
        triples = [Triple("a", Relation.PROFESSION, "x", 3),
                   Triple("a", Relation.PROFESSION, "y")]
        with pytest.raises(InputFormatError, match="no truth score"):
            truth_labels(triples)


class TestTrainAndPredict:
    def test_ordinal_standardizes_internally(self, micro):
        _, X = extract_matrix(micro["store"], micro["corpus"], micro["universe"],
                              micro["triples"])
        model = train_model(micro["triples"], X, relation=Relation.PROFESSION)
        assert isinstance(model, OrdinalModel)
        assert model.standardizer == fit_standardizer(X)
        # predict_scores standardizes with the model's own transform
        scores = predict_scores(model, X)
        manual = model.predict_many(model.standardizer.apply(X))
        assert scores == manual

    def test_multinomial_variant(self, micro):
        _, X = extract_matrix(micro["store"], micro["corpus"], micro["universe"],
                              micro["triples"])
        model = train_model(micro["triples"], X, model_type="multinomial")
        assert isinstance(model, MultinomialModel)
        assert all(0 <= s <= 7 for s in predict_scores(model, X))

    def test_unknown_model_type(self, micro):
        _, X = extract_matrix(micro["store"], micro["corpus"], micro["universe"],
                              micro["triples"])
        with pytest.raises(ValueError, match="model type"):
            train_model(micro["triples"], X, model_type="tree")

    def test_prediction_rule_passthrough(self, micro):
        _, X = extract_matrix(micro["store"], micro["corpus"], micro["universe"],
                              micro["triples"])
        model = train_model(micro["triples"], X)
        rounded = predict_scores(model, X, EXPECTED_ROUNDED)
        manual = model.predict_many(model.standardizer.apply(X), EXPECTED_ROUNDED)
        assert rounded == manual

    def test_predict_without_standardizer(self):
        model = OrdinalModel(w=np.array([1.0]), theta=np.linspace(-3, 3, 7),
                             feature_names=("x0",))
        assert predict_scores(model, np.array([[-99.0]])) == [0]
        assert predict_scores(model, np.array([[99.0]])) == [7]


class TestMakeTrainer:
    def test_first_needs_corpus(self):
        with pytest.raises(ValueError, match="corpus"):
            make_trainer(MODEL_FIRST)

    def test_first_ignores_features(self, micro):
        trainer = make_trainer(MODEL_FIRST, corpus=micro["corpus"])
        predict = trainer([], np.empty((0, 4)), np.empty(0, dtype=int))
        preds = predict(micro["triples"], np.zeros((10, 4)))
        assert preds == [7, 0, 0, 0, 7, 0, 0, 0, 0, 0]

    def test_model_trainer_standardizes_on_training_rows_only(self, micro):
        """Held-out rows must not leak into the feature scaling."""
        _, X = extract_matrix(micro["store"], micro["corpus"], micro["universe"],
                              micro["triples"])
        train_idx = [0, 1, 2, 3, 4, 5, 6]
        test_idx = [7, 8, 9]
        train_triples = [micro["triples"][i] for i in train_idx]
        test_triples = [micro["triples"][i] for i in test_idx]

        trainer = make_trainer("ordinal", fit_config=FitConfig(reg_lambda=0.1))
        predict = trainer(train_triples, X[train_idx], truth_labels(train_triples))
        got = predict(test_triples, X[test_idx])

        fold_std = fit_standardizer(X[train_idx])
        model = train_model(train_triples, X[train_idx],
                            fit_config=FitConfig(reg_lambda=0.1))
        assert model.standardizer == fold_std
        assert got == model.predict_many(fold_std.apply(X[test_idx]))

    def test_unknown_type(self):
        with pytest.raises(ValueError):
            make_trainer("nearest")


class TestRunCvComparison:
    def test_identical_folds_across_model_types(self, micro):
        _, X = extract_matrix(micro["store"], micro["corpus"], micro["universe"],
                              micro["triples"])
        results = run_cv_comparison(micro["triples"], X, micro["corpus"],
                                    folds=3, seed=5)
        assert set(results) == set(CV_MODEL_TYPES)
        fold_shapes = {
            name: [(r.n_triples, r.n_entities) for r in res.fold_reports]
            for name, res in results.items()
        }
        assert len(set(map(tuple, fold_shapes.values()))) == 1

    def test_matches_direct_cross_validate(self, micro):
        _, X = extract_matrix(micro["store"], micro["corpus"], micro["universe"],
                              micro["triples"])
        results = run_cv_comparison(micro["triples"], X, micro["corpus"],
                                    folds=3, seed=2)
        trainer = make_trainer(MODEL_FIRST, corpus=micro["corpus"])
        direct = cross_validate(micro["triples"], X, trainer, folds=3, seed=2)
        assert results[MODEL_FIRST].to_dict() == direct.to_dict()
