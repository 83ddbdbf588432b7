"""Reference scorers the ordinal model is compared against.

Two baselines: a rule that gives full relevance to the first candidate
object mentioned in an entity's abstract and zero to everything else,
and an 8-way multinomial logistic classifier that ignores class order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.special import logsumexp

from .corpus import Corpus, first_mentioned
from .embeddings import normalize_key
from .errors import DegenerateLabelsError, NonFiniteError
from .features import FEATURE_NAMES, Relation, Standardizer, Triple
from .ordinal import NUM_CLASSES, FitConfig

FIRST_MATCH_SCORE = 7
FIRST_MISS_SCORE = 0


def first_baseline_score(corpus: Corpus, entity: str,
                         candidates: list[str]) -> dict[str, int]:
    """Score an entity's candidate objects by the first-mention rule.

    The candidate whose mention appears earliest in the entity's abstract
    gets 7; every other candidate gets 0, as does everything when no
    candidate is mentioned or the entity has no page record. Keys of the
    returned map are normalized candidate keys.
    """
    record = corpus.get(entity)
    first = first_mentioned(record, candidates) if record is not None else None
    return {
        key: FIRST_MATCH_SCORE if key == first else FIRST_MISS_SCORE
        for key in (normalize_key(c) for c in candidates)
    }


def first_baseline_predictions(corpus: Corpus, triples: list[Triple]) -> list[int]:
    """First-mention rule over a triple list, grouping candidates by entity."""
    objects_by_entity: dict[str, list[str]] = {}
    for triple in triples:
        objects_by_entity.setdefault(triple.entity_key, []).append(triple.object_key)
    scores = {
        entity: first_baseline_score(corpus, entity, candidates)
        for entity, candidates in objects_by_entity.items()
    }
    return [scores[t.entity_key][t.object_key] for t in triples]


def multinomial_nll(params: np.ndarray, X: np.ndarray, y: np.ndarray,
                    reg_lambda: float) -> tuple[float, np.ndarray]:
    """Penalized softmax negative log-likelihood with analytic gradient.

    params flattens W (8 x p) row-major followed by the 8 biases; the
    penalty reg_lambda/2 ||W||_F^2 leaves the biases unpenalized.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    n, p = X.shape
    W = params[:NUM_CLASSES * p].reshape(NUM_CLASSES, p)
    b = params[NUM_CLASSES * p:]

    logits = X @ W.T + b
    log_norm = logsumexp(logits, axis=1)
    value = float(
        -np.sum(logits[np.arange(n), y] - log_norm)
        + 0.5 * reg_lambda * np.sum(W * W)
    )

    probs = np.exp(logits - log_norm[:, None])
    probs[np.arange(n), y] -= 1.0
    grad_W = probs.T @ X + reg_lambda * W
    grad_b = probs.sum(axis=0)
    return value, np.concatenate([grad_W.ravel(), grad_b])


@dataclass(eq=False)
class MultinomialModel:
    """8-way softmax classifier sharing the ordinal model's interface."""

    W: np.ndarray
    b: np.ndarray
    feature_names: tuple[str, ...] = FEATURE_NAMES
    standardizer: Standardizer | None = None
    relation: Relation | None = None
    fit_config: FitConfig = field(default_factory=FitConfig)

    def __post_init__(self):
        self.W = np.asarray(self.W, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        if self.W.shape[0] != NUM_CLASSES or self.b.shape != (NUM_CLASSES,):
            raise ValueError(f"expected {NUM_CLASSES} rows of weights and biases")
        if len(self.feature_names) != self.W.shape[1]:
            raise ValueError("feature_names length must match weight columns")

    def class_distribution(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        logits = self.W @ x + self.b
        shifted = np.exp(logits - logits.max())
        return shifted / shifted.sum()

    def predict(self, x) -> int:
        """Argmax class; exact ties resolve to the lower class."""
        x = np.asarray(x, dtype=float)
        # softmax is order-preserving, so the logits decide the argmax
        return int(np.argmax(self.W @ x + self.b))

    def predict_many(self, X) -> list[int]:
        return [self.predict(x) for x in np.asarray(X, dtype=float)]


def fit_multinomial(X, y, config: FitConfig | None = None, *,
                    feature_names: tuple[str, ...] | None = None,
                    standardizer: Standardizer | None = None,
                    relation: Relation | None = None) -> MultinomialModel:
    """Deterministic penalized fit from a zero start."""
    config = config or FitConfig()
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("X must be a non-empty 2-d matrix")
    if y.shape != (X.shape[0],):
        raise ValueError("y length must match X rows")
    if np.any((y < 0) | (y >= NUM_CLASSES)):
        raise ValueError(f"labels must be integers in [0, {NUM_CLASSES - 1}]")
    if np.unique(y).size < 2:
        raise DegenerateLabelsError("training labels contain a single class")

    n, p = X.shape
    if feature_names is None:
        feature_names = FEATURE_NAMES if p == len(FEATURE_NAMES) else tuple(
            f"x{i}" for i in range(p)
        )

    result = minimize(
        multinomial_nll,
        np.zeros(NUM_CLASSES * p + NUM_CLASSES),
        args=(X, y, config.reg_lambda),
        method="L-BFGS-B",
        jac=True,
        options={"maxiter": config.max_iters, "gtol": config.tol, "ftol": 1e-14},
    )
    if not np.all(np.isfinite(result.x)) or not np.isfinite(result.fun):
        raise NonFiniteError("multinomial objective diverged; check feature scaling")

    return MultinomialModel(
        W=result.x[:NUM_CLASSES * p].reshape(NUM_CLASSES, p),
        b=result.x[NUM_CLASSES * p:],
        feature_names=tuple(feature_names),
        standardizer=standardizer,
        relation=relation,
        fit_config=config,
    )
