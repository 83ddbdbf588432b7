"""Proportional-odds ordinal regression over the 8 relevance classes.

The model keeps one weight vector w and ordered thresholds theta_0 <= ...
<= theta_6 on the latent score w.x:

    P(y <= j | x) = logistic(theta_j - w.x),   P(y <= 7) = 1

Class probabilities are differences of consecutive cumulative terms.
Fitting maximizes the L2-penalized log-likelihood in an unconstrained
parametrization (w, theta_0, s_1..s_6) with theta_j = theta_{j-1} +
exp(s_j), which keeps every iterate's thresholds strictly ordered.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import DegenerateLabelsError, NonFiniteError
from .features import FEATURE_NAMES, Relation, Standardizer

NUM_CLASSES = 8
NUM_THRESHOLDS = NUM_CLASSES - 1

ARGMAX = "argmax"
EXPECTED_ROUNDED = "expected-rounded"


def logistic(t):
    """Numerically stable 1 / (1 + exp(-t)), elementwise.

    Sign-split so neither branch exponentiates a large positive number;
    stable for |t| well beyond 1e3.
    """
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    pos = t >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-t[pos]))
    exp_t = np.exp(t[~pos])
    out[~pos] = exp_t / (1.0 + exp_t)
    if out.ndim == 0:
        return float(out)
    return out


def _log_sigmoid(t):
    return -np.logaddexp(0.0, -np.asarray(t, dtype=float))


@dataclass(frozen=True)
class FitConfig:
    """Optimizer settings; defaults give a deterministic penalized MLE."""

    reg_lambda: float = 1e-3
    max_iters: int = 500
    tol: float = 1e-6

    def to_dict(self) -> dict:
        return {"reg_lambda": self.reg_lambda, "max_iters": self.max_iters, "tol": self.tol}

    @classmethod
    def from_dict(cls, data: dict) -> "FitConfig":
        return cls(
            reg_lambda=float(data["reg_lambda"]),
            max_iters=int(data["max_iters"]),
            tol=float(data["tol"]),
        )


def thresholds_from_params(params: np.ndarray, n_features: int) -> np.ndarray:
    """Recover theta (7,) from the unconstrained parameter vector."""
    theta0 = params[n_features]
    s = params[n_features + 1:]
    return theta0 + np.concatenate(([0.0], np.cumsum(np.exp(s))))


def params_from_thresholds(w: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Inverse of thresholds_from_params; theta must be strictly increasing."""
    gaps = np.diff(theta)
    if np.any(gaps <= 0):
        raise ValueError("thresholds must be strictly increasing to parametrize")
    return np.concatenate([w, [theta[0]], np.log(gaps)])


def penalized_nll(params: np.ndarray, X: np.ndarray, y: np.ndarray,
                  reg_lambda: float) -> tuple[float, np.ndarray]:
    """Penalized negative log-likelihood and its analytic gradient.

    params is (w, theta_0, s_1..s_6); the L2 penalty reg_lambda/2 ||w||^2
    applies to the weights only. All pieces use log-space formulas so the
    value stays finite for extreme linear scores.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    n, p = X.shape
    w = params[:p]
    s = params[p + 1:]
    theta = thresholds_from_params(params, p)

    eta = X @ w
    hi_open = y == NUM_CLASSES - 1     # P(y <= 7) == 1, no upper threshold
    lo_open = y == 0                   # P(y <= -1) == 0, no lower threshold
    z_hi = np.where(hi_open, np.inf, theta[np.minimum(y, NUM_THRESHOLDS - 1)] - eta)
    z_lo = np.where(lo_open, -np.inf, theta[np.maximum(y - 1, 0)] - eta)

    log_p = np.empty(n)
    interior = ~hi_open & ~lo_open
    log_p[lo_open] = _log_sigmoid(z_hi[lo_open])
    log_p[hi_open] = _log_sigmoid(-z_lo[hi_open])
    if np.any(interior):
        zh, zl = z_hi[interior], z_lo[interior]
        with np.errstate(divide="ignore"):
            log_p[interior] = (
                _log_sigmoid(zh) + _log_sigmoid(-zl) + np.log1p(-np.exp(zl - zh))
            )

    value = float(-np.sum(log_p) + 0.5 * reg_lambda * np.dot(w, w))
    if not np.isfinite(value):
        grad = np.full_like(params, np.nan)
        return value, grad

    # ratio_hi = logistic'(z_hi) / P, computed as exp(log phi' - log P);
    # the derivative of log logistic(t) is logistic(t) * logistic(-t).
    ratio_hi = np.zeros(n)
    ratio_lo = np.zeros(n)
    closed_hi = ~hi_open
    closed_lo = ~lo_open
    ratio_hi[closed_hi] = np.exp(
        _log_sigmoid(z_hi[closed_hi]) + _log_sigmoid(-z_hi[closed_hi]) - log_p[closed_hi]
    )
    ratio_lo[closed_lo] = np.exp(
        _log_sigmoid(z_lo[closed_lo]) + _log_sigmoid(-z_lo[closed_lo]) - log_p[closed_lo]
    )

    # d NLL / d eta_i; threshold gradients accumulate per cut index.
    d_eta = ratio_hi - ratio_lo
    grad_w = X.T @ d_eta + reg_lambda * w

    d_theta = np.zeros(NUM_THRESHOLDS)
    np.add.at(d_theta, y[closed_hi], -ratio_hi[closed_hi])
    np.add.at(d_theta, y[closed_lo] - 1, ratio_lo[closed_lo])

    # theta_j = theta_0 + sum_{m<=j} exp(s_m): the theta_0 gradient sums all
    # cut gradients, each s_m collects the cuts at or above m.
    tail = np.cumsum(d_theta[::-1])[::-1]
    grad_theta0 = tail[0]
    grad_s = np.exp(s) * tail[1:]

    grad = np.concatenate([grad_w, [grad_theta0], grad_s])
    return value, grad


@dataclass(eq=False)
class OrdinalModel:
    """Fitted proportional-odds model; immutable in practice, safe to share."""

    w: np.ndarray
    theta: np.ndarray
    feature_names: tuple[str, ...] = FEATURE_NAMES
    standardizer: Standardizer | None = None
    relation: Relation | None = None
    fit_config: FitConfig = field(default_factory=FitConfig)

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=float)
        self.theta = np.asarray(self.theta, dtype=float)
        if self.theta.shape != (NUM_THRESHOLDS,):
            raise ValueError(f"expected {NUM_THRESHOLDS} thresholds, got {self.theta.shape}")
        if np.any(np.diff(self.theta) < 0):
            raise ValueError("thresholds must be nondecreasing")
        if len(self.feature_names) != self.w.shape[0]:
            raise ValueError("feature_names length must match weight vector length")

    def cumulative_prob(self, x, j: int) -> float:
        """P(y <= j | x) for a cut index j in 0..6."""
        if not 0 <= j <= NUM_THRESHOLDS - 1:
            raise IndexError(f"cut index must be in [0, {NUM_THRESHOLDS - 1}], got {j}")
        x = np.asarray(x, dtype=float)
        return float(logistic(self.theta[j] - np.dot(self.w, x)))

    def class_distribution(self, x) -> np.ndarray:
        """Probabilities of the 8 classes; nonnegative, sums to 1."""
        x = np.asarray(x, dtype=float)
        cum = logistic(self.theta - np.dot(self.w, x))
        return np.diff(np.concatenate(([0.0], cum, [1.0])))

    def predict(self, x, rule: str = ARGMAX) -> int:
        """Integer score 0..7; argmax ties resolve to the lower class."""
        probs = self.class_distribution(x)
        if rule == ARGMAX:
            return int(np.argmax(probs))
        if rule == EXPECTED_ROUNDED:
            expectation = float(np.dot(np.arange(NUM_CLASSES), probs))
            return int(np.clip(np.rint(expectation), 0, NUM_CLASSES - 1))
        raise ValueError(f"unknown prediction rule {rule!r}")

    def predict_many(self, X, rule: str = ARGMAX) -> list[int]:
        return [self.predict(x, rule) for x in np.asarray(X, dtype=float)]

    def feature_weights(self) -> list[tuple[str, float]]:
        """(name, weight) pairs in descending |weight| order."""
        order = sorted(range(len(self.w)), key=lambda i: (-abs(self.w[i]), i))
        return [(self.feature_names[i], float(self.w[i])) for i in order]


def initial_params(y: np.ndarray, n_features: int) -> np.ndarray:
    """Deterministic start: w = 0, cuts at empirical cumulative logits.

    Class counts are Laplace-smoothed so unobserved classes never yield an
    infinite logit; logits clamp to [-10, 10] and gaps floor at 1e-6 to
    keep the log-gap parametrization finite.
    """
    counts = np.bincount(y, minlength=NUM_CLASSES).astype(float) + 1.0
    cum = np.cumsum(counts)[:-1] / counts.sum()
    logits = np.clip(np.log(cum / (1.0 - cum)), -10.0, 10.0)
    gaps = np.maximum(np.diff(logits), 1e-6)
    theta = np.concatenate(([logits[0]], logits[0] + np.cumsum(gaps)))
    return params_from_thresholds(np.zeros(n_features), theta)


def fit(X, y, config: FitConfig | None = None, *,
        feature_names: tuple[str, ...] | None = None,
        standardizer: Standardizer | None = None,
        relation: Relation | None = None) -> OrdinalModel:
    """Fit the model on an already-standardized matrix.

    Deterministic: fixed initialization, no randomized steps; identical
    inputs produce bit-identical models.
    """
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
        penalized_nll,
        initial_params(y, p),
        args=(X, y, config.reg_lambda),
        method="L-BFGS-B",
        jac=True,
        options={"maxiter": config.max_iters, "gtol": config.tol, "ftol": 1e-14},
    )
    if not np.all(np.isfinite(result.x)) or not np.isfinite(result.fun):
        raise NonFiniteError("ordinal objective diverged; check feature scaling")

    theta = thresholds_from_params(result.x, p)
    return OrdinalModel(
        w=result.x[:p],
        theta=theta,
        feature_names=tuple(feature_names),
        standardizer=standardizer,
        relation=relation,
        fit_config=config,
    )
