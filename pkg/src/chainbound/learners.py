"""Binary base classifiers trained by empirical risk minimization.

Two hypothesis classes are provided. Threshold stumps admit an exact
minimizer of the weighted 0/1 loss: candidate thresholds are the midpoints
between consecutive distinct sorted feature values plus -inf/+inf
sentinels (the sentinels realize both constant predictors), and the sweep
below finds a global minimum over that finite grid. The logistic class is
a convex-surrogate approximation trained by plain gradient descent.

Per-example weights are part of the training contract: the Rademacher
estimator reuses ``train_erm`` with signed, reweighted targets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.exceptions import NotFittedError

from .validation import (
    as_feature_matrix,
    as_sign_vector,
    as_weight_vector,
)

LEARNER_KINDS = ("stump", "logistic")


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters for a single chain step's base learner."""

    learner_kind: str = "stump"
    max_iterations: int = 200
    learning_rate: float = 0.5
    l2_penalty: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.learner_kind not in LEARNER_KINDS:
            raise ValueError(f"learner_kind must be one of {LEARNER_KINDS}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if self.l2_penalty < 0:
            raise ValueError("l2_penalty must be non-negative")

    def to_json_dict(self) -> dict:
        return {
            "learner_kind": self.learner_kind,
            "max_iterations": self.max_iterations,
            "learning_rate": self.learning_rate,
            "l2_penalty": self.l2_penalty,
            "seed": self.seed,
        }

    @staticmethod
    def from_json_dict(obj: dict) -> "TrainConfig":
        return TrainConfig(
            learner_kind=obj["learner_kind"],
            max_iterations=int(obj["max_iterations"]),
            learning_rate=float(obj["learning_rate"]),
            l2_penalty=float(obj["l2_penalty"]),
            seed=int(obj["seed"]),
        )


class DecisionStump(BaseEstimator, ClassifierMixin):
    """Threshold stump; ``fit`` is an exact weighted 0/1-loss minimizer.

    A fitted stump predicts ``polarity_`` where the chosen feature exceeds
    ``threshold_`` and ``-polarity_`` otherwise. Ties in the sweep break
    deterministically: lowest feature index, then lowest threshold, then
    polarity +1 before -1.
    """

    def fit(self, X, y, sample_weight=None):
        X = as_feature_matrix(X)
        y = as_sign_vector(y)
        m, d = X.shape
        if y.shape[0] != m:
            raise ValueError("X and y must have equal length")
        if m < 1:
            raise ValueError("cannot fit on empty input")
        if sample_weight is None:
            sample_weight = np.ones(m)
        w = as_weight_vector(sample_weight, m, "sample_weight")

        best = None  # (error, feature, threshold, polarity)
        for j in range(d):
            order = np.argsort(X[:, j], kind="stable")
            xs = X[order, j]
            ys = y[order]
            ws = w[order]
            w_plus = np.concatenate([[0.0], np.cumsum(ws * (ys == 1))])
            w_minus = np.concatenate([[0.0], np.cumsum(ws * (ys == -1))])
            total_minus = w_minus[-1]
            total = w_plus[-1] + total_minus
            # Cut after the first i points (those fall on the <= threshold
            # side). err_plus is the weighted error of the polarity +1 stump.
            err_plus = w_plus + (total_minus - w_minus)
            err_minus = total - err_plus
            valid = np.ones(m + 1, dtype=bool)
            valid[1:m] = xs[1:] > xs[:-1]
            thresholds = np.empty(m + 1)
            thresholds[0] = -np.inf
            thresholds[m] = np.inf
            if m > 1:
                thresholds[1:m] = 0.5 * (xs[:-1] + xs[1:])
            # Candidates in threshold-ascending order, polarity +1 first.
            cand = np.stack([err_plus, err_minus], axis=1)[valid].reshape(-1)
            flat = int(np.argmin(cand))
            cut_idx = np.flatnonzero(valid)[flat // 2]
            err = float(cand[flat])
            if best is None or err < best[0]:
                best = (err, j, float(thresholds[cut_idx]), 1 if flat % 2 == 0 else -1)
        _, self.feature_, self.threshold_, self.polarity_ = best
        self.trained_width_ = d
        return self

    def predict(self, X):
        if not hasattr(self, "feature_"):
            raise NotFittedError("DecisionStump has not been fitted")
        X = as_feature_matrix(X)
        if X.shape[1] != self.trained_width_:
            raise ValueError(
                f"row width {X.shape[1]} does not match trained width {self.trained_width_}"
            )
        raw = np.where(X[:, self.feature_] > self.threshold_, 1, -1)
        return (raw * self.polarity_).astype(np.int64)


class LogisticBinary(BaseEstimator, ClassifierMixin):
    """Linear classifier trained by gradient descent on weighted logistic loss.

    Descent starts from the zero vector and runs exactly ``max_iterations``
    steps with a fixed learning rate; the L2 penalty applies to the weight
    vector, not the intercept. A score of exactly 0 predicts +1.
    """

    def __init__(self, max_iterations=200, learning_rate=0.5, l2_penalty=0.0):
        self.max_iterations = max_iterations
        self.learning_rate = learning_rate
        self.l2_penalty = l2_penalty

    def fit(self, X, y, sample_weight=None):
        X = as_feature_matrix(X)
        y = as_sign_vector(y)
        m, d = X.shape
        if y.shape[0] != m:
            raise ValueError("X and y must have equal length")
        if sample_weight is None:
            sample_weight = np.ones(m)
        w = as_weight_vector(sample_weight, m, "sample_weight")
        w = w / w.sum()

        coef = np.zeros(d)
        intercept = 0.0
        yf = y.astype(np.float64)
        for _ in range(int(self.max_iterations)):
            scores = X @ coef + intercept
            # sigmoid(-y * s), written with tanh for numerical stability
            g = 0.5 * (1.0 - np.tanh(0.5 * yf * scores))
            common = w * yf * g
            grad_coef = -(X.T @ common) + 2.0 * self.l2_penalty * coef
            grad_int = -common.sum()
            coef -= self.learning_rate * grad_coef
            intercept -= self.learning_rate * grad_int
        self.coef_ = coef
        self.intercept_ = float(intercept)
        self.trained_width_ = d
        return self

    def decision_function(self, X):
        if not hasattr(self, "coef_"):
            raise NotFittedError("LogisticBinary has not been fitted")
        X = as_feature_matrix(X)
        if X.shape[1] != self.trained_width_:
            raise ValueError(
                f"row width {X.shape[1]} does not match trained width {self.trained_width_}"
            )
        return X @ self.coef_ + self.intercept_

    def predict(self, X):
        scores = self.decision_function(X)
        return np.where(scores >= 0, 1, -1).astype(np.int64)


def train_erm(rows, targets, weights, config: TrainConfig):
    """Fit the configured learner on (rows, targets) with per-example weights."""
    rows = as_feature_matrix(rows, "rows")
    targets = as_sign_vector(targets, "targets")
    if rows.shape[0] != targets.shape[0]:
        raise ValueError("rows and targets must have equal length")
    if rows.shape[0] < 1:
        raise ValueError("cannot train on empty input")
    if weights is None:
        weights = np.ones(rows.shape[0])
    if config.learner_kind == "stump":
        model = DecisionStump()
    else:
        model = LogisticBinary(
            max_iterations=config.max_iterations,
            learning_rate=config.learning_rate,
            l2_penalty=config.l2_penalty,
        )
    return model.fit(rows, targets, sample_weight=weights)


def empirical_risk(model, rows, targets) -> float:
    """Unweighted 0/1 error rate of ``model`` on (rows, targets)."""
    rows = as_feature_matrix(rows, "rows")
    targets = as_sign_vector(targets, "targets")
    if rows.shape[0] != targets.shape[0]:
        raise ValueError("rows and targets must have equal length")
    if rows.shape[0] < 1:
        raise ValueError("empirical risk of an empty sample is undefined")
    preds = model.predict(rows)
    return float(np.mean(preds != targets))


def _encode_float(v: float):
    if np.isposinf(v):
        return "inf"
    if np.isneginf(v):
        return "-inf"
    return float(v)


def _decode_float(v) -> float:
    if v == "inf":
        return np.inf
    if v == "-inf":
        return -np.inf
    return float(v)


def model_to_json(model) -> dict:
    """JSON-ready dict; round-trips through ``model_from_json`` bit-exactly."""
    if isinstance(model, DecisionStump):
        return {
            "kind": "stump",
            "trained_width": int(model.trained_width_),
            "parameters": {
                "feature": int(model.feature_),
                "threshold": _encode_float(model.threshold_),
                "polarity": int(model.polarity_),
            },
        }
    if isinstance(model, LogisticBinary):
        return {
            "kind": "logistic",
            "trained_width": int(model.trained_width_),
            "parameters": {
                "weights": [float(v) for v in model.coef_],
                "intercept": float(model.intercept_),
            },
        }
    raise TypeError(f"cannot serialize model of type {type(model).__name__}")


def model_from_json(obj: dict):
    kind = obj["kind"]
    params = obj["parameters"]
    if kind == "stump":
        model = DecisionStump()
        model.feature_ = int(params["feature"])
        model.threshold_ = _decode_float(params["threshold"])
        model.polarity_ = int(params["polarity"])
        model.trained_width_ = int(obj["trained_width"])
        return model
    if kind == "logistic":
        model = LogisticBinary()
        model.coef_ = np.array(params["weights"], dtype=np.float64)
        model.intercept_ = float(params["intercept"])
        model.trained_width_ = int(obj["trained_width"])
        return model
    raise ValueError(f"unknown model kind {kind!r}")
