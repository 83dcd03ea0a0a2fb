"""Sequential training and prediction for classifier chains.

Each step trains a binary classifier on the features augmented with all
previous steps' predictions, then appends the fitted classifier's own
training-set predictions as a new column for the next step. Prediction on
new rows replays the same augmentation. ``order`` maps chain position to
original label index; outputs are always re-permuted back to the original
label positions.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.exceptions import NotFittedError

from .dataset import MultiLabelDataset
from .learners import (
    TrainConfig,
    empirical_risk,
    model_from_json,
    model_to_json,
    train_erm,
)
from .validation import as_feature_matrix, as_sign_matrix, require_permutation


class ClassifierChain(BaseEstimator, ClassifierMixin):
    """Chain of binary learners over prediction-augmented inputs.

    Parameters
    ----------
    order : sequence of int or None
        Permutation of 0..K-1 mapping chain position to original label
        index; None means identity.
    learner : {"stump", "logistic"}
        Base learner trained at every step.
    max_iterations, learning_rate, l2_penalty : gradient-descent settings
        for the logistic learner (ignored by stumps).
    seed : int
        Recorded in the train config; both learners are deterministic.
    """

    def __init__(
        self,
        order=None,
        learner="stump",
        max_iterations=200,
        learning_rate=0.5,
        l2_penalty=0.0,
        seed=0,
    ):
        self.order = order
        self.learner = learner
        self.max_iterations = max_iterations
        self.learning_rate = learning_rate
        self.l2_penalty = l2_penalty
        self.seed = seed

    def _config(self) -> TrainConfig:
        return TrainConfig(
            learner_kind=self.learner,
            max_iterations=self.max_iterations,
            learning_rate=self.learning_rate,
            l2_penalty=self.l2_penalty,
            seed=self.seed,
        )

    def fit(self, X, Y):
        X = as_feature_matrix(X)
        Y = as_sign_matrix(Y)
        if X.shape[0] != Y.shape[0]:
            raise ValueError("X and Y must have the same row count")
        m, d = X.shape
        k_labels = Y.shape[1]
        order = (
            tuple(range(k_labels))
            if self.order is None
            else require_permutation(self.order, k_labels)
        )
        config = self._config()

        classifiers = []
        risks = []
        aug = X
        for pos, label_idx in enumerate(order):
            targets = Y[:, label_idx]
            try:
                clf = train_erm(aug, targets, None, config)
            except Exception as exc:
                raise type(exc)(f"training failed at chain step {pos + 1}: {exc}") from exc
            preds = clf.predict(aug)
            classifiers.append(clf)
            risks.append(float(np.mean(preds != targets)))
            if pos + 1 < k_labels:
                aug = np.hstack([aug, preds.reshape(-1, 1).astype(np.float64)])
        self.order_ = order
        self.classifiers_ = classifiers
        self.train_step_risks_ = np.array(risks)
        self.n_features_in_ = d
        self.n_labels_ = k_labels
        return self

    def _check_fitted(self):
        if not hasattr(self, "classifiers_"):
            raise NotFittedError("ClassifierChain has not been fitted")

    def _propagate(self, X) -> np.ndarray:
        """Chain-order predictions for each row of X (n x K)."""
        self._check_fitted()
        X = as_feature_matrix(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"row width {X.shape[1]} does not match trained width "
                f"{self.n_features_in_}"
            )
        preds = np.empty((X.shape[0], self.n_labels_), dtype=np.int64)
        aug = X
        for pos, clf in enumerate(self.classifiers_):
            preds[:, pos] = clf.predict(aug)
            if pos + 1 < self.n_labels_:
                aug = np.hstack([aug, preds[:, pos].reshape(-1, 1).astype(np.float64)])
        return preds

    def predict(self, X):
        """Sign predictions (n x K) in the original label column order."""
        chain_preds = self._propagate(X)
        out = np.empty_like(chain_preds)
        for pos, label_idx in enumerate(self.order_):
            out[:, label_idx] = chain_preds[:, pos]
        return out

    def step_risks(self, X, Y) -> np.ndarray:
        """Per-step 0/1 risk of classifier k against label order(k) on (X, Y),
        with predictions propagated through the chain on this data."""
        Y = as_sign_matrix(Y)
        chain_preds = self._propagate(X)
        if Y.shape != chain_preds.shape:
            raise ValueError("Y shape does not match the fitted label count")
        risks = np.empty(self.n_labels_)
        for pos, label_idx in enumerate(self.order_):
            risks[pos] = np.mean(chain_preds[:, pos] != Y[:, label_idx])
        return risks

    def augmented_inputs(self, X, step: int) -> np.ndarray:
        """The width d + step - 1 input matrix consumed at the given 1-based step."""
        self._check_fitted()
        if not 1 <= step <= self.n_labels_:
            raise ValueError(f"step must lie in 1..{self.n_labels_}")
        X = as_feature_matrix(X)
        chain_preds = self._propagate(X)
        return np.hstack(
            [X, chain_preds[:, : step - 1].astype(np.float64)]
        )


def fit_chain(data: MultiLabelDataset, order, config: TrainConfig) -> ClassifierChain:
    """Fit a chain on a dataset with the given order and train config."""
    model = ClassifierChain(
        order=tuple(order) if order is not None else None,
        learner=config.learner_kind,
        max_iterations=config.max_iterations,
        learning_rate=config.learning_rate,
        l2_penalty=config.l2_penalty,
        seed=config.seed,
    )
    return model.fit(data.features, data.labels)


def chain_to_json(model: ClassifierChain) -> dict:
    model._check_fitted()
    return {
        "order": [int(v) for v in model.order_],
        "train_config": model._config().to_json_dict(),
        "classifiers": [model_to_json(clf) for clf in model.classifiers_],
    }


def chain_from_json(obj: dict) -> ClassifierChain:
    config = TrainConfig.from_json_dict(obj["train_config"])
    order = tuple(int(v) for v in obj["order"])
    model = ClassifierChain(
        order=order,
        learner=config.learner_kind,
        max_iterations=config.max_iterations,
        learning_rate=config.learning_rate,
        l2_penalty=config.l2_penalty,
        seed=config.seed,
    )
    classifiers = [model_from_json(c) for c in obj["classifiers"]]
    if not classifiers:
        raise ValueError("chain JSON contains no classifiers")
    model.order_ = require_permutation(order, len(order))
    model.classifiers_ = classifiers
    model.n_labels_ = len(classifiers)
    model.n_features_in_ = classifiers[0].trained_width_
    for pos, clf in enumerate(classifiers):
        if clf.trained_width_ != model.n_features_in_ + pos:
            raise ValueError(f"classifier at step {pos + 1} has inconsistent width")
    return model
