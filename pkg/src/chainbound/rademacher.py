"""Monte-Carlo estimation of the empirical Rademacher complexity of the
0/1-loss class over a (possibly augmented) sample.

The target quantity is ``E_sigma sup_f (2/m) |sum_i sigma_i 1{f(z_i) != y_i}|``
conditionally on the realized rows. Writing the 0/1 loss as
``(1 - y f) / 2`` turns the inner sum into ``A/2 - B(f)/2`` with
``A = sum_i sigma_i`` and ``B(f) = sum_i sigma_i y_i f(z_i)``, so the
supremum over the class is ``max(|A - B_min|, |A - B_max|) / m``. For the
threshold-stump class both polarities are present, making the class
sign-symmetric (``B_min = -B_max``), and the exact value reduces to
``(|A| + B_max) / m`` with ``B_max`` found by an exhaustive weighted sweep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .learners import TrainConfig, train_erm
from .validation import as_feature_matrix, as_sign_matrix, as_sign_vector

SUP_METHODS = ("exact_stump", "erm_surrogate", "exhaustive")


@dataclass(frozen=True)
class RademacherEstimate:
    mean: float
    std_error: float
    n_sigma: int
    sup_method: str

    def __post_init__(self):
        if not 0.0 <= self.mean <= 2.0:
            raise ValueError("mean must lie in [0, 2]")
        if self.std_error < 0.0:
            raise ValueError("std_error must be non-negative")
        if self.n_sigma < 1:
            raise ValueError("n_sigma must be >= 1")
        if self.sup_method not in SUP_METHODS:
            raise ValueError(f"sup_method must be one of {SUP_METHODS}")

    def to_json_dict(self) -> dict:
        return {
            "mean": self.mean,
            "std_error": self.std_error,
            "n_sigma": self.n_sigma,
            "sup_method": self.sup_method,
        }


def _stump_cut_info(X: np.ndarray):
    """Per-feature sort order and realizable cut positions (shared by draws).

    Cut i splits the sorted column after its first i values; cuts inside a
    run of equal values are not realizable by any threshold and are skipped.
    Cuts 0 and m are the -inf/+inf sentinels (the constant predictors).
    """
    m, d = X.shape
    info = []
    for j in range(d):
        order = np.argsort(X[:, j], kind="stable")
        xs = X[order, j]
        valid = np.ones(m + 1, dtype=bool)
        valid[1:m] = xs[1:] > xs[:-1]
        info.append((order, np.flatnonzero(valid)))
    return info


def _stump_b_max(W: np.ndarray, cut_info) -> np.ndarray:
    """max_f |sum_i w_i f(z_i)| over all stumps, for every weight row of W.

    A polarity +1 stump cutting after sorted position i correlates as
    W_tot - 2 * prefix_i; polarity -1 negates it, so the absolute value
    covers both.
    """
    n_draws = W.shape[0]
    w_tot = W.sum(axis=1)
    best = np.zeros(n_draws)
    zero = np.zeros((n_draws, 1))
    for order, cuts in cut_info:
        prefix = np.concatenate([zero, np.cumsum(W[:, order], axis=1)], axis=1)
        cand = np.abs(w_tot[:, None] - 2.0 * prefix[:, cuts])
        np.maximum(best, cand.max(axis=1), out=best)
    return best


def _check_inputs(rows, targets, sigma=None):
    rows = as_feature_matrix(rows, "rows")
    targets = as_sign_vector(targets, "targets")
    if rows.shape[0] != targets.shape[0]:
        raise ValueError("rows and targets must have equal length")
    if rows.shape[0] < 1:
        raise ValueError("empty input")
    if sigma is not None:
        sigma = as_sign_vector(sigma, "sigma")
        if sigma.shape[0] != rows.shape[0]:
            raise ValueError("sigma length must match rows")
    return rows, targets, sigma


def loss_correlation_sup(
    rows,
    targets,
    sigma,
    sup_method: str = "exact_stump",
    *,
    finite_class=None,
    surrogate_config: TrainConfig | None = None,
) -> float:
    """sup over the hypothesis class of (2/m) |sum_i sigma_i 1{f(z_i) != y_i}|.

    ``exact_stump`` takes the exact supremum over all threshold stumps.
    ``erm_surrogate`` lower-estimates the supremum over the surrogate
    learner's own class by training on the signed targets (once for each
    extreme of the correlation). ``exhaustive`` maximizes over an explicit
    finite class given as a (n_functions x m) prediction table (test use).
    """
    rows, targets, sigma = _check_inputs(rows, targets, sigma)
    m = rows.shape[0]
    a = float(sigma.sum())

    if sup_method == "exact_stump":
        b_max = float(_stump_b_max((sigma * targets).astype(np.float64).reshape(1, -1),
                                   _stump_cut_info(rows))[0])
        return (abs(a) + b_max) / m

    if sup_method == "erm_surrogate":
        config = surrogate_config or TrainConfig(learner_kind="logistic")
        w = (sigma * targets).astype(np.float64)
        signed = np.where(w >= 0, 1, -1)
        clf_hi = train_erm(rows, signed, None, config)
        b_hi = float(w @ clf_hi.predict(rows))
        clf_lo = train_erm(rows, -signed, None, config)
        b_lo = float(w @ clf_lo.predict(rows))
        return max(abs(a - b_lo), abs(a - b_hi)) / m

    if sup_method == "exhaustive":
        if finite_class is None:
            raise ValueError("exhaustive sup requires an explicit finite class")
        preds = as_sign_matrix(finite_class, "finite_class")
        if preds.shape[1] != m:
            raise ValueError("finite_class must be a (n_functions x m) sign table")
        losses = (1 - targets[None, :] * preds) / 2.0
        return float(np.max(np.abs(losses @ sigma)) * 2.0 / m)

    raise ValueError(f"sup_method must be one of {SUP_METHODS}")


def estimate_rademacher(
    rows,
    targets,
    n_sigma: int,
    seed: int,
    sup_method: str = "exact_stump",
    *,
    finite_class=None,
    surrogate_config: TrainConfig | None = None,
) -> RademacherEstimate:
    """Average of ``loss_correlation_sup`` over ``n_sigma`` uniform sign draws.

    Deterministic given the seed; draws are evaluated in a fixed order and
    the stump path is evaluated for all draws in one vectorized sweep.
    """
    rows, targets, _ = _check_inputs(rows, targets)
    if n_sigma < 1:
        raise ValueError("n_sigma must be >= 1")
    m = rows.shape[0]
    rng = np.random.default_rng(seed)
    sigmas = rng.integers(0, 2, size=(int(n_sigma), m)) * 2 - 1

    if sup_method == "exact_stump":
        w = (sigmas * targets[None, :]).astype(np.float64)
        b_max = _stump_b_max(w, _stump_cut_info(rows))
        values = (np.abs(sigmas.sum(axis=1)) + b_max) / m
    else:
        values = np.array(
            [
                loss_correlation_sup(
                    rows,
                    targets,
                    sigmas[t],
                    sup_method,
                    finite_class=finite_class,
                    surrogate_config=surrogate_config,
                )
                for t in range(int(n_sigma))
            ]
        )
    mean = float(values.mean())
    std_error = (
        float(values.std(ddof=1) / math.sqrt(n_sigma)) if n_sigma > 1 else 0.0
    )
    return RademacherEstimate(mean, std_error, int(n_sigma), sup_method)
