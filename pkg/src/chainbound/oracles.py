"""Brute-force reference implementations for tests and acceptance runs.

Nothing here is used by production paths, and nothing here shares
estimation logic with them: product measures are materialized outcome by
outcome via Kronecker products, and the Rademacher expectation enumerates
every sign vector against an explicit function table. Sizes are hard
capped so the oracles stay obviously correct and fast, not scalable.
"""

from __future__ import annotations

import numpy as np

from .dependency import TransitionTable
from .validation import as_feature_matrix, as_sign_matrix, as_sign_vector

MAX_JOINT_VARS = 16
MAX_RADEMACHER_M = 12


class ExplicitJoint:
    """A fully materialized distribution over n binary variables (n <= 16)."""

    def __init__(self, n: int, probabilities):
        n = int(n)
        if not 0 <= n <= MAX_JOINT_VARS:
            raise ValueError(f"n must lie in 0..{MAX_JOINT_VARS}")
        probs = np.asarray(probabilities, dtype=np.float64)
        if probs.shape != (2**n,):
            raise ValueError(f"need 2^{n} probabilities, got shape {probs.shape}")
        if (probs < 0).any():
            raise ValueError("probabilities must be non-negative")
        if abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError("probabilities must sum to 1 within 1e-12")
        self.n = n
        self.probabilities = probs.copy()
        self.probabilities.setflags(write=False)


def brute_force_tv(p: ExplicitJoint, q: ExplicitJoint) -> float:
    """Sum over all 2^n outcomes of |p - q| (sum-form total variation)."""
    if p.n != q.n:
        raise ValueError(f"dimension mismatch: {p.n} vs {q.n}")
    return float(np.abs(p.probabilities - q.probabilities).sum())


def materialize_product(
    table: TransitionTable, prev_assignment
) -> tuple[ExplicitJoint, ExplicitJoint]:
    """Materialize the conditional and marginal product measures explicitly.

    ``prev_assignment`` is a sign vector of previous labels, one per
    coordinate; coordinate j of the conditional product uses the table row
    for its own previous label, the marginal product repeats the marginal.
    An empty assignment gives the two empty products (each the unit mass on
    the empty outcome).
    """
    assignment = [int(v) for v in prev_assignment]
    if any(v not in (-1, 1) for v in assignment):
        raise ValueError("prev_assignment entries must be -1 or +1")
    if len(assignment) > MAX_JOINT_VARS:
        raise ValueError(f"assignment length must be <= {MAX_JOINT_VARS}")
    cond = np.array([1.0])
    marg = np.array([1.0])
    for prev in assignment:
        cond = np.kron(cond, table.row(prev))
        marg = np.kron(marg, table.marginal)
    n = len(assignment)
    return ExplicitJoint(n, cond), ExplicitJoint(n, marg)


def enumerate_stump_predictions(rows) -> np.ndarray:
    """Prediction table of the full threshold-stump grid on the given rows.

    Thresholds are the midpoints between consecutive distinct sorted values
    of each feature plus the -inf/+inf sentinels, each with both
    polarities; one row of the table per stump.
    """
    X = as_feature_matrix(rows, "rows")
    m, d = X.shape
    preds = []
    for j in range(d):
        values = np.unique(X[:, j])
        thresholds = np.concatenate(
            [[-np.inf], (values[:-1] + values[1:]) / 2.0, [np.inf]]
        )
        for thr in thresholds:
            base = np.where(X[:, j] > thr, 1, -1)
            preds.append(base)
            preds.append(-base)
    return np.array(preds, dtype=np.int64)


def exhaustive_rademacher(rows, targets, finite_class) -> float:
    """Exact Rademacher expectation of the 0/1-loss class by enumerating all
    2^m sign vectors and every function in the explicit class table."""
    X = as_feature_matrix(rows, "rows")
    y = as_sign_vector(targets, "targets")
    m = X.shape[0]
    if y.shape[0] != m:
        raise ValueError("rows and targets must have equal length")
    if m > MAX_RADEMACHER_M:
        raise ValueError(f"exhaustive enumeration caps at m <= {MAX_RADEMACHER_M}")
    preds = as_sign_matrix(finite_class, "finite_class")
    if preds.shape[1] != m:
        raise ValueError("finite_class must be a (n_functions x m) sign table")
    losses = (1 - y[None, :] * preds) / 2.0
    codes = np.arange(2**m)
    sigmas = ((codes[:, None] >> np.arange(m)[None, :]) & 1) * 2 - 1
    per_sigma = np.max(np.abs(losses @ sigmas.T), axis=0) * 2.0 / m
    return float(per_sigma.mean())
