"""Per-step generalization bound assembly for a trained chain.

Each step's bound is the sum of the training risk, the two single-index
dependency terms (gamma_1 and rho, which coincide under the Markov plug-in
estimate but are carried as the two separate additive terms the bound
states), the Rademacher estimate of the 0/1-loss class, and a
concentration term sqrt(s * ln(1/delta) / (2 m^2)) whose aggregate s grows
with the gamma vector. With all dependency coefficients zero, s = m and
the concentration term collapses to the classical sqrt(ln(1/delta)/(2m)).

Bounds are reported per step and never aggregated across the chain; a
right-hand side at or above 1 carries no information for a [0,1] loss and
is flagged vacuous rather than clamped.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .chain import ClassifierChain
from .dataset import MultiLabelDataset
from .dependency import (
    DEFAULT_N_EXACT,
    DependencyCoefficients,
    coefficients_for_step,
    independent_coefficients,
)
from .rademacher import RademacherEstimate, estimate_rademacher
from .validation import SchemaMismatchError, require_fraction


@dataclass(frozen=True)
class BoundConfig:
    """Knobs for assembling per-step bounds over a fitted chain."""

    alpha: float = 1.0
    n_exact: int = DEFAULT_N_EXACT
    gamma_mode: str = "auto"
    n_sigma: int = 200
    sup_method: str | None = None  # None: exact_stump for stump chains, else surrogate
    rademacher_seed: int = 0

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be non-negative")
        if self.n_sigma < 1:
            raise ValueError("n_sigma must be >= 1")


@dataclass(frozen=True)
class BoundStep:
    """One assembled bound row (chain step k, original label label_index)."""

    step: int
    label_index: int
    empirical_risk: float
    test_risk: float | None
    rho: float
    gamma_1: float
    s: float
    rademacher: RademacherEstimate
    delta: float
    m: int
    concentration_term: float
    rhs: float
    vacuous: bool

    def to_json_dict(self) -> dict:
        return {
            "k": self.step,
            "label_index": self.label_index,
            "empirical_risk": self.empirical_risk,
            "test_risk": self.test_risk,
            "rho": self.rho,
            "gamma_1": self.gamma_1,
            "s": self.s,
            "rademacher": self.rademacher.to_json_dict(),
            "concentration_term": self.concentration_term,
            "rhs": self.rhs,
            "vacuous": self.vacuous,
        }


@dataclass(frozen=True)
class BoundReport:
    meta: dict
    steps: tuple[BoundStep, ...]

    def to_json_dict(self) -> dict:
        return {
            "meta": dict(self.meta),
            "steps": [step.to_json_dict() for step in self.steps],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2) + "\n"


def compute_bound(
    empirical_risk: float,
    coeffs: DependencyCoefficients,
    rad: RademacherEstimate,
    delta: float,
    m: int,
    *,
    test_risk: float | None = None,
    label_index: int = 0,
) -> BoundStep:
    """Assemble one bound row; pure arithmetic, no clamping of the RHS.

    gamma_1 is the single-index dependency value, which equals rho under
    the Markov plug-in estimation; both appear as separate additive terms.
    """
    delta = float(delta)
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie strictly inside (0, 1)")
    m = int(m)
    if m < 1:
        raise ValueError("m must be >= 1")
    if coeffs.m != m:
        raise ValueError(
            f"coefficients were computed for m={coeffs.m}, bound requested for m={m}"
        )
    empirical_risk = float(empirical_risk)
    concentration = math.sqrt(coeffs.s * math.log(1.0 / delta) / (2.0 * m * m))
    gamma_1 = coeffs.rho
    rhs = empirical_risk + gamma_1 + coeffs.rho + rad.mean + concentration
    return BoundStep(
        step=coeffs.step,
        label_index=label_index,
        empirical_risk=empirical_risk,
        test_risk=None if test_risk is None else float(test_risk),
        rho=coeffs.rho,
        gamma_1=gamma_1,
        s=coeffs.s,
        rademacher=rad,
        delta=delta,
        m=m,
        concentration_term=concentration,
        rhs=rhs,
        vacuous=rhs >= 1.0,
    )


def bound_chain(
    data_train: MultiLabelDataset,
    data_test: MultiLabelDataset,
    model: ClassifierChain,
    delta: float,
    config: BoundConfig = BoundConfig(),
) -> BoundReport:
    """Per-step bounds for a fitted chain, with test risks alongside.

    Empirical risks and the Rademacher estimates use the realized augmented
    training sample; coefficients come from the training labels (step 1
    takes the independence reduction). The test risk is a diagnostic gap
    column, not part of the bound.
    """
    model._check_fitted()
    if data_train.n_features != model.n_features_in_:
        raise SchemaMismatchError(
            f"train data has {data_train.n_features} features, model expects "
            f"{model.n_features_in_}"
        )
    if data_test.n_features != model.n_features_in_:
        raise SchemaMismatchError("test data width does not match the model")
    if data_train.n_labels != model.n_labels_ or data_test.n_labels != model.n_labels_:
        raise SchemaMismatchError("label count does not match the model")
    delta = float(delta)
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie strictly inside (0, 1)")

    sup_method = config.sup_method
    if sup_method is None:
        sup_method = "exact_stump" if model.learner == "stump" else "erm_surrogate"

    m = data_train.n_rows
    train_risks = model.step_risks(data_train.features, data_train.labels)
    test_risks = model.step_risks(data_test.features, data_test.labels)

    steps = []
    for pos in range(model.n_labels_):
        k = pos + 1
        label_idx = model.order_[pos]
        if k == 1:
            coeffs = independent_coefficients(1, m)
        else:
            coeffs = coefficients_for_step(
                data_train,
                model.order_,
                k,
                alpha=config.alpha,
                n_exact=config.n_exact,
                mode=config.gamma_mode,
            )
        aug = model.augmented_inputs(data_train.features, k)
        rad = estimate_rademacher(
            aug,
            data_train.label_column(label_idx),
            config.n_sigma,
            config.rademacher_seed + pos,
            sup_method,
            surrogate_config=model._config() if sup_method == "erm_surrogate" else None,
        )
        steps.append(
            compute_bound(
                float(train_risks[pos]),
                coeffs,
                rad,
                delta,
                m,
                test_risk=float(test_risks[pos]),
                label_index=label_idx,
            )
        )

    meta = {
        "m": m,
        "K": model.n_labels_,
        "order": [int(v) for v in model.order_],
        "delta": delta,
        "learner": model.learner,
        "alpha": config.alpha,
        "n_exact": config.n_exact,
        "gamma_mode": config.gamma_mode,
        "n_sigma": config.n_sigma,
        "sup_method": sup_method,
        "seeds": {"rademacher": config.rademacher_seed, "train": model.seed},
    }
    return BoundReport(meta=meta, steps=tuple(steps))
