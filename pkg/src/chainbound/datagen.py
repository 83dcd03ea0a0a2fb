"""Synthetic multi-label generators with a controlled Markov label chain.

Label 1 is Bernoulli, each later label is drawn from a 2x2 transition row
given its predecessor, and features carry signal about label 1 only (or
nothing), so downstream labels are predictable only through the chain.
The generator returns the exact pairwise transition tables alongside the
sample, so estimator tests always have the true kernel to compare against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import MultiLabelDataset
from .dependency import TransitionTable

FEATURE_MODELS = ("gaussian_per_label", "noise_only")


def symmetric_transition(dep: float) -> np.ndarray:
    """One-knob transition matrix trans[a][a] = (1 + dep) / 2.

    dep = 0 gives independence, dep = 1 a copy chain.
    """
    dep = float(dep)
    if not 0.0 <= dep <= 1.0:
        raise ValueError("dep must lie in [0, 1]")
    stay = (1.0 + dep) / 2.0
    return np.array([[stay, 1.0 - stay], [1.0 - stay, stay]])


@dataclass(frozen=True)
class GeneratorSpec:
    m: int
    d: int
    k: int
    transition_matrices: tuple
    first_marginal: float = 0.5
    feature_model: str = "gaussian_per_label"
    class_separation: float = 1.0
    label_noise: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.m < 1 or self.d < 1 or self.k < 1:
            raise ValueError("m, d, k must all be >= 1")
        mats = tuple(np.asarray(t, dtype=np.float64) for t in self.transition_matrices)
        if len(mats) != self.k - 1:
            raise ValueError(f"need {self.k - 1} transition matrices, got {len(mats)}")
        for t in mats:
            if t.shape != (2, 2) or (t < 0).any() or (t > 1).any():
                raise ValueError("transition matrices must be 2x2 with entries in [0,1]")
            if np.abs(t.sum(axis=1) - 1.0).max() > 1e-12:
                raise ValueError("transition rows must sum to 1 within 1e-12")
        object.__setattr__(self, "transition_matrices", mats)
        if not 0.0 <= self.first_marginal <= 1.0:
            raise ValueError("first_marginal must lie in [0, 1]")
        if self.feature_model not in FEATURE_MODELS:
            raise ValueError(f"feature_model must be one of {FEATURE_MODELS}")
        if self.class_separation < 0:
            raise ValueError("class_separation must be non-negative")
        if not 0.0 <= self.label_noise < 0.5:
            raise ValueError("label_noise must lie in [0, 0.5)")

    def to_json_dict(self) -> dict:
        return {
            "m": self.m,
            "d": self.d,
            "k": self.k,
            "transition_matrices": [t.tolist() for t in self.transition_matrices],
            "first_marginal": self.first_marginal,
            "feature_model": self.feature_model,
            "class_separation": self.class_separation,
            "label_noise": self.label_noise,
            "seed": self.seed,
        }


def symmetric_spec(
    m: int,
    d: int,
    k: int,
    dep: float,
    *,
    first_marginal: float = 0.5,
    class_separation: float = 1.0,
    label_noise: float = 0.0,
    seed: int = 0,
    feature_model: str = "gaussian_per_label",
) -> GeneratorSpec:
    """Spec with the same symmetric dependence strength at every step."""
    return GeneratorSpec(
        m=m,
        d=d,
        k=k,
        transition_matrices=tuple(symmetric_transition(dep) for _ in range(k - 1)),
        first_marginal=first_marginal,
        feature_model=feature_model,
        class_separation=class_separation,
        label_noise=label_noise,
        seed=seed,
    )


def _flip_kernel(noise: float) -> np.ndarray:
    return np.array([[1.0 - noise, noise], [noise, 1.0 - noise]])


def exact_marginals(spec: GeneratorSpec) -> np.ndarray:
    """Pre-noise label marginals (k x 2) by matrix propagation."""
    mu = np.empty((spec.k, 2))
    mu[0] = (1.0 - spec.first_marginal, spec.first_marginal)
    for j, t in enumerate(spec.transition_matrices):
        mu[j + 1] = mu[j] @ t
    return mu


def ground_truth_tables(spec: GeneratorSpec) -> list[TransitionTable]:
    """Exact post-noise pairwise kernels P(y~^(k) | y~^(k-1)) for k = 2..K.

    Independent flips on both endpoints turn the pre-noise joint
    mu_{k-1}[a0] * T[a0, b0] into a post-noise pair table; conditioning on
    the flipped previous label gives the kernel the estimators target.
    """
    mu = exact_marginals(spec)
    flip = _flip_kernel(spec.label_noise)
    tables = []
    for j, t in enumerate(spec.transition_matrices):
        joint = np.zeros((2, 2))
        for a0 in range(2):
            for b0 in range(2):
                joint += mu[j, a0] * t[a0, b0] * np.outer(flip[a0], flip[b0])
        marginal = joint.sum(axis=0)
        trans = np.empty((2, 2))
        for a in range(2):
            den = joint[a].sum()
            trans[a] = (0.5, 0.5) if den == 0 else joint[a] / den
        trans = trans / trans.sum(axis=1, keepdims=True)
        marginal = marginal / marginal.sum()
        tables.append(
            TransitionTable(trans, marginal, np.zeros((2, 2), dtype=np.int64), 0.0, j + 2)
        )
    return tables


def generate(spec: GeneratorSpec) -> tuple[MultiLabelDataset, list[TransitionTable]]:
    """Sample a dataset from the spec; deterministic given the seed.

    Draw order is fixed: the label chain column by column, then features,
    then the independent label flips. Features (gaussian_per_label) put a
    +-class_separation/2 mean shift on the first coordinate keyed to the
    pre-noise first label; the remaining coordinates are pure noise.
    """
    rng = np.random.default_rng(spec.seed)
    m, k = spec.m, spec.k
    labels = np.empty((m, k), dtype=np.int64)
    labels[:, 0] = np.where(rng.random(m) < spec.first_marginal, 1, -1)
    for j, t in enumerate(spec.transition_matrices):
        p_plus = t[(labels[:, j] + 1) // 2, 1]
        labels[:, j + 1] = np.where(rng.random(m) < p_plus, 1, -1)

    features = rng.standard_normal((m, spec.d))
    if spec.feature_model == "gaussian_per_label":
        features[:, 0] += labels[:, 0] * (spec.class_separation / 2.0)

    if spec.label_noise > 0:
        flips = rng.random((m, k)) < spec.label_noise
        labels = np.where(flips, -labels, labels)

    data = MultiLabelDataset(
        features,
        labels,
        tuple(f"x{j}" for j in range(spec.d)),
        tuple(f"y{j}" for j in range(k)),
    )
    return data, ground_truth_tables(spec)
