"""Chain-order selection driven by the estimated dependency coefficients.

Greedy strategies score only adjacent pairs, consistent with the Markov
assumption under which only adjacent-step dependence enters the
coefficients. Whether low or high adjacent dependence makes better chains
is an empirical question, so both greedy directions ship; the exhaustive
strategy minimizes the summed per-step bound over every permutation on a
held-out split (K <= 6).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .bound import BoundConfig, bound_chain
from .chain import fit_chain
from .dataset import MultiLabelDataset, split
from .dependency import estimate_transitions, rho
from .learners import TrainConfig
from .validation import require_permutation

STRATEGY_KINDS = (
    "identity",
    "random",
    "greedy_min_rho",
    "greedy_max_rho",
    "exhaustive_min_bound",
)

_EXHAUSTIVE_MAX_K = 6


@dataclass(frozen=True)
class OrderStrategy:
    """A chain-order proposal rule; kind-specific fields are validated.

    ``random`` needs a seed. ``exhaustive_min_bound`` needs delta and a
    seed (the seed fixes both the held-out split and the Rademacher draws
    so re-evaluation reproduces the selection exactly); its training
    config, split fraction, and bound knobs have defaults tuned for quick
    order scans.
    """

    kind: str
    seed: int | None = None
    delta: float | None = None
    train_config: TrainConfig | None = None
    train_fraction: float = 0.7
    n_exact: int = 12
    n_sigma: int = 50

    def __post_init__(self):
        if self.kind not in STRATEGY_KINDS:
            raise ValueError(f"kind must be one of {STRATEGY_KINDS}")
        if self.kind == "random":
            if self.seed is None:
                raise ValueError("random strategy requires a seed")
            if self.delta is not None:
                raise ValueError("random strategy takes no delta")
        elif self.kind == "exhaustive_min_bound":
            if self.seed is None or self.delta is None:
                raise ValueError("exhaustive_min_bound requires seed and delta")
            if not 0.0 < self.delta < 1.0:
                raise ValueError("delta must lie strictly inside (0, 1)")
        else:
            if self.seed is not None or self.delta is not None:
                raise ValueError(f"{self.kind} strategy takes neither seed nor delta")


def _marginal_entropy(column: np.ndarray) -> float:
    p = float(np.mean(column == 1))
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log(p) - (1.0 - p) * math.log(1.0 - p)


def _greedy(data: MultiLabelDataset, alpha: float, maximize: bool) -> tuple[int, ...]:
    k = data.n_labels
    entropies = [_marginal_entropy(data.label_column(j)) for j in range(k)]
    start = int(np.argmax(entropies))  # first max wins: lowest index on ties
    chosen = [start]
    remaining = [j for j in range(k) if j != start]
    while remaining:
        last = data.label_column(chosen[-1])
        best_j, best_score = None, None
        for j in remaining:  # ascending index: lowest index wins ties
            score = rho(estimate_transitions(last, data.label_column(j), alpha))
            if best_score is None or (score > best_score if maximize else score < best_score):
                best_j, best_score = j, score
        chosen.append(best_j)
        remaining.remove(best_j)
    return tuple(chosen)


def _bound_score(
    data: MultiLabelDataset, order: tuple[int, ...], strategy: OrderStrategy, alpha: float
) -> float:
    config = strategy.train_config or TrainConfig()
    train, test = split(data, strategy.train_fraction, strategy.seed)
    model = fit_chain(train, order, config)
    report = bound_chain(
        train,
        test,
        model,
        strategy.delta,
        BoundConfig(
            alpha=alpha,
            n_exact=strategy.n_exact,
            n_sigma=strategy.n_sigma,
            rademacher_seed=strategy.seed,
        ),
    )
    return float(sum(step.rhs for step in report.steps))


def propose_order(
    data: MultiLabelDataset, strategy: OrderStrategy, alpha: float = 1.0
) -> tuple[int, ...]:
    """Propose a chain order (0-based original label indices)."""
    k = data.n_labels
    if strategy.kind == "identity":
        return tuple(range(k))
    if strategy.kind == "random":
        return tuple(int(v) for v in np.random.default_rng(strategy.seed).permutation(k))
    if strategy.kind == "greedy_min_rho":
        return _greedy(data, alpha, maximize=False)
    if strategy.kind == "greedy_max_rho":
        return _greedy(data, alpha, maximize=True)
    # exhaustive_min_bound
    if k > _EXHAUSTIVE_MAX_K:
        raise ValueError(
            f"exhaustive_min_bound supports K <= {_EXHAUSTIVE_MAX_K}, got K={k}"
        )
    if k == 1:
        return (0,)
    best_order, best_score = None, None
    for perm in itertools.permutations(range(k)):  # lexicographic: first min wins ties
        score = _bound_score(data, perm, strategy, alpha)
        if best_score is None or score < best_score:
            best_order, best_score = perm, score
    return best_order


def compare_orders(
    data: MultiLabelDataset,
    orders,
    config: TrainConfig,
    delta: float,
    seed: int,
    *,
    alpha: float = 1.0,
    n_exact: int = 12,
    n_sigma: int = 200,
    train_fraction: float = 0.7,
) -> list[dict]:
    """Train one chain per order on a shared split and tabulate risks/bounds.

    Rows come back in the input order; identical orders give identical rows
    (everything is seeded).
    """
    orders = [require_permutation(o, data.n_labels) for o in orders]
    if not orders:
        raise ValueError("need at least one order to compare")
    train, test = split(data, train_fraction, seed)
    bound_config = BoundConfig(
        alpha=alpha, n_exact=n_exact, n_sigma=n_sigma, rademacher_seed=seed
    )
    rows = []
    for order in orders:
        model = fit_chain(train, order, config)
        report = bound_chain(train, test, model, delta, bound_config)
        test_risks = [step.test_risk for step in report.steps]
        rhs = [step.rhs for step in report.steps]
        rows.append(
            {
                "order": [int(v) for v in order],
                "per_step_test_risk": test_risks,
                "mean_test_risk": float(np.mean(test_risks)),
                "per_step_rhs": rhs,
                "mean_rhs": float(np.mean(rhs)),
            }
        )
    return rows
