"""Label-dependency coefficients of a chain step under a Markov assumption.

A chain step k >= 2 is summarized by a 2x2 transition table
``trans[a][b] = P(y^(k)=b | y^(k-1)=a)`` together with the marginal
``P(y^(k))``, both estimated by (optionally smoothed) plug-in counts.
Dependence is measured by total variation in sum form,
``sum_y |p(y) - q(y)|``, which ranges over [0, 2]:

* ``rho``         -- the single-index distance between a conditional row and
                     the marginal, maximized over the previous label;
* ``gamma(n)``    -- the same comparison between the two *product* measures
                     over n coordinates, maximized over all 2^n assignments
                     of previous labels;
* ``s``           -- the aggregate sum_{l=1..m} (1 + 2m * gamma_{l+1})^2 that
                     scales the concentration term of the risk bound, where
                     gamma_l is indexed so that its index set {l+1..m} has
                     size m - l (gamma_m and gamma_{m+1} are empty, hence 0).

``gamma_exact`` sweeps every previous-label assignment. Because both
product measures factor per coordinate and the outcome sum is invariant
under coordinate permutations, assignments with the same number of
"previous label = +1" coordinates give identical values, so the sweep runs
over that count while still covering all 2^n assignments. ``gamma_upper``
is a certified relaxation via subadditivity of total variation over
product measures; it can only overestimate, which is the safe direction
for a quantity consumed as an upper bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import MultiLabelDataset
from .validation import as_sign_vector, require_permutation

SIGNS = (-1, 1)

DEFAULT_N_EXACT = 12

# Above this index-set size the assignment sweep in gamma_monte_carlo falls
# back to the per-coordinate maximizer (binomial factors overflow float64
# near n ~ 1000; the sweep cost also grows as n^2 per count).
_SWEEP_CAP = 512

GAMMA_MODES = ("exact", "upper_bound", "monte_carlo", "empty_set")


def _sign_index(v: int) -> int:
    return (v + 1) // 2


@dataclass(frozen=True)
class TransitionTable:
    """Empirical Markov kernel and marginal for one chain step.

    ``trans`` is row-stochastic with rows indexed by the previous label
    (index 0 is -1, index 1 is +1) and columns by the current label;
    ``marginal`` is the current label's distribution in the same column
    order. ``counts`` holds the raw pair counts the probabilities came from.
    """

    trans: np.ndarray
    marginal: np.ndarray
    counts: np.ndarray
    smoothing_alpha: float
    step: int | None = None

    def __post_init__(self):
        trans = np.asarray(self.trans, dtype=np.float64)
        marginal = np.asarray(self.marginal, dtype=np.float64)
        counts = np.asarray(self.counts, dtype=np.int64)
        if trans.shape != (2, 2) or marginal.shape != (2,) or counts.shape != (2, 2):
            raise ValueError("table requires 2x2 trans, length-2 marginal, 2x2 counts")
        if (trans < 0).any() or (trans > 1).any():
            raise ValueError("transition probabilities must lie in [0, 1]")
        if (marginal < 0).any() or (marginal > 1).any():
            raise ValueError("marginal probabilities must lie in [0, 1]")
        if np.abs(trans.sum(axis=1) - 1.0).max() > 1e-12:
            raise ValueError("transition rows must sum to 1 within 1e-12")
        if abs(marginal.sum() - 1.0) > 1e-12:
            raise ValueError("marginal must sum to 1 within 1e-12")
        if self.smoothing_alpha < 0:
            raise ValueError("smoothing_alpha must be non-negative")
        if self.step is not None and self.step < 2:
            raise ValueError("step must be >= 2 when given")
        for name, arr in (("trans", trans), ("marginal", marginal), ("counts", counts)):
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def row(self, prev: int) -> np.ndarray:
        """Conditional distribution of the current label given ``prev``."""
        if prev not in SIGNS:
            raise ValueError("prev must be -1 or +1")
        return self.trans[_sign_index(prev)]


def estimate_transitions(
    labels_prev, labels_curr, alpha: float, step: int | None = None
) -> TransitionTable:
    """Plug-in transition and marginal estimates with Laplace smoothing.

    ``trans[a][b] = (count(a->b) + alpha) / (count(a->.) + 2 alpha)``; a row
    whose denominator is zero falls back to (0.5, 0.5). The marginal uses
    ``(count(.=b) + alpha) / (m + 2 alpha)``.
    """
    prev = as_sign_vector(labels_prev, "labels_prev")
    curr = as_sign_vector(labels_curr, "labels_curr")
    if prev.shape[0] != curr.shape[0]:
        raise ValueError("labels_prev and labels_curr must have equal length")
    m = prev.shape[0]
    if m < 1:
        raise ValueError("need at least one label pair")
    alpha = float(alpha)
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    counts = np.zeros((2, 2), dtype=np.int64)
    np.add.at(counts, ((prev + 1) // 2, (curr + 1) // 2), 1)
    trans = np.empty((2, 2))
    for a in range(2):
        den = counts[a].sum() + 2.0 * alpha
        trans[a] = (0.5, 0.5) if den == 0 else (counts[a] + alpha) / den
    marginal = (counts.sum(axis=0) + alpha) / (m + 2.0 * alpha)
    return TransitionTable(trans, marginal, counts, alpha, step)


def per_index_tv(table: TransitionTable, prev: int) -> float:
    """Sum-form total variation between the ``prev`` row and the marginal."""
    return float(np.abs(table.row(prev) - table.marginal).sum())


def rho(table: TransitionTable) -> float:
    """Single-index dependency: the per-index distance maximized over the
    previous label (the conditioning collapses to it under the Markov
    assumption)."""
    return max(per_index_tv(table, -1), per_index_tv(table, 1))


def _tv_for_count(trans: np.ndarray, marginal: np.ndarray, n: int, c: int) -> float:
    """Sum-form TV between the n-coordinate product measures for any
    assignment with exactly ``c`` coordinates conditioned on +1.

    Outcomes are grouped by how many +1 current labels fall in each block
    (i among the c "+1-conditioned" coordinates, h among the rest), each
    group carrying its exact multiplicity C(c,i) * C(n-c,h).
    """
    row_pos, row_neg = trans[1], trans[0]
    i = np.arange(c + 1)
    h = np.arange(n - c + 1)
    a_p = row_pos[1] ** i * row_pos[0] ** (c - i)
    b_p = row_neg[1] ** h * row_neg[0] ** (n - c - h)
    a_q = marginal[1] ** i * marginal[0] ** (c - i)
    b_q = marginal[1] ** h * marginal[0] ** (n - c - h)
    comb_a = np.array([math.comb(c, int(v)) for v in i], dtype=np.float64)
    comb_b = np.array([math.comb(n - c, int(v)) for v in h], dtype=np.float64)
    diff = np.abs(np.outer(a_p, b_p) - np.outer(a_q, b_q))
    return float((np.outer(comb_a, comb_b) * diff).sum())


def gamma_exact(table: TransitionTable, n: int, n_exact: int = DEFAULT_N_EXACT) -> float:
    """Exact product-measure distance for index sets of size ``n``, maximized
    over all 2^n previous-label assignments. ``n = 0`` is the empty product
    (identical measures, distance 0)."""
    n = int(n)
    if n < 0:
        raise ValueError("n must be non-negative")
    if n > n_exact:
        raise ValueError(f"n={n} exceeds the exact-mode cap n_exact={n_exact}")
    if n == 0:
        return 0.0
    best = 0.0
    for c in range(n + 1):
        value = _tv_for_count(table.trans, table.marginal, n, c)
        if value > best:
            best = value
    return best


def gamma_upper(table: TransitionTable, n: int) -> float:
    """Upper bound min(2, n * rho) on ``gamma_exact`` for every assignment,
    via subadditivity of TV over product measures, clamped to the TV range."""
    n = int(n)
    if n < 0:
        raise ValueError("n must be non-negative")
    return min(2.0, n * rho(table))


def gamma_monte_carlo(
    table: TransitionTable, n: int, n_samples: int, seed: int
) -> tuple[float, float]:
    """Sampling estimate of the product-measure distance at size ``n``.

    The previous-label assignment is fixed to the maximizer found by the
    same exchangeable-count sweep ``gamma_exact`` uses (for n beyond the
    sweep cap: every coordinate conditioned on the row with the larger
    per-index distance). With p the conditional product and q the marginal
    product, outcomes are drawn from the mixture (p + q) / 2 and the
    bounded ratio ``2 |p - q| / (p + q)`` is averaged, which is unbiased
    for ``sum_y |p - q|`` with per-draw values in [0, 2]. Sampling from p
    alone can miss essentially all of the mass where q dominates, so its
    empirical standard error is untrustworthy; the mixture proposal covers
    both supports. Diagnostic only: the estimate is never substituted into
    the aggregate ``s``.
    """
    n = int(n)
    if n < 1:
        raise ValueError("n must be >= 1")
    if n_samples < 100:
        raise ValueError("n_samples must be >= 100")
    if rho(table) == 0.0:
        return (0.0, 0.0)

    if n <= _SWEEP_CAP:
        c_star, best = 0, -1.0
        for c in range(n + 1):
            value = _tv_for_count(table.trans, table.marginal, n, c)
            if value > best:
                c_star, best = c, value
    else:
        c_star = n if per_index_tv(table, 1) >= per_index_tv(table, -1) else 0

    row_pos, row_neg = table.trans[1], table.trans[0]
    q = table.marginal
    rng = np.random.default_rng(seed)
    from_p = rng.random(n_samples) < 0.5
    # Coordinates are independent given the component, so the sufficient
    # statistics are the +1 counts in the two conditioning blocks.
    i = np.where(
        from_p,
        rng.binomial(c_star, row_pos[1], size=n_samples),
        rng.binomial(c_star, q[1], size=n_samples),
    )
    h = np.where(
        from_p,
        rng.binomial(n - c_star, row_neg[1], size=n_samples),
        rng.binomial(n - c_star, q[1], size=n_samples),
    )
    log_p = _log_prob(row_pos[1], i, c_star) + _log_prob(row_neg[1], h, n - c_star)
    log_q = _log_prob(q[1], i, c_star) + _log_prob(q[1], h, n - c_star)
    # 2|p - q| / (p + q) = 2|1 - exp(log_q - log_p)| / (1 + exp(log_q - log_p)),
    # evaluated against the larger of the two logs for stability.
    hi = np.maximum(log_p, log_q)
    with np.errstate(invalid="ignore"):
        r = np.exp(np.minimum(log_p, log_q) - hi)
    r = np.where(np.isneginf(hi), 1.0, r)  # p = q = 0: outcome never drawn anyway
    draws = 2.0 * (1.0 - r) / (1.0 + r)
    estimate = float(draws.mean())
    std_error = float(draws.std(ddof=1) / math.sqrt(n_samples))
    return (estimate, std_error)


def _log_prob(p_plus: float, count: np.ndarray, total: int) -> np.ndarray:
    """log(p_plus^count * (1-p_plus)^(total-count)) with 0 log 0 = 0."""
    with np.errstate(divide="ignore", invalid="ignore"):
        term_plus = np.where(count > 0, count * np.log(p_plus), 0.0)
        term_minus = np.where(total - count > 0, (total - count) * np.log1p(-p_plus), 0.0)
    return term_plus + term_minus


def index_set_size(l: int, m: int) -> int:
    """Size of the index set {l+1, .., m} attached to gamma_l (0 when empty)."""
    if not 1 <= l <= m + 1:
        raise ValueError(f"l must lie in 1..{m + 1}")
    return max(m - l, 0)


def s_aggregate(gamma_values, m: int) -> float:
    """sum_{l=1..m} (1 + 2m * gamma_{l+1})^2 from the length-(m+1) gamma vector."""
    gamma_values = np.asarray(gamma_values, dtype=np.float64)
    if gamma_values.shape[0] < m + 1:
        raise ValueError("gamma vector must cover l = 1..m+1")
    tail = gamma_values[1 : m + 1]
    return float(np.sum((1.0 + 2.0 * m * tail) ** 2))


@dataclass(frozen=True)
class DependencyCoefficients:
    """Per-step dependency summary: rho, the gamma vector, and aggregate s.

    ``gamma[i]`` holds gamma_l for l = i + 1, l running 1..m+1; entry l has
    index-set size m - l, so the vector is non-increasing in l when every
    entry is exact, and the last two entries (empty index sets) are 0.
    """

    step: int
    rho: float
    gamma: tuple[float, ...]
    modes: tuple[str, ...]
    s: float
    alpha: float
    n_exact: int
    m: int

    def __post_init__(self):
        if len(self.gamma) != self.m + 1 or len(self.modes) != self.m + 1:
            raise ValueError("gamma and modes must have length m + 1")
        if not 0.0 <= self.rho <= 2.0:
            raise ValueError("rho must lie in [0, 2]")
        if any(not 0.0 <= g <= 2.0 for g in self.gamma):
            raise ValueError("gamma entries must lie in [0, 2]")
        if any(mode not in GAMMA_MODES for mode in self.modes):
            raise ValueError(f"modes must be among {GAMMA_MODES}")
        if self.gamma[self.m] != 0.0:
            raise ValueError("gamma_{m+1} must be 0 (empty index set)")
        if self.s < self.m:
            raise ValueError("s must be >= m")

    def gamma_entry(self, l: int) -> float:
        """gamma_l for 1-based l in 1..m+1."""
        if not 1 <= l <= self.m + 1:
            raise ValueError(f"l must lie in 1..{self.m + 1}")
        return self.gamma[l - 1]

    def to_json_dict(self) -> dict:
        return {
            "k": self.step,
            "rho": self.rho,
            "gamma": [
                {
                    "l": l,
                    "n": index_set_size(l, self.m),
                    "value": self.gamma[l - 1],
                    "mode": self.modes[l - 1],
                }
                for l in range(1, self.m + 2)
            ],
            "s": self.s,
            "alpha": self.alpha,
            "n_exact": self.n_exact,
        }


def coefficients_for_step(
    data: MultiLabelDataset,
    order,
    step: int,
    alpha: float = 1.0,
    n_exact: int = DEFAULT_N_EXACT,
    mode: str = "auto",
) -> DependencyCoefficients:
    """Estimate the full coefficient set for chain step ``step`` (>= 2).

    The transition table comes from label columns order(step-1) and
    order(step). ``mode`` chooses how each gamma entry is computed: "auto"
    takes the exact sweep when the entry's index-set size is at most
    ``n_exact`` and the certified upper bound otherwise, "exact_only"
    refuses sizes beyond ``n_exact``, "upper_only" always bounds. The
    Monte-Carlo estimator is never used here: underestimating a quantity
    consumed as an upper bound would be unsound.
    """
    if mode not in ("auto", "exact_only", "upper_only"):
        raise ValueError("mode must be one of auto, exact_only, upper_only")
    order = require_permutation(order, data.n_labels)
    step = int(step)
    if step < 2:
        raise ValueError("coefficients are undefined at step 1 (no previous label)")
    if step > data.n_labels:
        raise ValueError(f"step {step} exceeds the label count {data.n_labels}")
    prev = data.label_column(order[step - 2])
    curr = data.label_column(order[step - 1])
    table = estimate_transitions(prev, curr, alpha, step=step)
    m = data.n_rows
    base_rho = rho(table)

    values: list[float] = []
    modes: list[str] = []
    for l in range(1, m + 2):
        n = index_set_size(l, m)
        if n == 0:
            values.append(0.0)
            modes.append("empty_set")
        elif mode == "upper_only":
            values.append(min(2.0, n * base_rho))
            modes.append("upper_bound")
        elif n <= n_exact:
            values.append(gamma_exact(table, n, n_exact))
            modes.append("exact")
        elif mode == "exact_only":
            raise ValueError(
                f"exact_only cannot evaluate gamma_{l} (index-set size {n} > "
                f"n_exact={n_exact})"
            )
        else:
            values.append(min(2.0, n * base_rho))
            modes.append("upper_bound")

    return DependencyCoefficients(
        step=step,
        rho=base_rho,
        gamma=tuple(values),
        modes=tuple(modes),
        s=s_aggregate(values, m),
        alpha=alpha,
        n_exact=n_exact,
        m=m,
    )


def independent_coefficients(step: int, m: int) -> DependencyCoefficients:
    """The independence reduction: rho = 0, gamma = 0, s = m, exactly.

    Step 1 has no previous label, so its coefficients take this form by
    definition; it also serves as the forced-zero setting in which the
    bound collapses to its classical independent-sample shape.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    values = tuple(0.0 for _ in range(m + 1))
    modes = tuple(
        "empty_set" if index_set_size(l, m) == 0 else "exact" for l in range(1, m + 2)
    )
    return DependencyCoefficients(
        step=int(step),
        rho=0.0,
        gamma=values,
        modes=modes,
        s=float(m),
        alpha=0.0,
        n_exact=DEFAULT_N_EXACT,
        m=m,
    )
