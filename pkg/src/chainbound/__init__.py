"""Classifier chains with estimable label-dependency coefficients,
Monte-Carlo Rademacher complexity, per-step risk bounds, and chain-order
selection."""

from .bound import BoundConfig, BoundReport, BoundStep, bound_chain, compute_bound
from .chain import ClassifierChain, chain_from_json, chain_to_json, fit_chain
from .datagen import GeneratorSpec, generate, symmetric_spec, symmetric_transition
from .dataset import (
    AugmentedView,
    MultiLabelDataset,
    initial_view,
    load_csv,
    save_csv,
    split,
)
from .dependency import (
    DependencyCoefficients,
    TransitionTable,
    coefficients_for_step,
    estimate_transitions,
    gamma_exact,
    gamma_monte_carlo,
    gamma_upper,
    independent_coefficients,
    per_index_tv,
    rho,
    s_aggregate,
)
from .learners import (
    DecisionStump,
    LogisticBinary,
    TrainConfig,
    empirical_risk,
    model_from_json,
    model_to_json,
    train_erm,
)
from .ordering import OrderStrategy, compare_orders, propose_order
from .rademacher import RademacherEstimate, estimate_rademacher, loss_correlation_sup
from .validation import DataFormatError, SchemaMismatchError

__version__ = "0.1.0"

__all__ = [
    "AugmentedView",
    "BoundConfig",
    "BoundReport",
    "BoundStep",
    "ClassifierChain",
    "DataFormatError",
    "DecisionStump",
    "DependencyCoefficients",
    "GeneratorSpec",
    "LogisticBinary",
    "MultiLabelDataset",
    "OrderStrategy",
    "RademacherEstimate",
    "SchemaMismatchError",
    "TrainConfig",
    "TransitionTable",
    "bound_chain",
    "chain_from_json",
    "chain_to_json",
    "coefficients_for_step",
    "compare_orders",
    "compute_bound",
    "empirical_risk",
    "estimate_rademacher",
    "estimate_transitions",
    "fit_chain",
    "gamma_exact",
    "gamma_monte_carlo",
    "gamma_upper",
    "generate",
    "independent_coefficients",
    "initial_view",
    "load_csv",
    "loss_correlation_sup",
    "model_from_json",
    "model_to_json",
    "per_index_tv",
    "propose_order",
    "rho",
    "s_aggregate",
    "save_csv",
    "split",
    "symmetric_spec",
    "symmetric_transition",
    "train_erm",
]
