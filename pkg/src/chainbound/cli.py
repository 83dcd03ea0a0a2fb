"""Command-line front end: generate, train, predict, coeffs, bound, order, compare.

Every command is a pure function of its input files, flags, and seeds;
re-running with identical arguments produces byte-identical artifacts
(JSON is dumped with sorted keys and no timestamps). Errors exit nonzero
with a single machine-parsable line on stderr:

    exit 2  invalid flag or configuration value
    exit 3  missing input file
    exit 4  schema mismatch (malformed data file, model/data disagreement)
    exit 1  anything unexpected

The CHAINBOUND_THREADS environment variable caps internal parallelism;
the current implementation computes sequentially, so any positive cap is
trivially honored (a non-positive or non-integer value is a configuration
error).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from .bound import BoundConfig, bound_chain
from .chain import chain_from_json, chain_to_json, fit_chain
from .dataset import load_csv, save_csv, split
from .datagen import generate, symmetric_spec
from .dependency import coefficients_for_step
from .learners import TrainConfig
from .ordering import OrderStrategy, compare_orders, propose_order
from .validation import DataFormatError, SchemaMismatchError

_STRATEGIES = {
    "identity": "identity",
    "random": "random",
    "greedy-min-rho": "greedy_min_rho",
    "greedy-max-rho": "greedy_max_rho",
    "exhaustive": "exhaustive_min_bound",
}


class _CliError(Exception):
    def __init__(self, kind: str, detail: str, code: int):
        super().__init__(detail)
        self.kind = kind
        self.detail = detail
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _CliError("invalid_flag", message, 2)


def _dump_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _load_json(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _sibling(path: str, suffix: str) -> str:
    root, _ = os.path.splitext(path)
    return root + suffix


def _parse_order(text: str, k: int):
    try:
        values = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise _CliError("invalid_flag", f"--order must be a comma list of ints, got {text!r}", 2)
    if sorted(values) != list(range(k)):
        raise _CliError(
            "invalid_flag", f"--order must be a permutation of 0..{k - 1}, got {text!r}", 2
        )
    return values


def _thread_cap() -> int:
    raw = os.environ.get("CHAINBOUND_THREADS")
    if raw is None:
        return 1
    try:
        cap = int(raw)
    except ValueError:
        raise _CliError("invalid_flag", f"CHAINBOUND_THREADS must be an integer, got {raw!r}", 2)
    if cap < 1:
        raise _CliError("invalid_flag", "CHAINBOUND_THREADS must be >= 1", 2)
    return cap


def _check(condition: bool, message: str) -> None:
    if not condition:
        raise _CliError("invalid_flag", message, 2)


def _load_data(args):
    if not os.path.exists(args.data):
        raise _CliError("missing_file", f"data file not found: {args.data}", 3)
    return load_csv(args.data, args.labels)


def _load_model(path):
    if not os.path.exists(path):
        raise _CliError("missing_file", f"model file not found: {path}", 3)
    try:
        return chain_from_json(_load_json(path))
    except (KeyError, ValueError, json.JSONDecodeError) as exc:
        raise SchemaMismatchError(f"malformed model file {path}: {exc}") from exc


def _train_config(args) -> TrainConfig:
    return TrainConfig(learner_kind=args.learner, seed=args.seed)


def _build_parser() -> _Parser:
    parser = _Parser(prog="chainbound", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic dataset plus ground truth")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--dep", type=float, default=0.0)
    p.add_argument("--sep", type=float, default=1.0)
    p.add_argument("--label-noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="CSV path; ground truth lands beside it")

    p = sub.add_parser("train", help="train a classifier chain")
    p.add_argument("--data", required=True)
    p.add_argument("--labels", type=int, required=True)
    p.add_argument("--order", default=None)
    p.add_argument("--learner", choices=["stump", "logistic"], default="stump")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="model JSON; report lands beside it")

    p = sub.add_parser("predict", help="predict labels with a trained chain")
    p.add_argument("--data", required=True)
    p.add_argument("--labels", type=int, required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("coeffs", help="dependency coefficients per chain step")
    p.add_argument("--data", required=True)
    p.add_argument("--labels", type=int, required=True)
    p.add_argument("--order", default=None)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--n-exact", type=int, default=12)
    p.add_argument("--out", required=True)

    p = sub.add_parser("bound", help="per-step risk bounds on a train/test split")
    p.add_argument("--data", required=True)
    p.add_argument("--labels", type=int, required=True)
    p.add_argument("--model", default=None, help="reuse a trained model instead of fitting")
    p.add_argument("--order", default=None)
    p.add_argument("--learner", choices=["stump", "logistic"], default="stump")
    p.add_argument("--train-frac", type=float, default=0.7)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--n-exact", type=int, default=12)
    p.add_argument("--n-sigma", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("order", help="propose a chain order")
    p.add_argument("--data", required=True)
    p.add_argument("--labels", type=int, required=True)
    p.add_argument("--strategy", choices=sorted(_STRATEGIES), required=True)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--learner", choices=["stump", "logistic"], default="stump")
    p.add_argument("--train-frac", type=float, default=0.7)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)

    p = sub.add_parser("compare", help="compare chain orders on a shared split")
    p.add_argument("--data", required=True)
    p.add_argument("--labels", type=int, required=True)
    p.add_argument("--order", action="append", required=True,
                   help="comma list of 0-based label indices; repeatable")
    p.add_argument("--learner", choices=["stump", "logistic"], default="stump")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--n-exact", type=int, default=12)
    p.add_argument("--n-sigma", type=int, default=200)
    p.add_argument("--train-frac", type=float, default=0.7)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    return parser


def _cmd_gen(args) -> None:
    _check(args.m >= 1 and args.d >= 1 and args.k >= 1, "--m, --d, --k must be >= 1")
    _check(0.0 <= args.dep <= 1.0, "--dep must lie in [0, 1]")
    _check(0.0 <= args.label_noise < 0.5, "--label-noise must lie in [0, 0.5)")
    _check(args.sep >= 0.0, "--sep must be non-negative")
    spec = symmetric_spec(
        args.m,
        args.d,
        args.k,
        args.dep,
        class_separation=args.sep,
        label_noise=args.label_noise,
        seed=args.seed,
    )
    data, truth = generate(spec)
    save_csv(data, args.out)
    _dump_json(
        {
            "spec": spec.to_json_dict(),
            "tables": [
                {
                    "k": t.step,
                    "trans": t.trans.tolist(),
                    "marginal": t.marginal.tolist(),
                }
                for t in truth
            ],
        },
        _sibling(args.out, ".truth.json"),
    )


def _cmd_train(args) -> None:
    data = _load_data(args)
    order = None if args.order is None else _parse_order(args.order, data.n_labels)
    model = fit_chain(data, order, _train_config(args))
    _dump_json(chain_to_json(model), args.out)
    _dump_json(
        {
            "m": data.n_rows,
            "order": [int(v) for v in model.order_],
            "train_step_risks": [float(r) for r in model.train_step_risks_],
        },
        _sibling(args.out, ".report.json"),
    )


def _cmd_predict(args) -> None:
    data = _load_data(args)
    model = _load_model(args.model)
    if model.n_features_in_ != data.n_features or model.n_labels_ != data.n_labels:
        raise SchemaMismatchError(
            f"model expects d={model.n_features_in_}, K={model.n_labels_}; "
            f"data has d={data.n_features}, K={data.n_labels}"
        )
    preds = model.predict(data.features)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(data.label_names))
        for row in preds:
            writer.writerow([str(int(v)) for v in row])


def _cmd_coeffs(args) -> None:
    _check(args.alpha >= 0.0, "--alpha must be non-negative")
    _check(args.n_exact >= 0, "--n-exact must be non-negative")
    data = _load_data(args)
    order = (
        tuple(range(data.n_labels))
        if args.order is None
        else _parse_order(args.order, data.n_labels)
    )
    steps = [
        coefficients_for_step(
            data, order, k, alpha=args.alpha, n_exact=args.n_exact
        ).to_json_dict()
        for k in range(2, data.n_labels + 1)
    ]
    _dump_json(
        {
            "m": data.n_rows,
            "order": [int(v) for v in order],
            "alpha": args.alpha,
            "n_exact": args.n_exact,
            "steps": steps,
        },
        args.out,
    )


def _cmd_bound(args) -> None:
    _check(0.0 < args.delta < 1.0, "--delta must lie strictly inside (0, 1)")
    _check(args.alpha >= 0.0, "--alpha must be non-negative")
    _check(args.n_sigma >= 1, "--n-sigma must be >= 1")
    _check(0.0 < args.train_frac < 1.0, "--train-frac must lie strictly inside (0, 1)")
    data = _load_data(args)
    train, test = split(data, args.train_frac, args.seed)
    if args.model is not None:
        model = _load_model(args.model)
        if model.n_features_in_ != data.n_features or model.n_labels_ != data.n_labels:
            raise SchemaMismatchError("model and data disagree on d or K")
    else:
        order = None if args.order is None else _parse_order(args.order, data.n_labels)
        model = fit_chain(train, order, _train_config(args))
    report = bound_chain(
        train,
        test,
        model,
        args.delta,
        BoundConfig(
            alpha=args.alpha,
            n_exact=args.n_exact,
            n_sigma=args.n_sigma,
            rademacher_seed=args.seed,
        ),
    )
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(report.to_json())


def _cmd_order(args) -> None:
    data = _load_data(args)
    kind = _STRATEGIES[args.strategy]
    kwargs = {}
    if kind == "random":
        _check(args.seed is not None, "random strategy requires --seed")
        kwargs["seed"] = args.seed
    elif kind == "exhaustive_min_bound":
        _check(args.seed is not None, "exhaustive strategy requires --seed")
        _check(args.delta is not None, "exhaustive strategy requires --delta")
        _check(0.0 < args.delta < 1.0, "--delta must lie strictly inside (0, 1)")
        _check(0.0 < args.train_frac < 1.0, "--train-frac must lie strictly inside (0, 1)")
        kwargs.update(
            seed=args.seed,
            delta=args.delta,
            train_config=TrainConfig(learner_kind=args.learner, seed=args.seed),
            train_fraction=args.train_frac,
        )
    strategy = OrderStrategy(kind=kind, **kwargs)
    order = propose_order(data, strategy, alpha=args.alpha)
    _dump_json(
        {"strategy": args.strategy, "alpha": args.alpha, "order": [int(v) for v in order]},
        args.out,
    )


def _cmd_compare(args) -> None:
    _check(0.0 < args.delta < 1.0, "--delta must lie strictly inside (0, 1)")
    _check(0.0 < args.train_frac < 1.0, "--train-frac must lie strictly inside (0, 1)")
    data = _load_data(args)
    orders = [_parse_order(text, data.n_labels) for text in args.order]
    rows = compare_orders(
        data,
        orders,
        TrainConfig(learner_kind=args.learner, seed=args.seed),
        args.delta,
        args.seed,
        alpha=args.alpha,
        n_exact=args.n_exact,
        n_sigma=args.n_sigma,
        train_fraction=args.train_frac,
    )
    _dump_json(rows, args.out)


_COMMANDS = {
    "gen": _cmd_gen,
    "train": _cmd_train,
    "predict": _cmd_predict,
    "coeffs": _cmd_coeffs,
    "bound": _cmd_bound,
    "order": _cmd_order,
    "compare": _cmd_compare,
}


def main(argv=None) -> int:
    try:
        _thread_cap()
        args = _build_parser().parse_args(argv)
        _COMMANDS[args.command](args)
        return 0
    except _CliError as exc:
        print(f"error kind={exc.kind} detail={exc.detail!r}", file=sys.stderr)
        return exc.code
    except FileNotFoundError as exc:
        print(f"error kind=missing_file detail={str(exc)!r}", file=sys.stderr)
        return 3
    except (DataFormatError, SchemaMismatchError) as exc:
        print(f"error kind=schema_mismatch detail={str(exc)!r}", file=sys.stderr)
        return 4
    except ValueError as exc:
        print(f"error kind=invalid_flag detail={str(exc)!r}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - last resort
        print(f"error kind=internal detail={str(exc)!r}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
