import json
import math
import os

import numpy as np
import pytest

from chainbound.cli import main


def run(argv):
    return main([str(a) for a in argv])


def gen(tmp_path, name="data.csv", m=200, d=2, k=2, dep=0.5, seed=0, **extra):
    out = tmp_path / name
    argv = ["gen", "--m", m, "--d", d, "--k", k, "--dep", dep, "--seed", seed, "--out", out]
    for flag, value in extra.items():
        argv += [f"--{flag.replace('_', '-')}", value]
    assert run(argv) == 0
    return out


class TestGen:
    def test_writes_csv_and_truth(self, tmp_path):
        out = gen(tmp_path)
        assert out.exists()
        truth = json.loads((tmp_path / "data.truth.json").read_text())
        assert truth["spec"]["m"] == 200
        assert len(truth["tables"]) == 1

    def test_rejects_out_of_range_dep(self, tmp_path, capsys):
        code = run(["gen", "--m", 10, "--d", 1, "--k", 2, "--dep", 1.5,
                    "--out", tmp_path / "x.csv"])
        assert code == 2
        err = capsys.readouterr().err
        assert err.count("\n") == 1 and err.startswith("error kind=invalid_flag")


class TestTrain:
    def test_repeated_runs_are_byte_identical(self, tmp_path):
        data = gen(tmp_path, m=300, k=3, dep=0.9, seed=42, sep=2.0)
        for name in ("m1.json", "m2.json"):
            assert run(["train", "--data", data, "--labels", 3, "--order", "0,1,2",
                        "--learner", "stump", "--seed", 42, "--out", tmp_path / name]) == 0
        assert (tmp_path / "m1.json").read_bytes() == (tmp_path / "m2.json").read_bytes()
        report = json.loads((tmp_path / "m1.report.json").read_text())
        assert len(report["train_step_risks"]) == 3

    def test_missing_data_file(self, tmp_path):
        assert run(["train", "--data", tmp_path / "nope.csv", "--labels", 2,
                    "--out", tmp_path / "m.json"]) == 3


class TestPredict:
    def test_prediction_csv_shape(self, tmp_path):
        data = gen(tmp_path, m=50, k=2, dep=0.8, sep=3.0)
        model = tmp_path / "m.json"
        assert run(["train", "--data", data, "--labels", 2, "--out", model]) == 0
        out = tmp_path / "preds.csv"
        assert run(["predict", "--data", data, "--labels", 2, "--model", model,
                    "--out", out]) == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "y0,y1"
        assert len(lines) == 51
        assert set("".join(lines[1:]).replace(",", "").replace("-", "")) <= set("1")

    def test_schema_mismatch_exit_code(self, tmp_path):
        data2 = gen(tmp_path, name="two.csv", m=40, d=2, k=2)
        data3 = gen(tmp_path, name="three.csv", m=40, d=3, k=2)
        model = tmp_path / "m.json"
        assert run(["train", "--data", data2, "--labels", 2, "--out", model]) == 0
        assert run(["predict", "--data", data3, "--labels", 2, "--model", model,
                    "--out", tmp_path / "p.csv"]) == 4


class TestCoeffs:
    def test_copy_chain_rho_close_to_ground_truth(self, tmp_path):
        data = gen(tmp_path, m=10000, d=1, k=2, dep=1.0, seed=3)
        out = tmp_path / "coeffs.json"
        assert run(["coeffs", "--data", data, "--labels", 2, "--alpha", 1.0,
                    "--out", out]) == 0
        report = json.loads(out.read_text())
        # copy chain at balanced marginal: ground-truth rho = 1.0
        assert abs(report["steps"][0]["rho"] - 1.0) <= 0.05
        assert report["steps"][0]["k"] == 2

    def test_schema_of_gamma_entries(self, tmp_path):
        data = gen(tmp_path, m=30, d=1, k=2, dep=0.5)
        out = tmp_path / "coeffs.json"
        assert run(["coeffs", "--data", data, "--labels", 2, "--out", out]) == 0
        step = json.loads(out.read_text())["steps"][0]
        assert set(step) == {"k", "rho", "gamma", "s", "alpha", "n_exact"}
        assert len(step["gamma"]) == 31
        assert {"l", "n", "value", "mode"} == set(step["gamma"][0])

    def test_malformed_label_value_is_schema_error(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,y\n1.0,1\n2.0,2\n")
        assert run(["coeffs", "--data", bad, "--labels", 1,
                    "--out", tmp_path / "c.json"]) == 4


class TestBound:
    def test_k1_concentration_matches_classical_formula(self, tmp_path):
        data = gen(tmp_path, m=500, d=2, k=1, dep=0.0, sep=3.0, seed=5)
        out = tmp_path / "bound.json"
        assert run(["bound", "--data", data, "--labels", 1, "--delta", 0.05,
                    "--train-frac", 0.8, "--n-sigma", 20, "--seed", 5,
                    "--out", out]) == 0
        report = json.loads(out.read_text())
        m = report["meta"]["m"]
        step = report["steps"][0]
        assert step["concentration_term"] == pytest.approx(
            math.sqrt(math.log(20.0) / (2 * m)), abs=1e-12
        )
        assert step["rho"] == 0.0 and step["gamma_1"] == 0.0
        assert step["s"] == m

    def test_invalid_delta_exit_code(self, tmp_path, capsys):
        data = gen(tmp_path, m=40)
        assert run(["bound", "--data", data, "--labels", 2, "--delta", 1.5,
                    "--out", tmp_path / "b.json"]) == 2
        assert capsys.readouterr().err.count("\n") == 1

    def test_reuses_trained_model(self, tmp_path):
        data = gen(tmp_path, m=120, k=2, dep=0.4, seed=6)
        model = tmp_path / "m.json"
        assert run(["train", "--data", data, "--labels", 2, "--out", model]) == 0
        out = tmp_path / "b.json"
        assert run(["bound", "--data", data, "--labels", 2, "--model", model,
                    "--delta", 0.1, "--n-sigma", 10, "--out", out]) == 0
        assert json.loads(out.read_text())["meta"]["K"] == 2


class TestOrderAndCompare:
    def test_order_strategies_emit_permutations(self, tmp_path):
        data = gen(tmp_path, m=150, k=3, dep=0.7, seed=7)
        for strategy, extra in [
            ("identity", []),
            ("random", ["--seed", 1]),
            ("greedy-min-rho", []),
            ("greedy-max-rho", []),
            ("exhaustive", ["--seed", 1, "--delta", 0.2]),
        ]:
            out = tmp_path / f"{strategy}.json"
            assert run(["order", "--data", data, "--labels", 3, "--strategy", strategy,
                        "--out", out] + extra) == 0
            report = json.loads(out.read_text())
            assert sorted(report["order"]) == [0, 1, 2]

    def test_compare_rows_follow_input_order(self, tmp_path):
        data = gen(tmp_path, m=150, k=2, dep=0.6, seed=8)
        out = tmp_path / "cmp.json"
        assert run(["compare", "--data", data, "--labels", 2,
                    "--order", "0,1", "--order", "1,0", "--delta", 0.1,
                    "--n-sigma", 10, "--seed", 8, "--out", out]) == 0
        rows = json.loads(out.read_text())
        assert [r["order"] for r in rows] == [[0, 1], [1, 0]]
        for row in rows:
            assert {"order", "mean_test_risk", "per_step_test_risk",
                    "mean_rhs", "per_step_rhs"} == set(row)

    def test_bad_order_flag(self, tmp_path):
        data = gen(tmp_path, m=40, k=2)
        assert run(["compare", "--data", data, "--labels", 2, "--order", "0,0",
                    "--delta", 0.1, "--out", tmp_path / "c.json"]) == 2


class TestEnvironment:
    def test_thread_cap_validation(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("CHAINBOUND_THREADS", "zero")
        assert run(["gen", "--m", 5, "--d", 1, "--k", 1, "--out", tmp_path / "x.csv"]) == 2
        monkeypatch.setenv("CHAINBOUND_THREADS", "2")
        assert run(["gen", "--m", 5, "--d", 1, "--k", 1, "--out", tmp_path / "x.csv"]) == 0

    def test_unknown_flag_is_single_line_exit_2(self, capsys):
        assert run(["gen", "--bogus", 1]) == 2
        err = capsys.readouterr().err
        assert err.count("\n") == 1 and err.startswith("error kind=invalid_flag")
