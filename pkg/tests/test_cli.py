"""Command-line surface: outputs, exit codes, determinism, fault injection."""

import json
import os
import subprocess
import sys

import pytest

from eicalg.canon import canonicalize_rv
from eicalg.cli import main
from eicalg.expr import E, var
from eicalg.parser import parse_expression

X, Y = var("X"), var("Y")


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_structured(out: str) -> dict:
    return json.loads(out)


class TestDerive:
    def test_mean(self, capsys):
        code, out, _ = run_cli(
            capsys, "--output", "structured", "derive", "E[X]"
        )
        assert code == 0
        doc = parse_structured(out)
        result = doc["results"][0]
        assert result["estimand"] == "E[X]"
        assert canonicalize_rv(
            _reparse_rv(result["eic"])
        ) == canonicalize_rv(X - E(X))
        assert result["mean_zero"] is True

    def test_variance_matches_centered_form(self, capsys):
        code, out, _ = run_cli(
            capsys, "--output", "structured", "derive", "Var(X)"
        )
        assert code == 0
        eic_text = parse_structured(out)["results"][0]["eic"]
        mu = E(X)
        literal = (X - mu) * (X - mu) - E((X - mu) * (X - mu))
        assert canonicalize_rv(_reparse_rv(eic_text)) == canonicalize_rv(literal)

    def test_covariance_matches_centered_form(self, capsys):
        code, out, _ = run_cli(
            capsys, "--output", "structured", "derive", "Cov(X,Y)"
        )
        assert code == 0
        eic_text = parse_structured(out)["results"][0]["eic"]
        cov = E(X * Y) - E(X) * E(Y)
        literal = (X - E(X)) * (Y - E(Y)) - cov
        assert canonicalize_rv(_reparse_rv(eic_text)) == canonicalize_rv(literal)

    def test_trace_present(self, capsys):
        code, out, _ = run_cli(capsys, "--output", "structured", "derive", "Var(X)")
        trace = parse_structured(out)["results"][0]["trace"]
        assert trace and trace[0][0] == "linearity"

    def test_parse_error_exit_code(self, capsys):
        code, _, err = run_cli(capsys, "derive", "E[X")
        assert code == 2
        assert "column" in err


def _reparse_rv(text):
    """Read a printed random-variable expression back through the grammar."""
    from eicalg.expr import Moment

    psi = parse_expression(text)
    assert isinstance(psi, Moment)
    return psi.arg


class TestParseCheck:
    def test_round_trip_ok(self, capsys):
        code, out, _ = run_cli(
            capsys, "--output", "structured", "parse-check", "E[X*Y] - E[X]*E[Y]"
        )
        assert code == 0
        doc = parse_structured(out)
        assert doc["results"][0]["round_trip"] is True

    def test_bad_expression(self, capsys):
        code, _, err = run_cli(capsys, "parse-check", "Var(3)")
        assert code == 2


class TestVerify:
    def test_all_suites_pass_quickly(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "--output",
            "structured",
            "verify",
            "all",
            "--trials",
            "10",
            "--seed",
            "42",
        )
        assert code == 0
        doc = parse_structured(out)
        assert all(r["verdict"] == "pass" for r in doc["results"])

    def test_exit_one_on_failure(self, capsys, monkeypatch):
        monkeypatch.setenv("EICALG_NEGATE_CENTERING", "1")
        code, out, _ = run_cli(
            capsys,
            "--output",
            "structured",
            "verify",
            "jacobi",
            "--trials",
            "50",
            "--seed",
            "42",
        )
        assert code == 1
        doc = parse_structured(out)
        failing = [r for r in doc["results"] if r["verdict"] == "fail"]
        assert failing
        assert "weights=" in failing[0]["counterexample"]

    def test_unknown_suite_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as info:
            run_cli(capsys, "verify", "nonsense")
        assert info.value.code == 2


class TestEstimate:
    def test_mean_closed_form(self, capsys, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("Y\n0\n1\n")
        code, out, _ = run_cli(
            capsys, "--output", "structured", "estimate", "E[Y]", "--data", str(path)
        )
        assert code == 0
        result = parse_structured(out)["results"][0]
        assert result["estimate"] == "1/2"
        assert result["standard_error"] == pytest.approx(0.3535533905932738)

    def test_variance(self, capsys, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("Y\n0\n1\n")
        code, out, _ = run_cli(
            capsys, "--output", "structured", "estimate", "Var(Y)", "--data", str(path)
        )
        assert parse_structured(out)["results"][0]["estimate"] == "1/4"

    def test_constant_expression(self, capsys, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("Y\n4\n7\n")
        code, out, _ = run_cli(
            capsys, "--output", "structured", "estimate", "3", "--data", str(path)
        )
        result = parse_structured(out)["results"][0]
        assert result["estimate"] == "3"
        assert result["standard_error"] == 0.0

    def test_onestep_with_split(self, capsys, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("Y\n0\n1\n1\n0\n")
        code, out, _ = run_cli(
            capsys,
            "--output",
            "structured",
            "estimate",
            "E[Y]",
            "--data",
            str(path),
            "--split",
            "0.5",
        )
        assert parse_structured(out)["results"][0]["onestep"] == "1/2"

    def test_missing_column_is_data_error(self, capsys, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("Y\n0\n1\n")
        code, _, err = run_cli(capsys, "estimate", "E[Z]", "--data", str(path))
        assert code == 3

    def test_malformed_data_exit_code(self, capsys, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("Y\nfoo\n")
        code, _, err = run_cli(capsys, "estimate", "E[Y]", "--data", str(path))
        assert code == 3

    def test_float_mode_smooth_estimand(self, capsys, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("Y\n1\n4\n")
        code, out, _ = run_cli(
            capsys,
            "--output",
            "structured",
            "estimate",
            "sqrt(E[Y])",
            "--data",
            str(path),
            "--mode",
            "float",
        )
        assert code == 0
        result = parse_structured(out)["results"][0]
        assert result["estimate_float"] == pytest.approx(2.5**0.5)
        # delta-method standard error: |g'(mean)| * sd(Y)/sqrt(n)
        import math

        expected_se = (0.5 / math.sqrt(2.5)) * math.sqrt(2.25 / 2)
        assert result["standard_error"] == pytest.approx(expected_se, rel=1e-9)

    def test_smooth_estimand_rejected_in_exact_mode(self, capsys, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("Y\n1\n4\n")
        code, _, err = run_cli(
            capsys, "estimate", "sqrt(E[Y])", "--data", str(path)
        )
        assert code == 2


class TestSimulate:
    def test_bernoulli_bound(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "--output",
            "structured",
            "simulate",
            "--family",
            "bernoulli",
            "--p",
            "0.3",
            "--estimand",
            "E[X]",
            "--n",
            "100",
            "--replicates",
            "20",
            "--seed",
            "7",
        )
        assert code == 0
        result = parse_structured(out)["results"][0]
        assert result["bound_exact"] == "21/100"

    def test_config_file(self, capsys, tmp_path):
        config = tmp_path / "mc.json"
        config.write_text(
            json.dumps(
                {
                    "family": "discrete",
                    "params": {"support": ["2"], "weights": ["1"]},
                    "estimand": "E[X]",
                    "n": 20,
                    "replicates": 5,
                    "seed": 1,
                }
            )
        )
        code, out, _ = run_cli(
            capsys, "--output", "structured", "simulate", "--config", str(config)
        )
        result = parse_structured(out)["results"][0]
        assert result["empirical_variance"] == 0.0
        assert result["coverage"] == 1.0


class TestDeterminism:
    def test_identical_seeds_identical_bytes(self):
        argv = [
            sys.executable,
            "-m",
            "eicalg.cli",
            "--output",
            "structured",
            "verify",
            "brackets",
            "--trials",
            "25",
            "--seed",
            "11",
        ]
        env = {k: v for k, v in os.environ.items() if k != "EICALG_NEGATE_CENTERING"}
        first = subprocess.run(argv, capture_output=True, env=env)
        second = subprocess.run(argv, capture_output=True, env=env)
        assert first.returncode == second.returncode == 0
        assert first.stdout == second.stdout

    def test_simulate_deterministic_bytes(self):
        argv = [
            sys.executable,
            "-m",
            "eicalg.cli",
            "--output",
            "structured",
            "simulate",
            "--family",
            "bernoulli",
            "--p",
            "0.5",
            "--estimand",
            "E[X]",
            "--n",
            "500",
            "--replicates",
            "40",
            "--seed",
            "9",
        ]
        first = subprocess.run(argv, capture_output=True)
        second = subprocess.run(argv, capture_output=True)
        assert first.stdout == second.stdout
        assert first.returncode == 0


class TestDocumentSchema:
    def test_stable_field_order(self, capsys):
        code, out, _ = run_cli(
            capsys, "--output", "structured", "parse-check", "E[X]"
        )
        doc = parse_structured(out)
        assert list(doc) == [
            "command",
            "inputs",
            "results",
            "verdicts",
            "seed",
            "version",
        ]
