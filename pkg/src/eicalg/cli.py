"""Command-line front end.

Subcommands: ``parse-check``, ``derive``, ``verify``, ``estimate``,
``simulate``.  Output is human-readable text or a structured JSON document
with the stable field order {command, inputs, results, verdicts, seed,
version}; runs with identical inputs (including seeds) produce byte-identical
structured output.

Exit codes: 0 success or all identities pass, 1 verification failure,
2 usage or expression error, 3 data error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .canon import canonicalize_rv, rv_from_form
from .eic import derive_eic, mean_zero_certificate
from .errors import (
    DataError,
    EvaluationError,
    ExactModeError,
    NormalizationError,
    ParseError,
)
from .estimate import (
    eic_standard_error,
    onestep_estimate,
    plugin_estimate,
    read_delimited,
    wald_ci,
)
from .expr import evaluate_rv, render_func
from .measure import expectation
from .mc import McConfig, run_mc
from .parser import parse_expression
from .sampling import random_binding, random_space, trial_rng
from .verify import available_suites, run_suite


def _document(command, inputs, results, verdicts, seed):
    return {
        "command": command,
        "inputs": inputs,
        "results": results,
        "verdicts": verdicts,
        "seed": seed,
        "version": __version__,
    }


def _emit(doc, output, stream=None):
    stream = stream or sys.stdout
    if output == "structured":
        stream.write(json.dumps(doc, indent=2) + "\n")
        return
    stream.write(f"command: {doc['command']}\n")
    for key, value in doc["inputs"].items():
        stream.write(f"  {key}: {value}\n")
    for result in doc["results"]:
        for key, value in result.items():
            stream.write(f"{key}: {value}\n")
    for verdict in doc["verdicts"]:
        stream.write(f"{verdict}\n")


def _canonical_eic_text(eic) -> str:
    try:
        return str(rv_from_form(canonicalize_rv(eic)))
    except ExactModeError:
        return str(eic)


def _float_mode_mean_check(eic, names) -> bool:
    """Numeric stand-in for the mean-zero certificate when smooth nodes block
    exact canonicalization: positive bindings, 20 seeded instances."""
    for index in range(20):
        rng = trial_rng(20250801, index)
        space = random_space(rng)
        binding = random_binding(rng, space, names, low=1, high=5)
        try:
            values = evaluate_rv(eic, space, binding, mode="float")
        except EvaluationError:
            return False
        mean = float(expectation(space, values))
        scale = max(1.0, max(abs(float(v)) for v in values.values))
        if abs(mean) > 1e-9 * scale:
            return False
    return True


def cmd_parse_check(args) -> tuple[int, dict]:
    psi = parse_expression(args.expression)
    printed = render_func(psi)
    reparsed = parse_expression(printed)
    results = [
        {
            "parsed": printed,
            "round_trip": render_func(reparsed) == printed,
        }
    ]
    verdict = "parse: ok" if results[0]["round_trip"] else "parse: unstable"
    doc = _document(
        "parse-check", {"expression": args.expression}, results, [verdict], None
    )
    return (0 if results[0]["round_trip"] else 1), doc


def cmd_derive(args) -> tuple[int, dict]:
    psi = parse_expression(args.expression)
    result = derive_eic(psi, mode=args.mode)
    if args.mode == "exact":
        mean_zero = mean_zero_certificate(result.eic)
    else:
        from .expr import func_base_vars

        mean_zero = _float_mode_mean_check(
            result.eic, sorted(func_base_vars(psi))
        )
    results = [
        {
            "estimand": render_func(result.estimand),
            "eic": _canonical_eic_text(result.eic),
            "trace": [list(step) for step in result.trace],
            "mean_zero": mean_zero,
        }
    ]
    verdicts = [f"mean-zero: {'pass' if mean_zero else 'fail'}"]
    doc = _document(
        "derive",
        {"expression": args.expression, "mode": args.mode},
        results,
        verdicts,
        None,
    )
    return (0 if mean_zero else 1), doc


def cmd_verify(args) -> tuple[int, dict]:
    records = run_suite(args.suite, args.trials, args.seed, args.max_outcomes)
    results = [
        {
            "name": r.name,
            "statement": r.statement,
            "mode": r.mode,
            "verdict": "pass" if r.passed else "fail",
            "counterexample": r.counterexample,
        }
        for r in records
    ]
    verdicts = [
        f"{r.name} [{r.mode}]: {'pass' if r.passed else 'fail'}" for r in records
    ]
    all_passed = all(r.passed for r in records)
    doc = _document(
        "verify",
        {
            "suite": args.suite,
            "trials": args.trials,
            "max_outcomes": args.max_outcomes,
        },
        results,
        verdicts,
        args.seed,
    )
    return (0 if all_passed else 1), doc


def cmd_estimate(args) -> tuple[int, dict]:
    psi = parse_expression(args.expression)
    data = read_delimited(Path(args.data).read_text())
    estimate = plugin_estimate(psi, data, mode=args.mode)
    se = eic_standard_error(psi, data, mode=args.mode)
    low, high = wald_ci(float(estimate), se, args.level)
    result = {
        "estimate": str(estimate),
        "estimate_float": float(estimate),
        "standard_error": se,
        "ci_low": low,
        "ci_high": high,
        "level": args.level,
        "n": data.n,
    }
    if args.split is not None:
        onestep = onestep_estimate(psi, data, Fraction(str(args.split)))
        result["onestep"] = str(onestep)
        result["onestep_float"] = float(onestep)
    doc = _document(
        "estimate",
        {"expression": args.expression, "data": args.data, "level": args.level},
        [result],
        [f"estimate: {float(estimate)}"],
        None,
    )
    return 0, doc


def _mc_config_from_args(args) -> McConfig:
    if args.config:
        raw = json.loads(Path(args.config).read_text())
        estimand = parse_expression(raw["estimand"])
        return McConfig(
            family=raw["family"],
            params=raw.get("params", {}),
            estimand=estimand,
            n=int(raw["n"]),
            replicates=int(raw["replicates"]),
            seed=int(raw["seed"]),
            level=float(raw.get("level", 0.95)),
            column=raw.get("column", "X"),
        )
    if not args.family or not args.estimand:
        raise ValueError("either --config or --family and --estimand are required")
    params = {}
    if args.p is not None:
        params["p"] = args.p
    if args.support is not None:
        params["support"] = [s for s in args.support.split(",") if s]
    if args.weights is not None:
        params["weights"] = [w for w in args.weights.split(",") if w]
    for key in ("low", "high", "points", "mean", "sd", "span"):
        value = getattr(args, key.replace("-", "_"), None)
        if value is not None:
            params[key] = value
    return McConfig(
        family=args.family,
        params=params,
        estimand=parse_expression(args.estimand),
        n=args.n,
        replicates=args.replicates,
        seed=args.seed,
        level=args.level,
        column=args.column,
    )


def cmd_simulate(args) -> tuple[int, dict]:
    config = _mc_config_from_args(args)
    report = run_mc(config)
    result = {
        "truth": report.truth,
        "truth_exact": report.truth_exact,
        "bound": report.bound,
        "bound_exact": report.bound_exact,
        "empirical_variance": report.empirical_variance,
        "coverage": report.coverage,
        "n": report.n,
        "replicates": report.replicates,
        "level": report.level,
        "estimates_digest": report.estimates_digest,
    }
    doc = _document(
        "simulate",
        {
            "family": config.family,
            "estimand": render_func(config.estimand),
            "n": config.n,
            "replicates": config.replicates,
            "level": config.level,
        },
        [result],
        [
            f"bound: {report.bound}",
            f"empirical variance: {report.empirical_variance}",
            f"coverage: {report.coverage}",
        ],
        config.seed,
    )
    return 0, doc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eicalg",
        description="Derive efficient influence curves, verify the operator "
        "identities behind them, and estimate from data.",
    )
    parser.add_argument(
        "--output",
        choices=("text", "structured"),
        default="text",
        help="human-readable text or a JSON document",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("parse-check", help="parse an expression and round-trip it")
    p.add_argument("expression")
    p.set_defaults(handler=cmd_parse_check)

    p = sub.add_parser("derive", help="derive the gradient of a functional")
    p.add_argument("expression")
    p.add_argument("--mode", choices=("exact", "float"), default="exact")
    p.set_defaults(handler=cmd_derive)

    p = sub.add_parser("verify", help="run an identity-verification suite")
    p.add_argument("suite", choices=available_suites())
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-outcomes", type=int, default=8, dest="max_outcomes")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("estimate", help="estimate a functional from CSV data")
    p.add_argument("expression")
    p.add_argument("--data", required=True)
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--split", default=None, help="one-step split ratio, e.g. 0.5")
    p.add_argument("--mode", choices=("exact", "float"), default="exact")
    p.set_defaults(handler=cmd_estimate)

    p = sub.add_parser("simulate", help="run a seeded Monte Carlo study")
    p.add_argument("--config", default=None, help="JSON configuration file")
    p.add_argument("--family", default=None)
    p.add_argument("--estimand", default=None)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--replicates", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--column", default="X")
    p.add_argument("--p", default=None)
    p.add_argument("--support", default=None)
    p.add_argument("--weights", default=None)
    p.add_argument("--low", default=None)
    p.add_argument("--high", default=None)
    p.add_argument("--points", default=None)
    p.add_argument("--mean", default=None)
    p.add_argument("--sd", default=None)
    p.add_argument("--span", default=None)
    p.set_defaults(handler=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code, doc = args.handler(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DataError, EvaluationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (NormalizationError, ExactModeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _emit(doc, args.output)
    return code


if __name__ == "__main__":
    sys.exit(main())
