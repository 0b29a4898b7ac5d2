"""Monte Carlo harness: samplers, determinism, and bound sanity."""

from dataclasses import replace
from fractions import Fraction as Q

import pytest

from eicalg.expr import E, var
from eicalg.mc import McConfig, resolve_sampler, run_mc

X = var("X")
MEAN = E(X)
VARIANCE = E(X**2) - E(X) ** 2


def bernoulli_config(p="0.5", **overrides):
    base = McConfig(
        family="bernoulli",
        params={"p": p},
        estimand=MEAN,
        n=200,
        replicates=50,
        seed=3,
    )
    return replace(base, **overrides) if overrides else base


class TestSamplers:
    def test_bernoulli(self):
        support, weights = resolve_sampler("bernoulli", {"p": "0.3"})
        assert support == (0, 1)
        assert weights == (Q(7, 10), Q(3, 10))

    def test_discrete(self):
        support, weights = resolve_sampler(
            "discrete", {"support": ["0", "1", "2"], "weights": ["0.25", "0.5", "0.25"]}
        )
        assert support == (0, 1, 2)
        assert sum(weights) == 1

    def test_uniform_grid(self):
        support, weights = resolve_sampler(
            "uniform-grid", {"low": "0", "high": "1", "points": 5}
        )
        assert support == (0, Q(1, 4), Q(1, 2), Q(3, 4), 1)
        assert all(w == Q(1, 5) for w in weights)

    def test_gaussian_grid_normalizes(self):
        support, weights = resolve_sampler(
            "gaussian-grid", {"mean": "0", "sd": "1", "points": 21}
        )
        assert len(support) == 21
        assert sum(weights) == 1

    def test_unknown_family(self):
        with pytest.raises(ValueError):
            resolve_sampler("cauchy", {})

    def test_bad_weights(self):
        with pytest.raises(ValueError):
            resolve_sampler(
                "discrete", {"support": ["0", "1"], "weights": ["0.5", "0.6"]}
            )


class TestRunMc:
    def test_bernoulli_half_bound(self):
        report = run_mc(bernoulli_config())
        assert report.bound_exact == "1/4"

    def test_bernoulli_three_tenths_bound(self):
        report = run_mc(bernoulli_config(p="0.3"))
        assert report.bound_exact == "21/100"
        assert report.truth_exact == "3/10"

    def test_point_mass_degenerate(self):
        config = McConfig(
            family="discrete",
            params={"support": ["2"], "weights": ["1"]},
            estimand=MEAN,
            n=50,
            replicates=20,
            seed=1,
        )
        report = run_mc(config)
        assert report.empirical_variance == 0.0
        assert report.coverage == 1.0
        assert report.truth_exact == "2"

    def test_deterministic_reports(self):
        first = run_mc(bernoulli_config(p="0.3"))
        second = run_mc(bernoulli_config(p="0.3"))
        assert first == second

    def test_variance_bound_on_three_point_law(self):
        config = McConfig(
            family="discrete",
            params={"support": ["0", "1", "2"], "weights": ["0.25", "0.5", "0.25"]},
            estimand=VARIANCE,
            n=100,
            replicates=20,
            seed=5,
        )
        report = run_mc(config)
        # exact finite-space computation: Var((X-1)^2 - 1/2) = 1/4
        assert report.bound_exact == "1/4"
        assert report.truth_exact == "1/2"

    def test_estimand_variables_validated(self):
        config = McConfig(
            family="bernoulli",
            params={"p": "0.5"},
            estimand=E(var("Z")),
            n=10,
            replicates=2,
            seed=0,
        )
        with pytest.raises(ValueError):
            run_mc(config)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            bernoulli_config(n=1)
        with pytest.raises(ValueError):
            bernoulli_config(level=1.2)
