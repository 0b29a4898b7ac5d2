"""Monte Carlo demonstration of the efficiency bound.

A sampler draws i.i.d. samples from a finite law (a named family resolved to
an exact finite space), the plug-in estimator is evaluated on each
replicate's empirical measure, and the report compares the empirical
variance of the root-n scaled error against the gradient's variance under
the true law, together with Wald interval coverage.

Reproducibility contract: the replicate streams are counter-based.  The
stream for replicate ``r`` is ``numpy``'s PCG64 generator seeded with
``SeedSequence((seed, r))``, so a report is a pure function of its
configuration.  Sampling itself draws one multinomial count vector over the
support per replicate.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .eic import derive_eic
from .estimate import eic_variance, normal_quantile
from .expr import FuncExpr, evaluate_func, func_base_vars
from .measure import FiniteProbSpace, RandVar

__all__ = ["McConfig", "McReport", "resolve_sampler", "run_mc"]


@dataclass(frozen=True)
class McConfig:
    """Sampler family, estimand, and experiment sizes for one study."""

    family: str
    params: dict
    estimand: FuncExpr
    n: int
    replicates: int
    seed: int
    level: float = 0.95
    column: str = "X"

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("sample size must be at least 2")
        if self.replicates < 1:
            raise ValueError("at least one replicate required")
        if not 0.0 < self.level < 1.0:
            raise ValueError("confidence level must lie in (0, 1)")


@dataclass(frozen=True)
class McReport:
    truth: float
    truth_exact: str
    bound: float
    bound_exact: str
    empirical_variance: float
    coverage: float
    n: int
    replicates: int
    seed: int
    level: float
    estimates_digest: dict = field(default_factory=dict)


def resolve_sampler(family: str, params: dict) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
    """Resolve a family name to (support, weights) with exact weights.

    Families: ``bernoulli`` (p), ``discrete`` (support, weights),
    ``uniform-grid`` (low, high, points: equally weighted grid), and
    ``gaussian-grid`` (mean, sd, points, span: grid weighted by the normal
    density, normalized exactly).
    """
    if family == "bernoulli":
        p = Fraction(str(params["p"]))
        if not 0 < p < 1:
            raise ValueError("bernoulli parameter must lie in (0, 1)")
        return (Fraction(0), Fraction(1)), (1 - p, p)
    if family == "discrete":
        support = tuple(Fraction(str(v)) for v in params["support"])
        weights = tuple(Fraction(str(w)) for w in params["weights"])
        if len(support) != len(weights):
            raise ValueError("support and weights must have equal length")
        if len(set(support)) != len(support):
            raise ValueError("support points must be distinct")
        if any(w < 0 for w in weights) or sum(weights) != 1:
            raise ValueError("weights must be nonnegative and sum to 1")
        kept = [(v, w) for v, w in zip(support, weights) if w > 0]
        return tuple(v for v, _ in kept), tuple(w for _, w in kept)
    if family == "uniform-grid":
        low, high = Fraction(str(params["low"])), Fraction(str(params["high"]))
        points = int(params["points"])
        if points < 1 or high <= low:
            raise ValueError("need high > low and at least one grid point")
        if points == 1:
            return ((low + high) / 2,), (Fraction(1),)
        step = (high - low) / (points - 1)
        support = tuple(low + step * i for i in range(points))
        return support, tuple(Fraction(1, points) for _ in support)
    if family == "gaussian-grid":
        mean = Fraction(str(params["mean"]))
        sd = Fraction(str(params["sd"]))
        points = int(params.get("points", 41))
        span = Fraction(str(params.get("span", 4)))
        if sd <= 0 or points < 3:
            raise ValueError("need positive sd and at least three grid points")
        step = 2 * span * sd / (points - 1)
        support = tuple(mean - span * sd + step * i for i in range(points))
        raw = [
            Fraction(math.exp(-float((v - mean) / sd) ** 2 / 2)) for v in support
        ]
        total = sum(raw)
        return support, tuple(w / total for w in raw)
    raise ValueError(f"unsupported sampler family {family!r}")


def run_mc(config: McConfig) -> McReport:
    """Run the study; identical configurations give bit-identical reports."""
    support, weights = resolve_sampler(config.family, config.params)
    names = func_base_vars(config.estimand)
    if not names <= {config.column}:
        raise ValueError(
            f"estimand uses variables {sorted(names)} but the sampler provides"
            f" only {config.column!r}"
        )
    truth_space = FiniteProbSpace(
        tuple(f"s{i}" for i in range(len(support))), weights
    )
    truth_binding = {config.column: RandVar(truth_space, support)}
    truth = evaluate_func(config.estimand, truth_space, truth_binding, "exact")
    eic = derive_eic(config.estimand).eic
    bound = eic_variance(eic, truth_space, truth_binding)

    probs = np.array([float(w) for w in weights], dtype=np.float64)
    probs = probs / probs.sum()
    z = normal_quantile((1 + config.level) / 2)
    truth_f = float(truth)
    sqrt_n = math.sqrt(config.n)

    estimates: list[float] = []
    errors: list[float] = []
    covered = 0
    for r in range(config.replicates):
        rng = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence((config.seed, r)))
        )
        counts = rng.multinomial(config.n, probs)
        kept = [(i, int(c)) for i, c in enumerate(counts) if c > 0]
        space = FiniteProbSpace(
            tuple(f"s{i}" for i, _ in kept),
            tuple(Fraction(c, config.n) for _, c in kept),
        )
        binding = {
            config.column: RandVar(space, tuple(support[i] for i, _ in kept))
        }
        estimate = evaluate_func(config.estimand, space, binding, "exact")
        estimate_f = float(estimate)
        estimates.append(estimate_f)
        errors.append(sqrt_n * (estimate_f - truth_f))
        se = math.sqrt(eic_variance(eic, space, binding) / config.n)
        if abs(estimate_f - truth_f) <= z * se:
            covered += 1

    if len(errors) > 1:
        empirical_variance = statistics.variance(errors)
    else:
        empirical_variance = 0.0
    digest = {
        "mean": statistics.fmean(estimates),
        "stdev": statistics.pstdev(estimates),
        "min": min(estimates),
        "max": max(estimates),
    }
    return McReport(
        truth=truth_f,
        truth_exact=str(truth),
        bound=float(bound),
        bound_exact=str(bound),
        empirical_variance=empirical_variance,
        coverage=covered / config.replicates,
        n=config.n,
        replicates=config.replicates,
        seed=config.seed,
        level=config.level,
        estimates_digest=digest,
    )
