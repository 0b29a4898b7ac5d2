"""Gradient calculus for scalar functionals of a law.

``derive_eic`` turns a functional of moments into its canonical gradient by
structural recursion: the base rule sends a moment to its centered argument,
and sums, products, powers, reciprocals, and registered smooth functions are
handled by linearity, the Leibniz rule, and the chain rule.  The result is
always exactly mean-zero.

``pathwise_derivative_exact`` is the independent certificate: it tilts the
weights along a mean-zero score direction, expands the functional as a
polynomial in the tilt parameter with exact coefficients, and reads off the
derivative at zero.  For a correct gradient this must equal the inner
product of the gradient with the score, with no tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .canon import canonicalize_func, normalize_functional
from .errors import ExactModeError
from .expr import (
    FuncConst,
    FuncExpr,
    FuncPower,
    FuncProduct,
    FuncSum,
    Moment,
    Reciprocal,
    RvConst,
    RvExpr,
    Smooth,
    SMOOTH_TABLE,
    evaluate_func,
    evaluate_rv,
    f_pow,
    f_recip,
    func_base_vars,
    render_func,
    rv_embed,
    rv_pow,
    rv_product,
    rv_sum,
)
from .measure import FiniteProbSpace, RandVar, expectation, inner
from .sampling import random_binding, random_score, random_space, trial_rng

__all__ = [
    "EicResult",
    "PathSpec",
    "derive_eic",
    "make_path",
    "pathwise_derivative_exact",
    "pathwise_derivative_numeric",
    "certify_eic",
    "CertifyReport",
]


@dataclass(frozen=True)
class EicResult:
    """A derived gradient with its normalized estimand and rule trace."""

    estimand: FuncExpr
    eic: RvExpr
    trace: tuple[tuple[str, str], ...]


def derive_eic(psi: FuncExpr, mode: str = "exact") -> EicResult:
    """Derive the canonical gradient of a functional of moments.

    The functional is normalized first, so the only place randomness enters
    the recursion is the moment base rule.  In exact mode smooth nodes are
    rejected; in float mode the chain rule applies their registered
    derivative.
    """
    normalized = normalize_functional(psi)
    trace: list[tuple[str, str]] = []
    eic = _gradient(normalized, trace, mode)
    return EicResult(estimand=normalized, eic=eic, trace=tuple(trace))


def _gradient(f: FuncExpr, trace: list, mode: str) -> RvExpr:
    if isinstance(f, FuncConst):
        trace.append(("constant", render_func(f)))
        return RvConst(Fraction(0))
    if isinstance(f, Moment):
        trace.append(("moment", render_func(f)))
        return rv_sum(f.arg, rv_product(RvConst(Fraction(-1)), rv_embed(f)))
    if isinstance(f, FuncSum):
        trace.append(("linearity", render_func(f)))
        return rv_sum(*(_gradient(t, trace, mode) for t in f.terms))
    if isinstance(f, FuncProduct):
        trace.append(("product-rule", render_func(f)))
        terms = []
        for i, factor in enumerate(f.factors):
            if isinstance(factor, FuncConst):
                continue  # constant factor: gradient term vanishes
            pieces: list[RvExpr] = []
            for j, other in enumerate(f.factors):
                if j == i:
                    pieces.append(_gradient(factor, trace, mode))
                else:
                    pieces.append(rv_embed(other))
            terms.append(rv_product(*pieces))
        return rv_sum(*terms)
    if isinstance(f, FuncPower):
        trace.append(("power-rule", render_func(f)))
        return rv_product(
            RvConst(Fraction(f.exponent)),
            rv_pow(rv_embed(f.base), f.exponent - 1),
            _gradient(f.base, trace, mode),
        )
    if isinstance(f, Reciprocal):
        trace.append(("reciprocal-rule", render_func(f)))
        return rv_product(
            RvConst(Fraction(-1)),
            rv_embed(f_pow(f_recip(f.arg), 2)),
            _gradient(f.arg, trace, mode),
        )
    if isinstance(f, Smooth):
        if mode != "float":
            raise ExactModeError(
                f"smooth functional {f.tag!r} requires float mode"
            )
        trace.append(("chain-rule", render_func(f)))
        derivative = SMOOTH_TABLE[f.tag].derivative(f.arg)
        return rv_product(rv_embed(derivative), _gradient(f.arg, trace, mode))
    raise TypeError(f"not a functional expression: {f!r}")


# ---------------------------------------------------------------------------
# paths and pathwise derivatives


@dataclass(frozen=True)
class PathSpec:
    """A one-dimensional tilt of a finite law along a mean-zero score.

    The tilted weights are w_i * (1 + eps * s_i), which stay exactly
    normalized because the score has mean zero, and stay positive for
    |eps| <= epsilon_bound.
    """

    space: FiniteProbSpace
    score: RandVar
    epsilon_bound: Fraction

    def __post_init__(self):
        if self.score.space != self.space:
            raise ValueError("score does not live on the path's space")
        if expectation(self.space, self.score) != 0:
            raise ValueError("path score must have expectation exactly zero")
        if self.epsilon_bound <= 0:
            raise ValueError("epsilon bound must be positive")
        worst = max(abs(s) for s in self.score.values)
        if worst * self.epsilon_bound >= 1:
            raise ValueError("tilted weights lose positivity within the bound")


def make_path(
    space: FiniteProbSpace, score: RandVar, epsilon_bound: Fraction | None = None
) -> PathSpec:
    """Path with the default bound 1 / (2 max|s|), keeping a positivity margin."""
    worst = max(abs(s) for s in score.values)
    if epsilon_bound is None:
        epsilon_bound = Fraction(1, 2 * worst) if worst > 0 else Fraction(1)
    return PathSpec(space=space, score=score, epsilon_bound=epsilon_bound)


def tilted_space(path: PathSpec, eps: Fraction) -> FiniteProbSpace:
    if abs(eps) > path.epsilon_bound:
        raise ValueError("tilt parameter outside the path's bound")
    weights = tuple(
        w * (1 + eps * s) for w, s in zip(path.space.weights, path.score.values)
    )
    return FiniteProbSpace(path.space.outcomes, weights)


# dense univariate polynomials over Q, little-endian coefficients
def _upoly_add(a, b):
    n = max(len(a), len(b))
    return tuple(
        (a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)
    )


def _upoly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return tuple(out)


def _upoly_pow(a, n):
    out = (Fraction(1),)
    for _ in range(n):
        out = _upoly_mul(out, a)
    return out


def _require_moment_polynomial(f: FuncExpr):
    if isinstance(f, (FuncConst, Moment)):
        return
    if isinstance(f, FuncSum):
        for t in f.terms:
            _require_moment_polynomial(t)
        return
    if isinstance(f, FuncProduct):
        for x in f.factors:
            _require_moment_polynomial(x)
        return
    if isinstance(f, FuncPower):
        _require_moment_polynomial(f.base)
        return
    raise ExactModeError(
        f"exact pathwise derivative requires a polynomial in moments: {render_func(f)}"
    )


def pathwise_derivative_exact(
    psi: FuncExpr, path: PathSpec, binding: dict[str, RandVar]
) -> Fraction:
    """d/deps of psi at the tilted law, evaluated exactly at eps = 0.

    Along the linear tilt every moment is affine in eps with exact rational
    coefficients, so the functional is a polynomial in eps; the derivative
    is its degree-one coefficient.
    """
    normalized = normalize_functional(psi)
    _require_moment_polynomial(normalized)
    space, score = path.space, path.score

    def eval_poly(f: FuncExpr) -> tuple:
        if isinstance(f, FuncConst):
            return (f.value,)
        if isinstance(f, Moment):
            values = evaluate_rv(f.arg, space, binding)
            level = expectation(space, values)
            slope = inner(space, values, score)
            return (level, slope)
        if isinstance(f, FuncSum):
            out = (Fraction(0),)
            for t in f.terms:
                out = _upoly_add(out, eval_poly(t))
            return out
        if isinstance(f, FuncProduct):
            out = (Fraction(1),)
            for x in f.factors:
                out = _upoly_mul(out, eval_poly(x))
            return out
        if isinstance(f, FuncPower):
            return _upoly_pow(eval_poly(f.base), f.exponent)
        raise ExactModeError("non-polynomial functional in exact path derivative")

    coeffs = eval_poly(normalized)
    return coeffs[1] if len(coeffs) > 1 else Fraction(0)


def pathwise_derivative_numeric(
    psi: FuncExpr, path: PathSpec, binding: dict[str, RandVar], h: float
) -> float:
    """Central-difference derivative along the tilt, in float arithmetic."""
    eps = Fraction(h)
    if eps <= 0 or eps > path.epsilon_bound:
        raise ValueError("step size must lie within the path's epsilon bound")

    def at(e: Fraction) -> float:
        space = tilted_space(path, e)
        rebased = {
            name: RandVar(space, v.values) for name, v in binding.items()
        }
        return evaluate_func(psi, space, rebased, mode="float")

    return (at(eps) - at(-eps)) / (2 * float(eps))


# ---------------------------------------------------------------------------
# certification


@dataclass(frozen=True)
class CertifyReport:
    estimand: str
    mode: str
    trials: int
    passed: bool
    counterexample: str | None


def certify_eic(
    psi: FuncExpr,
    trials: int,
    seed: int,
    mode: str = "exact",
    candidate: RvExpr | None = None,
    max_outcomes: int = 8,
    rel_tol: float = 1e-6,
    h: float = 1e-6,
    positive_vars: bool = False,
) -> CertifyReport:
    """Check the pathwise-derivative identity on seeded random instances.

    For each trial a random space, integer binding, and centered integer
    score are drawn; the (derived or supplied) gradient must have mean
    exactly zero under the trial law, and the exact tilt derivative must
    equal its inner product with the score.  The mean-zero check matters:
    scores are orthogonal to constants, so the derivative identity alone
    cannot see a missing centering.  Exact mode compares rationals with
    zero tolerance; float mode compares the central difference at relative
    tolerance ``rel_tol``.  Failures are reported, not raised.
    """
    eic = candidate if candidate is not None else derive_eic(psi, mode=mode).eic
    names = sorted(func_base_vars(psi))
    counterexample = None
    for index in range(trials):
        rng = trial_rng(seed, index)
        space = random_space(rng, max_outcomes=max_outcomes)
        low = 1 if positive_vars else -5
        binding = random_binding(rng, space, names, low=low, high=5)
        score = random_score(rng, space)
        path = make_path(space, score)
        eic_values = evaluate_rv(eic, space, binding, mode)
        eic_mean = expectation(space, eic_values)
        if mode == "exact":
            mean_ok = eic_mean == 0
        else:
            scale = max(1.0, max(abs(float(v)) for v in eic_values.values))
            mean_ok = abs(float(eic_mean)) <= rel_tol * scale
        if not mean_ok:
            counterexample = (
                f"trial {index}: gradient mean {eic_mean} is not zero;"
                f" weights={[str(w) for w in space.weights]}"
            )
            break
        gradient_side = inner(space, eic_values, score)
        if mode == "exact":
            path_side = pathwise_derivative_exact(psi, path, binding)
            ok = path_side == gradient_side
        else:
            path_side = pathwise_derivative_numeric(psi, path, binding, h)
            scale = max(abs(path_side), abs(float(gradient_side)), 1e-12)
            ok = abs(path_side - float(gradient_side)) <= rel_tol * scale
        if not ok:
            counterexample = (
                f"trial {index}: weights={[str(w) for w in space.weights]}"
                f" binding={{{', '.join(f'{n}={[str(v) for v in binding[n].values]}' for n in names)}}}"
                f" score={[str(s) for s in score.values]}"
                f" path-derivative={path_side} inner-product={gradient_side}"
            )
            break
    return CertifyReport(
        estimand=render_func(psi),
        mode=mode,
        trials=trials,
        passed=counterexample is None,
        counterexample=counterexample,
    )


def mean_zero_certificate(eic: RvExpr) -> bool:
    """Symbolic check that a gradient expression has expectation zero."""
    try:
        return canonicalize_func(Moment(eic)).is_zero
    except ExactModeError:
        return False
