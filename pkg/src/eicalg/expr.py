"""Symbolic expressions for random variables and for scalar functionals.

Two expression families share one module.  Random-variable expressions
(``RvExpr``) denote elements of the function space over a finite probability
space; functional expressions (``FuncExpr``) denote scalar parameters built
from moments.  A functional appearing where a random variable is expected is
embedded as a constant function, and the operator overloads apply that
coercion automatically, so code can be written the way the formulas read::

    x = var("X")
    variance = E(x**2) - E(x)**2
    centered = x - E(x)          # an RvExpr: x minus its embedded mean

Expressions are immutable trees.  Smart constructors flatten nested sums and
products, fold constants, and drop neutral elements; they do not attempt any
deeper simplification (that is the canonicalizer's job).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .errors import EvaluationError, ExactModeError, NormalizationError
from .measure import FiniteProbSpace, RandVar, embed, expectation
from .numerals import format_decimal

__all__ = [
    "RvExpr",
    "BaseVar",
    "RvConst",
    "RvSum",
    "RvProduct",
    "IntPower",
    "EmbedFunc",
    "FuncExpr",
    "Moment",
    "FuncConst",
    "FuncSum",
    "FuncProduct",
    "FuncPower",
    "Reciprocal",
    "Smooth",
    "var",
    "E",
    "inv",
    "rv_const",
    "func_const",
    "rv_sum",
    "rv_product",
    "rv_pow",
    "rv_embed",
    "f_sum",
    "f_product",
    "f_pow",
    "f_recip",
    "SMOOTH_TABLE",
    "evaluate_rv",
    "evaluate_func",
    "rv_base_vars",
    "func_base_vars",
    "render_rv",
    "render_func",
]


def _coerce_const(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"cannot use {type(x).__name__} as an exact constant")


# ---------------------------------------------------------------------------
# node classes


@dataclass(frozen=True)
class RvExpr:
    """Base class for random-variable expressions."""

    def __add__(self, other):
        return rv_sum(self, _as_rv(other))

    def __radd__(self, other):
        return rv_sum(_as_rv(other), self)

    def __sub__(self, other):
        return rv_sum(self, _rv_neg(_as_rv(other)))

    def __rsub__(self, other):
        return rv_sum(_as_rv(other), _rv_neg(self))

    def __neg__(self):
        return _rv_neg(self)

    def __mul__(self, other):
        return rv_product(self, _as_rv(other))

    def __rmul__(self, other):
        return rv_product(_as_rv(other), self)

    def __pow__(self, n: int):
        return rv_pow(self, n)

    def __str__(self):
        return render_rv(self)


@dataclass(frozen=True)
class FuncExpr:
    """Base class for scalar-functional expressions."""

    def __add__(self, other):
        if isinstance(other, RvExpr):
            return rv_sum(rv_embed(self), other)
        return f_sum(self, _as_func(other))

    def __radd__(self, other):
        if isinstance(other, RvExpr):
            return rv_sum(other, rv_embed(self))
        return f_sum(_as_func(other), self)

    def __sub__(self, other):
        if isinstance(other, RvExpr):
            return rv_sum(rv_embed(self), _rv_neg(other))
        return f_sum(self, _f_neg(_as_func(other)))

    def __rsub__(self, other):
        if isinstance(other, RvExpr):
            return rv_sum(other, _rv_neg(rv_embed(self)))
        return f_sum(_as_func(other), _f_neg(self))

    def __neg__(self):
        return _f_neg(self)

    def __mul__(self, other):
        if isinstance(other, RvExpr):
            return rv_product(rv_embed(self), other)
        return f_product(self, _as_func(other))

    def __rmul__(self, other):
        if isinstance(other, RvExpr):
            return rv_product(other, rv_embed(self))
        return f_product(_as_func(other), self)

    def __pow__(self, n: int):
        return f_pow(self, n)

    def __str__(self):
        return render_func(self)


@dataclass(frozen=True)
class BaseVar(RvExpr):
    name: str


@dataclass(frozen=True)
class RvConst(RvExpr):
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", _coerce_const(self.value))


@dataclass(frozen=True)
class RvSum(RvExpr):
    terms: tuple[RvExpr, ...]


@dataclass(frozen=True)
class RvProduct(RvExpr):
    factors: tuple[RvExpr, ...]


@dataclass(frozen=True)
class IntPower(RvExpr):
    base: RvExpr
    exponent: int

    def __post_init__(self):
        if not isinstance(self.exponent, int) or self.exponent < 1:
            raise ValueError("integer power nodes require exponent >= 1")


@dataclass(frozen=True)
class EmbedFunc(RvExpr):
    """A scalar functional used as a constant function."""

    func: "FuncExpr"


@dataclass(frozen=True)
class Moment(FuncExpr):
    """Expectation of a random-variable expression."""

    arg: RvExpr


@dataclass(frozen=True)
class FuncConst(FuncExpr):
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", _coerce_const(self.value))


@dataclass(frozen=True)
class FuncSum(FuncExpr):
    terms: tuple[FuncExpr, ...]


@dataclass(frozen=True)
class FuncProduct(FuncExpr):
    factors: tuple[FuncExpr, ...]


@dataclass(frozen=True)
class FuncPower(FuncExpr):
    base: FuncExpr
    exponent: int

    def __post_init__(self):
        if not isinstance(self.exponent, int) or self.exponent < 1:
            raise ValueError("integer power nodes require exponent >= 1")


@dataclass(frozen=True)
class Reciprocal(FuncExpr):
    arg: FuncExpr


@dataclass(frozen=True)
class Smooth(FuncExpr):
    """A registered smooth function applied to a functional (float mode only)."""

    tag: str
    arg: FuncExpr

    def __post_init__(self):
        if self.tag not in SMOOTH_TABLE:
            raise ValueError(f"unknown smooth function tag {self.tag!r}")


# ---------------------------------------------------------------------------
# smooth-function registry


@dataclass(frozen=True)
class SmoothFunc:
    tag: str
    evaluate: Callable[[float], float]
    # derivative as a functional of the inner argument, e.g. log -> inv(arg)
    derivative: Callable[[FuncExpr], FuncExpr] = field(repr=False)


def _d_exp(arg: FuncExpr) -> FuncExpr:
    return Smooth("exp", arg)


def _d_log(arg: FuncExpr) -> FuncExpr:
    return f_recip(arg)


def _d_sqrt(arg: FuncExpr) -> FuncExpr:
    return f_product(FuncConst(Fraction(1, 2)), f_recip(Smooth("sqrt", arg)))


SMOOTH_TABLE: dict[str, SmoothFunc] = {
    "exp": SmoothFunc("exp", math.exp, _d_exp),
    "log": SmoothFunc("log", math.log, _d_log),
    "sqrt": SmoothFunc("sqrt", math.sqrt, _d_sqrt),
}


# ---------------------------------------------------------------------------
# coercion and smart constructors


def _as_rv(x) -> RvExpr:
    if isinstance(x, RvExpr):
        return x
    if isinstance(x, FuncExpr):
        return rv_embed(x)
    return RvConst(_coerce_const(x))


def _as_func(x) -> FuncExpr:
    if isinstance(x, FuncExpr):
        return x
    if isinstance(x, RvExpr):
        raise TypeError("a random-variable expression is not a scalar functional")
    return FuncConst(_coerce_const(x))


def _rv_neg(e: RvExpr) -> RvExpr:
    return rv_product(RvConst(Fraction(-1)), e)


def _f_neg(f: FuncExpr) -> FuncExpr:
    return f_product(FuncConst(Fraction(-1)), f)


def rv_const(x) -> RvConst:
    return RvConst(_coerce_const(x))


def func_const(x) -> FuncConst:
    return FuncConst(_coerce_const(x))


def rv_sum(*terms) -> RvExpr:
    """Flattened sum; constants fold and a zero constant is dropped."""
    flat: list[RvExpr] = []
    const = Fraction(0)
    for t in terms:
        t = _as_rv(t)
        if isinstance(t, RvSum):
            flat.extend(t.terms)
        elif isinstance(t, RvConst):
            const += t.value
        else:
            flat.append(t)
    # nested sums were already flat and const-free, except for their own consts
    merged: list[RvExpr] = []
    for t in flat:
        if isinstance(t, RvConst):
            const += t.value
        else:
            merged.append(t)
    if const != 0:
        merged.append(RvConst(const))
    if not merged:
        return RvConst(Fraction(0))
    if len(merged) == 1:
        return merged[0]
    return RvSum(tuple(merged))


def rv_product(*factors) -> RvExpr:
    """Flattened product; constants fold in front, zero annihilates."""
    flat: list[RvExpr] = []
    const = Fraction(1)
    for f in factors:
        f = _as_rv(f)
        if isinstance(f, RvProduct):
            flat.extend(f.factors)
        elif isinstance(f, RvConst):
            const *= f.value
        else:
            flat.append(f)
    merged: list[RvExpr] = []
    for f in flat:
        if isinstance(f, RvConst):
            const *= f.value
        else:
            merged.append(f)
    if const == 0:
        return RvConst(Fraction(0))
    if const != 1:
        merged.insert(0, RvConst(const))
    if not merged:
        return RvConst(Fraction(1))
    if len(merged) == 1:
        return merged[0]
    return RvProduct(tuple(merged))


def rv_pow(base, n: int) -> RvExpr:
    base = _as_rv(base)
    if not isinstance(n, int) or n < 0:
        raise ValueError("integer power >= 0 required")
    if n == 0:
        return RvConst(Fraction(1))
    if n == 1:
        return base
    if isinstance(base, RvConst):
        return RvConst(base.value**n)
    return IntPower(base, n)


def rv_embed(f: FuncExpr) -> RvExpr:
    if isinstance(f, FuncConst):
        return RvConst(f.value)
    return EmbedFunc(f)


def f_sum(*terms) -> FuncExpr:
    flat: list[FuncExpr] = []
    const = Fraction(0)
    for t in terms:
        t = _as_func(t)
        if isinstance(t, FuncSum):
            flat.extend(t.terms)
        elif isinstance(t, FuncConst):
            const += t.value
        else:
            flat.append(t)
    merged: list[FuncExpr] = []
    for t in flat:
        if isinstance(t, FuncConst):
            const += t.value
        else:
            merged.append(t)
    if const != 0:
        merged.append(FuncConst(const))
    if not merged:
        return FuncConst(Fraction(0))
    if len(merged) == 1:
        return merged[0]
    return FuncSum(tuple(merged))


def f_product(*factors) -> FuncExpr:
    flat: list[FuncExpr] = []
    const = Fraction(1)
    for f in factors:
        f = _as_func(f)
        if isinstance(f, FuncProduct):
            flat.extend(f.factors)
        elif isinstance(f, FuncConst):
            const *= f.value
        else:
            flat.append(f)
    merged: list[FuncExpr] = []
    for f in flat:
        if isinstance(f, FuncConst):
            const *= f.value
        else:
            merged.append(f)
    if const == 0:
        return FuncConst(Fraction(0))
    if const != 1:
        merged.insert(0, FuncConst(const))
    if not merged:
        return FuncConst(Fraction(1))
    if len(merged) == 1:
        return merged[0]
    return FuncProduct(tuple(merged))


def f_pow(base, n: int) -> FuncExpr:
    base = _as_func(base)
    if not isinstance(n, int) or n < 0:
        raise ValueError("integer power >= 0 required")
    if n == 0:
        return FuncConst(Fraction(1))
    if n == 1:
        return base
    if isinstance(base, FuncConst):
        return FuncConst(base.value**n)
    return FuncPower(base, n)


def f_recip(arg) -> FuncExpr:
    arg = _as_func(arg)
    if isinstance(arg, FuncConst):
        if arg.value == 0:
            raise NormalizationError("reciprocal of the zero functional")
        return FuncConst(1 / arg.value)
    if isinstance(arg, Reciprocal):
        return arg.arg
    return Reciprocal(arg)


def var(name: str) -> BaseVar:
    return BaseVar(name)


def E(arg) -> Moment:
    """Expectation of a random-variable expression."""
    return Moment(_as_rv(arg))


def inv(arg) -> FuncExpr:
    """Reciprocal of a functional."""
    return f_recip(arg)


# ---------------------------------------------------------------------------
# free variables


def rv_base_vars(e: RvExpr) -> set[str]:
    if isinstance(e, BaseVar):
        return {e.name}
    if isinstance(e, RvConst):
        return set()
    if isinstance(e, RvSum):
        return set().union(*(rv_base_vars(t) for t in e.terms))
    if isinstance(e, RvProduct):
        return set().union(*(rv_base_vars(f) for f in e.factors))
    if isinstance(e, IntPower):
        return rv_base_vars(e.base)
    if isinstance(e, EmbedFunc):
        return func_base_vars(e.func)
    raise TypeError(f"not a random-variable expression: {e!r}")


def func_base_vars(f: FuncExpr) -> set[str]:
    if isinstance(f, FuncConst):
        return set()
    if isinstance(f, Moment):
        return rv_base_vars(f.arg)
    if isinstance(f, FuncSum):
        return set().union(*(func_base_vars(t) for t in f.terms))
    if isinstance(f, FuncProduct):
        return set().union(*(func_base_vars(x) for x in f.factors))
    if isinstance(f, (FuncPower,)):
        return func_base_vars(f.base)
    if isinstance(f, (Reciprocal, Smooth)):
        return func_base_vars(f.arg)
    raise TypeError(f"not a functional expression: {f!r}")


# ---------------------------------------------------------------------------
# evaluation on a concrete space


def evaluate_rv(
    e: RvExpr,
    space: FiniteProbSpace,
    binding: dict[str, RandVar],
    mode: str = "exact",
) -> RandVar:
    """Exact pointwise evaluation of an expression under a binding.

    Embedded functionals evaluate through :func:`evaluate_func` and are
    embedded as constant functions.  In float mode the value of a smooth
    functional is carried exactly as the rational equal to its float.
    """
    if isinstance(e, BaseVar):
        if e.name not in binding:
            raise EvaluationError(f"unbound variable {e.name!r}")
        v = binding[e.name]
        if v.space != space:
            raise EvaluationError(f"binding for {e.name!r} lives on another space")
        return v
    if isinstance(e, RvConst):
        return embed(e.value, space)
    if isinstance(e, RvSum):
        out = embed(0, space)
        for t in e.terms:
            out = out + evaluate_rv(t, space, binding, mode)
        return out
    if isinstance(e, RvProduct):
        out = embed(1, space)
        for f in e.factors:
            out = out * evaluate_rv(f, space, binding, mode)
        return out
    if isinstance(e, IntPower):
        return evaluate_rv(e.base, space, binding, mode) ** e.exponent
    if isinstance(e, EmbedFunc):
        value = evaluate_func(e.func, space, binding, mode)
        if isinstance(value, float):
            value = Fraction(value)
        return embed(value, space)
    raise TypeError(f"not a random-variable expression: {e!r}")


def evaluate_func(
    f: FuncExpr,
    space: FiniteProbSpace,
    binding: dict[str, RandVar],
    mode: str = "exact",
):
    """Value of a functional at the law of the space.

    Returns an exact rational in exact mode, a float in float mode.  Smooth
    nodes require float mode.
    """
    if mode not in ("exact", "float"):
        raise ValueError(f"unknown mode {mode!r}")
    value = _eval_func(f, space, binding, mode)
    if mode == "float":
        return float(value)
    return value


def _eval_func(f, space, binding, mode):
    if isinstance(f, FuncConst):
        return f.value
    if isinstance(f, Moment):
        return expectation(space, evaluate_rv(f.arg, space, binding, mode))
    if isinstance(f, FuncSum):
        return sum((_eval_func(t, space, binding, mode) for t in f.terms), Fraction(0))
    if isinstance(f, FuncProduct):
        out = Fraction(1)
        for x in f.factors:
            out = out * _eval_func(x, space, binding, mode)
        return out
    if isinstance(f, FuncPower):
        return _eval_func(f.base, space, binding, mode) ** f.exponent
    if isinstance(f, Reciprocal):
        v = _eval_func(f.arg, space, binding, mode)
        if v == 0:
            raise EvaluationError("reciprocal of a functional evaluating to zero")
        return 1 / v
    if isinstance(f, Smooth):
        if mode != "float":
            raise ExactModeError(
                f"smooth functional {f.tag!r} cannot be evaluated exactly"
            )
        x = float(_eval_func(f.arg, space, binding, mode))
        try:
            y = SMOOTH_TABLE[f.tag].evaluate(x)
        except ValueError as exc:
            raise EvaluationError(f"{f.tag}({x}) is undefined") from exc
        return Fraction(y)
    raise TypeError(f"not a functional expression: {f!r}")


# ---------------------------------------------------------------------------
# rendering
#
# Deterministic, fully parenthesized where needed, and round-trippable
# through the CLI grammar.  Precedence levels: 1 additive, 2 multiplicative,
# 3 power base (atoms only).  The grammar has no unary minus, so a leading
# negative renders as "0 - ...".


def _const_string(q: Fraction) -> str:
    """Nonnegative constant as a decimal literal, or p*inv(q) fallback."""
    dec = format_decimal(q)
    if dec is not None:
        return dec
    if q.numerator == 1:
        return f"inv({q.denominator})"
    return f"{q.numerator}*inv({q.denominator})"


def _split_sign_rv(e: RvExpr) -> tuple[bool, RvExpr]:
    if isinstance(e, RvConst) and e.value < 0:
        return True, RvConst(-e.value)
    if (
        isinstance(e, RvProduct)
        and isinstance(e.factors[0], RvConst)
        and e.factors[0].value < 0
    ):
        return True, rv_product(RvConst(-e.factors[0].value), *e.factors[1:])
    return False, e


def _split_sign_func(f: FuncExpr) -> tuple[bool, FuncExpr]:
    if isinstance(f, FuncConst) and f.value < 0:
        return True, FuncConst(-f.value)
    if (
        isinstance(f, FuncProduct)
        and isinstance(f.factors[0], FuncConst)
        and f.factors[0].value < 0
    ):
        return True, f_product(FuncConst(-f.factors[0].value), *f.factors[1:])
    return False, f


def render_rv(e: RvExpr, prec: int = 0) -> str:
    if isinstance(e, EmbedFunc):
        return render_func(e.func, prec)
    if isinstance(e, BaseVar):
        return e.name
    if isinstance(e, RvConst):
        neg, mag = _split_sign_rv(e)
        if neg:
            s = f"0 - {_const_string(mag.value)}"
            return f"({s})" if prec >= 1 else s
        s = _const_string(e.value)
        if "*" in s and prec >= 3:
            return f"({s})"
        return s
    if isinstance(e, RvSum):
        parts = []
        for i, t in enumerate(e.terms):
            neg, mag = _split_sign_rv(t)
            text = render_rv(mag, 2)
            if i == 0:
                parts.append(f"0 - {text}" if neg else text)
            else:
                parts.append(f"- {text}" if neg else f"+ {text}")
        s = " ".join(parts)
        return f"({s})" if prec >= 2 else s
    if isinstance(e, RvProduct):
        neg, mag = _split_sign_rv(e)
        if neg:
            s = f"0 - {render_rv(mag, 2)}"
            return f"({s})" if prec >= 1 else s
        s = "*".join(render_rv(f, 3) for f in e.factors)
        return f"({s})" if prec >= 3 else s
    if isinstance(e, IntPower):
        return f"{render_rv(e.base, 3)}^{e.exponent}"
    raise TypeError(f"not a random-variable expression: {e!r}")


def render_func(f: FuncExpr, prec: int = 0) -> str:
    if isinstance(f, Moment):
        return f"E[{render_rv(f.arg, 0)}]"
    if isinstance(f, Reciprocal):
        return f"inv({render_func(f.arg, 0)})"
    if isinstance(f, Smooth):
        return f"{f.tag}({render_func(f.arg, 0)})"
    if isinstance(f, FuncConst):
        neg, mag = _split_sign_func(f)
        if neg:
            s = f"0 - {_const_string(mag.value)}"
            return f"({s})" if prec >= 1 else s
        s = _const_string(f.value)
        if "*" in s and prec >= 3:
            return f"({s})"
        return s
    if isinstance(f, FuncSum):
        parts = []
        for i, t in enumerate(f.terms):
            neg, mag = _split_sign_func(t)
            text = render_func(mag, 2)
            if i == 0:
                parts.append(f"0 - {text}" if neg else text)
            else:
                parts.append(f"- {text}" if neg else f"+ {text}")
        s = " ".join(parts)
        return f"({s})" if prec >= 2 else s
    if isinstance(f, FuncProduct):
        neg, mag = _split_sign_func(f)
        if neg:
            s = f"0 - {render_func(mag, 2)}"
            return f"({s})" if prec >= 1 else s
        s = "*".join(render_func(x, 3) for x in f.factors)
        return f"({s})" if prec >= 3 else s
    if isinstance(f, FuncPower):
        return f"{render_func(f.base, 3)}^{f.exponent}"
    raise TypeError(f"not a functional expression: {f!r}")
