"""Canonical normal form for expressions and the functional normalizer.

The normal form is a fully expanded rational function over two kinds of
atoms: base-variable symbols and primitive-moment symbols keyed by a
monomial in base variables.  Monomials are ordered graded-lexicographically
with base variables (alphabetical) before moment atoms (by the canonical
string of their inner monomial).  Two expressions denote the same object
exactly when their canonical forms are equal.

Equality of rational forms is decided by cross-multiplication
(n1*d2 - n2*d1 == 0); no multivariate gcd machinery is needed.  The only
reduction applied is cancellation of a monomial factor common to every term
of numerator and denominator, plus normalizing the denominator's leading
coefficient to one.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ExactModeError, NormalizationError
from .expr import (
    BaseVar,
    EmbedFunc,
    FuncConst,
    FuncExpr,
    FuncPower,
    FuncProduct,
    FuncSum,
    IntPower,
    Moment,
    Reciprocal,
    RvConst,
    RvExpr,
    RvProduct,
    RvSum,
    Smooth,
    f_pow,
    f_product,
    f_recip,
    f_sum,
    rv_embed,
    rv_pow,
    rv_product,
    rv_sum,
)

__all__ = [
    "CanonForm",
    "canonicalize_rv",
    "canonicalize_func",
    "normalize_functional",
    "func_from_form",
    "rv_from_form",
]

# A base monomial is a tuple of (variable name, exponent) sorted by name.
# An atom is ("v", name) or ("m", base monomial).  A monomial is a tuple of
# (atom, exponent) sorted by the atom sort key.  A polynomial is a dict from
# monomial to nonzero Fraction; its frozen form is a sorted tuple of items.

BaseMono = tuple[tuple[str, int], ...]
Atom = tuple
Mono = tuple
Poly = dict


def base_mono_string(mono: BaseMono) -> str:
    if not mono:
        return "1"
    parts = []
    for name, exp in mono:
        parts.append(name if exp == 1 else f"{name}^{exp}")
    return "*".join(parts)


def _atom_key(atom: Atom):
    kind, payload = atom
    if kind == "v":
        return (0, payload)
    return (1, base_mono_string(payload))


def _mono_key(mono: Mono):
    degree = sum(exp for _, exp in mono)
    flat = tuple(_atom_key(atom) for atom, exp in mono for _ in range(exp))
    return (degree, flat)


def _mono_mul(a: Mono, b: Mono) -> Mono:
    exps = {}
    for atom, exp in a:
        exps[atom] = exps.get(atom, 0) + exp
    for atom, exp in b:
        exps[atom] = exps.get(atom, 0) + exp
    return tuple(sorted(exps.items(), key=lambda item: _atom_key(item[0])))


def _p_zero() -> Poly:
    return {}

def _p_const(c: Fraction) -> Poly:
    return {(): c} if c != 0 else {}


def _p_atom(atom: Atom) -> Poly:
    return {((atom, 1),): Fraction(1)}


def _p_add(a: Poly, b: Poly) -> Poly:
    out = dict(a)
    for mono, coeff in b.items():
        new = out.get(mono, Fraction(0)) + coeff
        if new == 0:
            out.pop(mono, None)
        else:
            out[mono] = new
    return out


def _p_scale(a: Poly, c: Fraction) -> Poly:
    if c == 0:
        return {}
    return {mono: coeff * c for mono, coeff in a.items()}


def _p_mul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            mono = _mono_mul(m1, m2)
            new = out.get(mono, Fraction(0)) + c1 * c2
            if new == 0:
                out.pop(mono, None)
            else:
                out[mono] = new
    return out


def _p_pow(a: Poly, n: int) -> Poly:
    out = _p_const(Fraction(1))
    for _ in range(n):
        out = _p_mul(out, a)
    return out


def _p_sorted(a: Poly) -> tuple:
    return tuple(sorted(a.items(), key=lambda item: _mono_key(item[0])))


def _p_leading_coeff(a: Poly) -> Fraction:
    mono = max(a, key=_mono_key)
    return a[mono]


def _common_mono_factor(polys: list[Poly]) -> Mono:
    """Largest monomial dividing every term of every polynomial."""
    shared: dict | None = None
    for p in polys:
        for mono in p:
            exps = dict(mono)
            if shared is None:
                shared = exps
            else:
                shared = {
                    atom: min(exp, exps.get(atom, 0))
                    for atom, exp in shared.items()
                    if exps.get(atom, 0) > 0
                }
            if not shared:
                return ()
    return tuple(sorted((shared or {}).items(), key=lambda item: _atom_key(item[0])))


def _mono_div(mono: Mono, divisor: Mono) -> Mono:
    exps = dict(mono)
    for atom, exp in divisor:
        exps[atom] -= exp
        if exps[atom] == 0:
            del exps[atom]
    return tuple(sorted(exps.items(), key=lambda item: _atom_key(item[0])))


@dataclass(frozen=True, eq=False)
class CanonForm:
    """Rational-function normal form; equality via cross-multiplication."""

    num: tuple
    den: tuple

    @staticmethod
    def make(num: Poly, den: Poly) -> "CanonForm":
        if not den:
            raise ZeroDivisionError("canonical form with zero denominator")
        if not num:
            return CanonForm((), _p_sorted(_p_const(Fraction(1))))
        factor = _common_mono_factor([num, den])
        if factor:
            num = {_mono_div(m, factor): c for m, c in num.items()}
            den = {_mono_div(m, factor): c for m, c in den.items()}
        lead = _p_leading_coeff(den)
        if lead != 1:
            num = _p_scale(num, 1 / lead)
            den = _p_scale(den, 1 / lead)
        return CanonForm(_p_sorted(num), _p_sorted(den))

    @staticmethod
    def from_const(c) -> "CanonForm":
        return CanonForm.make(_p_const(Fraction(c)), _p_const(Fraction(1)))

    @staticmethod
    def zero() -> "CanonForm":
        return CanonForm.from_const(0)

    @staticmethod
    def one() -> "CanonForm":
        return CanonForm.from_const(1)

    @staticmethod
    def from_atom(atom: Atom) -> "CanonForm":
        return CanonForm.make(_p_atom(atom), _p_const(Fraction(1)))

    @property
    def is_zero(self) -> bool:
        return not self.num

    @property
    def is_polynomial(self) -> bool:
        return self.den == _p_sorted(_p_const(Fraction(1)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, CanonForm):
            return NotImplemented
        left = _p_mul(dict(self.num), dict(other.den))
        right = _p_mul(dict(other.num), dict(self.den))
        return _p_sorted(left) == _p_sorted(right)

    __hash__ = None  # equality is up to cross-multiplication

    def __add__(self, other: "CanonForm") -> "CanonForm":
        n1, d1 = dict(self.num), dict(self.den)
        n2, d2 = dict(other.num), dict(other.den)
        num = _p_add(_p_mul(n1, d2), _p_mul(n2, d1))
        return CanonForm.make(num, _p_mul(d1, d2))

    def __sub__(self, other: "CanonForm") -> "CanonForm":
        return self + other.scale(Fraction(-1))

    def __mul__(self, other: "CanonForm") -> "CanonForm":
        return CanonForm.make(
            _p_mul(dict(self.num), dict(other.num)),
            _p_mul(dict(self.den), dict(other.den)),
        )

    def __pow__(self, n: int) -> "CanonForm":
        out = CanonForm.one()
        for _ in range(n):
            out = out * self
        return out

    def scale(self, c: Fraction) -> "CanonForm":
        return CanonForm.make(_p_scale(dict(self.num), c), dict(self.den))

    def reciprocal(self) -> "CanonForm":
        if self.is_zero:
            raise NormalizationError("reciprocal of a functional equal to zero")
        return CanonForm.make(dict(self.den), dict(self.num))

    def __str__(self):
        num = _poly_string(self.num)
        if self.is_polynomial:
            return num
        return f"({num}) / ({_poly_string(self.den)})"


def _atom_string(atom: Atom) -> str:
    kind, payload = atom
    if kind == "v":
        return payload
    return f"E[{base_mono_string(payload)}]"


def _poly_string(sorted_poly: tuple) -> str:
    if not sorted_poly:
        return "0"
    parts = []
    for mono, coeff in sorted_poly:
        factors = []
        for atom, exp in mono:
            s = _atom_string(atom)
            factors.append(s if exp == 1 else f"{s}^{exp}")
        body = "*".join(factors)
        if not body:
            text = str(coeff)
        elif coeff == 1:
            text = body
        elif coeff == -1:
            text = f"-{body}"
        else:
            text = f"{coeff}*{body}"
        parts.append(text)
    out = " + ".join(parts)
    return out.replace("+ -", "- ")


# ---------------------------------------------------------------------------
# canonicalization


def canonicalize_rv(e: RvExpr) -> CanonForm:
    """Fully expanded normal form of a random-variable expression."""
    if isinstance(e, BaseVar):
        return CanonForm.from_atom(("v", e.name))
    if isinstance(e, RvConst):
        return CanonForm.from_const(e.value)
    if isinstance(e, RvSum):
        out = CanonForm.zero()
        for t in e.terms:
            out = out + canonicalize_rv(t)
        return out
    if isinstance(e, RvProduct):
        out = CanonForm.one()
        for f in e.factors:
            out = out * canonicalize_rv(f)
        return out
    if isinstance(e, IntPower):
        return canonicalize_rv(e.base) ** e.exponent
    if isinstance(e, EmbedFunc):
        return canonicalize_func(e.func)
    raise TypeError(f"not a random-variable expression: {e!r}")


def canonicalize_func(f: FuncExpr) -> CanonForm:
    """Normal form of a functional over primitive-moment atoms only."""
    if isinstance(f, FuncConst):
        return CanonForm.from_const(f.value)
    if isinstance(f, Moment):
        return _expectation_of_form(canonicalize_rv(f.arg))
    if isinstance(f, FuncSum):
        out = CanonForm.zero()
        for t in f.terms:
            out = out + canonicalize_func(t)
        return out
    if isinstance(f, FuncProduct):
        out = CanonForm.one()
        for x in f.factors:
            out = out * canonicalize_func(x)
        return out
    if isinstance(f, FuncPower):
        return canonicalize_func(f.base) ** f.exponent
    if isinstance(f, Reciprocal):
        return canonicalize_func(f.arg).reciprocal()
    if isinstance(f, Smooth):
        raise ExactModeError(
            f"smooth functional {f.tag!r} has no exact canonical form"
        )
    raise TypeError(f"not a functional expression: {f!r}")


def _split_mono(mono: Mono) -> tuple[BaseMono, Mono]:
    """Separate a mixed monomial into base-variable part and moment part."""
    base = []
    moments = []
    for atom, exp in mono:
        if atom[0] == "v":
            base.append((atom[1], exp))
        else:
            moments.append((atom, exp))
    return tuple(sorted(base)), tuple(moments)


def _expectation_of_form(form: CanonForm) -> CanonForm:
    """Apply linearity of expectation to a mixed-atom canonical form.

    Moment atoms are scalars, so they factor out of the expectation; the
    base-variable part of each term becomes a primitive-moment atom.  The
    denominator is scalar (moment atoms only) and passes through.
    """
    for mono, _ in form.den:
        for atom, _ in mono:
            if atom[0] == "v":
                raise NormalizationError(
                    "expectation of a form with base variables in a denominator"
                )
    num: Poly = {}
    for mono, coeff in form.num:
        base, moments = _split_mono(mono)
        new_mono = dict(moments)
        if base:
            atom = ("m", base)
            new_mono[atom] = new_mono.get(atom, 0) + 1
        new_mono = tuple(sorted(new_mono.items(), key=lambda it: _atom_key(it[0])))
        acc = num.get(new_mono, Fraction(0)) + coeff
        if acc == 0:
            num.pop(new_mono, None)
        else:
            num[new_mono] = acc
    return CanonForm.make(num, dict(form.den))


# ---------------------------------------------------------------------------
# rebuilding expressions from canonical forms


def _base_mono_rv(mono: BaseMono) -> RvExpr:
    return rv_product(*(rv_pow(BaseVar(name), exp) for name, exp in mono))


def _moment_atom_func(atom: Atom) -> FuncExpr:
    assert atom[0] == "m"
    return Moment(_base_mono_rv(atom[1]))


def _poly_to_func(sorted_poly: tuple) -> FuncExpr:
    terms = []
    for mono, coeff in sorted_poly:
        factors: list[FuncExpr] = [FuncConst(coeff)]
        for atom, exp in mono:
            if atom[0] == "v":
                raise ValueError("base variable in a scalar-functional polynomial")
            factors.append(f_pow(_moment_atom_func(atom), exp))
        terms.append(f_product(*factors))
    return f_sum(*terms)


def _poly_to_rv(sorted_poly: tuple) -> RvExpr:
    terms = []
    for mono, coeff in sorted_poly:
        factors: list[RvExpr] = [RvConst(coeff)]
        for atom, exp in mono:
            if atom[0] == "v":
                factors.append(rv_pow(BaseVar(atom[1]), exp))
            else:
                factors.append(rv_pow(rv_embed(_moment_atom_func(atom)), exp))
        terms.append(rv_product(*factors))
    return rv_sum(*terms)


def func_from_form(form: CanonForm) -> FuncExpr:
    """Functional expression denoting the canonical form, in canonical order."""
    num = _poly_to_func(form.num)
    if form.is_polynomial:
        return num
    return f_product(num, f_recip(_poly_to_func(form.den)))


def rv_from_form(form: CanonForm) -> RvExpr:
    """Random-variable expression denoting the canonical form."""
    num = _poly_to_rv(form.num)
    if form.is_polynomial:
        return num
    return rv_product(num, rv_embed(f_recip(_poly_to_func(form.den))))


# ---------------------------------------------------------------------------
# functional normalization


def normalize_functional(f: FuncExpr) -> FuncExpr:
    """Distribute embedded scalars out of moments by linearity.

    Every moment in the result takes a polynomial in base variables; the
    result denotes the same functional.  Smooth subtrees are preserved with
    normalized arguments.  Raises if a reciprocal's argument normalizes to
    the zero form.
    """
    if isinstance(f, FuncConst):
        return f
    if isinstance(f, Moment):
        return func_from_form(_expectation_of_form(canonicalize_rv(f.arg)))
    if isinstance(f, FuncSum):
        return f_sum(*(normalize_functional(t) for t in f.terms))
    if isinstance(f, FuncProduct):
        return f_product(*(normalize_functional(x) for x in f.factors))
    if isinstance(f, FuncPower):
        return f_pow(normalize_functional(f.base), f.exponent)
    if isinstance(f, Reciprocal):
        arg = normalize_functional(f.arg)
        try:
            if canonicalize_func(arg).is_zero:
                raise NormalizationError(
                    f"reciprocal of a functional that normalizes to zero: {f.arg}"
                )
        except ExactModeError:
            pass  # float-only subtree: zero test undecidable, leave as is
        return f_recip(arg)
    if isinstance(f, Smooth):
        return Smooth(f.tag, normalize_functional(f.arg))
    raise TypeError(f"not a functional expression: {f!r}")
