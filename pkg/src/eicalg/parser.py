"""Surface syntax for functionals.

Grammar::

    expr   := term (("+" | "-") term)*
    term   := factor ("*" factor)*
    factor := atom ("^" nonneg-integer)?
    atom   := number | ident | "E[" expr "]" | "inv(" expr ")"
            | "Var(" ident ")" | "Cov(" ident "," ident ")"
            | "exp(" expr ")" | "log(" expr ")" | "sqrt(" expr ")"
            | "(" expr ")"

Numbers are unsigned decimal literals parsed exactly to rationals.  Bare
identifiers are base random variables; ``E[...]`` takes the expectation of a
random-variable expression, possibly with scalar subexpressions embedded.
``Var``/``Cov`` are sugar for their moment expansions, ``inv`` is the
reciprocal, and the three named smooth functions build float-mode
functionals.

A whole input containing a bare variable outside any ``E[...]`` denotes a
random variable rather than a scalar; it is identified with the parameter it
represents (its expectation), so ``X*Y`` parses to the same functional as
``E[X*Y]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ParseError
from .expr import (
    BaseVar,
    E,
    EmbedFunc,
    FuncConst,
    FuncExpr,
    IntPower,
    Moment,
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
from .numerals import parse_decimal

__all__ = ["parse_expression", "tokenize"]

_SMOOTH_NAMES = ("exp", "log", "sqrt")
_RESERVED = ("E", "Var", "Cov", "inv") + _SMOOTH_NAMES


# ---------------------------------------------------------------------------
# tokens


@dataclass(frozen=True)
class Token:
    kind: str  # NUMBER, IDENT, or a literal symbol
    text: str
    column: int  # 1-based


def tokenize(text: str) -> list[Token]:
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch in " \t":
            i += 1
            continue
        col = i + 1
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            if j < len(text) and text[j] == ".":
                j += 1
                if j >= len(text) or not text[j].isdigit():
                    raise ParseError("digits required after decimal point", col)
                while j < len(text) and text[j].isdigit():
                    j += 1
            tokens.append(Token("NUMBER", text[i:j], col))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(Token("IDENT", text[i:j], col))
            i = j
            continue
        if ch in "+-*^()[],":
            tokens.append(Token(ch, ch, col))
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", col)
    tokens.append(Token("EOF", "", len(text) + 1))
    return tokens


# ---------------------------------------------------------------------------
# surface tree (sort-agnostic)


@dataclass(frozen=True)
class SNum:
    value: Fraction


@dataclass(frozen=True)
class SIdent:
    name: str


@dataclass(frozen=True)
class SSum:
    # (sign, node) pairs; sign is +1 or -1
    terms: tuple


@dataclass(frozen=True)
class SProd:
    factors: tuple


@dataclass(frozen=True)
class SPow:
    base: object
    exponent: int


@dataclass(frozen=True)
class SExpect:
    arg: object


@dataclass(frozen=True)
class SCall:
    name: str
    args: tuple


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(
                f"expected {kind!r}, found {tok.text or 'end of input'!r}",
                tok.column,
            )
        return self.advance()

    def parse(self):
        node = self.expr()
        tok = self.peek()
        if tok.kind != "EOF":
            raise ParseError(f"unexpected trailing input {tok.text!r}", tok.column)
        return node

    def expr(self):
        terms = [(1, self.term())]
        while self.peek().kind in ("+", "-"):
            sign = 1 if self.advance().kind == "+" else -1
            terms.append((sign, self.term()))
        if len(terms) == 1 and terms[0][0] == 1:
            return terms[0][1]
        return SSum(tuple(terms))

    def term(self):
        factors = [self.factor()]
        while self.peek().kind == "*":
            self.advance()
            factors.append(self.factor())
        if len(factors) == 1:
            return factors[0]
        return SProd(tuple(factors))

    def factor(self):
        base = self.atom()
        if self.peek().kind == "^":
            self.advance()
            tok = self.expect("NUMBER")
            if "." in tok.text:
                raise ParseError("exponent must be a nonnegative integer", tok.column)
            return SPow(base, int(tok.text))
        return base

    def atom(self):
        tok = self.peek()
        if tok.kind == "NUMBER":
            self.advance()
            return SNum(parse_decimal(tok.text))
        if tok.kind == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        if tok.kind == "IDENT":
            self.advance()
            name = tok.text
            if name == "E":
                self.expect("[")
                node = self.expr()
                self.expect("]")
                return SExpect(node)
            if name == "Var":
                self.expect("(")
                ident = self.expect("IDENT")
                if ident.text in _RESERVED:
                    raise ParseError("Var takes a base variable", ident.column)
                self.expect(")")
                return SCall("Var", (SIdent(ident.text),))
            if name == "Cov":
                self.expect("(")
                first = self.expect("IDENT")
                self.expect(",")
                second = self.expect("IDENT")
                if first.text in _RESERVED or second.text in _RESERVED:
                    raise ParseError("Cov takes base variables", first.column)
                self.expect(")")
                return SCall("Cov", (SIdent(first.text), SIdent(second.text)))
            if name in ("inv",) + _SMOOTH_NAMES:
                self.expect("(")
                node = self.expr()
                self.expect(")")
                return SCall(name, (node,))
            if self.peek().kind == "(":
                raise ParseError(f"unknown function name {name!r}", tok.column)
            return SIdent(name)
        raise ParseError(
            f"expected an expression, found {tok.text or 'end of input'!r}",
            tok.column,
        )


# ---------------------------------------------------------------------------
# sort resolution


def _scalar_sorted(node) -> bool:
    """True when the node denotes a scalar (no bare variable outside E)."""
    if isinstance(node, (SNum, SExpect, SCall)):
        return True
    if isinstance(node, SIdent):
        return False
    if isinstance(node, SSum):
        return all(_scalar_sorted(t) for _, t in node.terms)
    if isinstance(node, SProd):
        return all(_scalar_sorted(f) for f in node.factors)
    if isinstance(node, SPow):
        return _scalar_sorted(node.base)
    raise TypeError(f"not a surface node: {node!r}")


def _var_sugar(name: str) -> FuncExpr:
    x = BaseVar(name)
    return f_sum(E(rv_pow(x, 2)), f_product(FuncConst(Fraction(-1)), f_pow(E(x), 2)))


def _cov_sugar(first: str, second: str) -> FuncExpr:
    x, y = BaseVar(first), BaseVar(second)
    return f_sum(
        E(rv_product(x, y)),
        f_product(FuncConst(Fraction(-1)), E(x), E(y)),
    )


def _to_func(node) -> FuncExpr:
    if not _scalar_sorted(node):
        return Moment(_to_rv(node))
    if isinstance(node, SNum):
        return FuncConst(node.value)
    if isinstance(node, SExpect):
        return E(_to_rv(node.arg))
    if isinstance(node, SCall):
        if node.name == "inv":
            return f_recip(_to_func(node.args[0]))
        if node.name == "Var":
            return _var_sugar(node.args[0].name)
        if node.name == "Cov":
            return _cov_sugar(node.args[0].name, node.args[1].name)
        return Smooth(node.name, _to_func(node.args[0]))
    if isinstance(node, SSum):
        terms = []
        for sign, t in node.terms:
            f = _to_func(t)
            terms.append(f if sign > 0 else f_product(FuncConst(Fraction(-1)), f))
        return f_sum(*terms)
    if isinstance(node, SProd):
        return f_product(*(_to_func(f) for f in node.factors))
    if isinstance(node, SPow):
        return f_pow(_to_func(node.base), node.exponent)
    raise TypeError(f"not a surface node: {node!r}")


def _scalar_leaf(e: RvExpr) -> bool:
    return isinstance(e, (RvConst, EmbedFunc))


def _as_leaf_func(e: RvExpr) -> FuncExpr:
    return FuncConst(e.value) if isinstance(e, RvConst) else e.func


def _embed_if_scalar(e: RvExpr) -> RvExpr:
    """Collapse an all-scalar node into a single embedded functional.

    Embedding markers are invisible in the surface syntax, so parsing must
    place them canonically (maximal scalar subtrees) for print/parse round
    trips to be stable at the tree level.
    """
    if isinstance(e, RvSum) and all(_scalar_leaf(t) for t in e.terms):
        return rv_embed(f_sum(*(_as_leaf_func(t) for t in e.terms)))
    if isinstance(e, RvProduct) and all(_scalar_leaf(f) for f in e.factors):
        return rv_embed(f_product(*(_as_leaf_func(f) for f in e.factors)))
    if isinstance(e, IntPower) and _scalar_leaf(e.base):
        return rv_embed(f_pow(_as_leaf_func(e.base), e.exponent))
    return e


def _to_rv(node) -> RvExpr:
    # maximal scalar subtrees embed as single units, which keeps the
    # embedding placement canonical under print/parse round trips
    if not isinstance(node, (SNum, SIdent)) and _scalar_sorted(node):
        return rv_embed(_to_func(node))
    if isinstance(node, SNum):
        return RvConst(node.value)
    if isinstance(node, SIdent):
        return BaseVar(node.name)
    if isinstance(node, (SExpect, SCall)):
        return rv_embed(_to_func(node))
    if isinstance(node, SSum):
        terms = []
        for sign, t in node.terms:
            e = _to_rv(t)
            terms.append(e if sign > 0 else rv_product(RvConst(Fraction(-1)), e))
        return _embed_if_scalar(rv_sum(*terms))
    if isinstance(node, SProd):
        return _embed_if_scalar(rv_product(*(_to_rv(f) for f in node.factors)))
    if isinstance(node, SPow):
        return _embed_if_scalar(rv_pow(_to_rv(node.base), node.exponent))
    raise TypeError(f"not a surface node: {node!r}")


def parse_expression(text: str) -> FuncExpr:
    """Parse surface text into a functional expression.

    An input denoting a random variable is identified with the parameter it
    represents, i.e. wrapped in one expectation.
    """
    tree = _Parser(text).parse()
    return _to_func(tree)
