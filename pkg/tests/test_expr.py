"""Expression construction, evaluation, and rendering."""

from fractions import Fraction as Q

import pytest

from eicalg.errors import EvaluationError, ExactModeError
from eicalg.expr import (
    E,
    EmbedFunc,
    FuncConst,
    IntPower,
    RvConst,
    RvProduct,
    RvSum,
    Smooth,
    evaluate_func,
    evaluate_rv,
    inv,
    render_func,
    rv_pow,
    rv_sum,
    var,
)
from eicalg.measure import FiniteProbSpace, center


def halves():
    return FiniteProbSpace(("a", "b"), (Q(1, 2), Q(1, 2)))


X = var("X")
Y = var("Y")


class TestConstruction:
    def test_sums_flatten(self):
        e = (X + Y) + X
        assert isinstance(e, RvSum)
        assert len(e.terms) == 3

    def test_constants_fold(self):
        assert X + 2 + 3 == X + 5
        assert 2 * (3 * X) == 6 * X
        assert (X + 0) == X
        assert 1 * X == X
        assert 0 * X == RvConst(Q(0))

    def test_nodes_keep_at_least_two_children(self):
        e = rv_sum(X, RvConst(Q(0)))
        assert e == X
        e = rv_sum(X, Y)
        assert isinstance(e, RvSum) and len(e.terms) == 2

    def test_power_edge_cases(self):
        assert rv_pow(X, 0) == RvConst(Q(1))
        assert rv_pow(X, 1) == X
        assert isinstance(X**2, IntPower)
        with pytest.raises(ValueError):
            IntPower(X, 0)

    def test_embedded_constant_folds(self):
        from eicalg.expr import rv_embed

        assert rv_embed(FuncConst(Q(2))) == RvConst(Q(2))
        assert (E(X) * 0) == FuncConst(Q(0))
        assert (X * E(X)) * 0 == RvConst(Q(0))

    def test_cross_family_coercion(self):
        e = X - E(X)
        assert isinstance(e, RvSum)
        embedded = [t for t in e.terms if isinstance(t, (RvProduct, EmbedFunc))]
        assert embedded

    def test_unknown_smooth_tag_rejected(self):
        with pytest.raises(ValueError):
            Smooth("tanh", E(X))


class TestEvaluateRv:
    def test_base_variable(self):
        sp = halves()
        vx = sp.variable((0, 1))
        assert evaluate_rv(X, sp, {"X": vx}) == vx

    def test_centered_expression_matches_operator(self):
        sp = halves()
        vx = sp.variable((0, 1))
        got = evaluate_rv(X - E(X), sp, {"X": vx})
        assert got == center(sp, vx)
        assert got.values == (Q(-1, 2), Q(1, 2))

    def test_embedded_moment(self):
        sp = halves()
        vx = sp.variable((0, 1))
        got = evaluate_rv(EmbedFunc(E(X * Y)), sp, {"X": vx, "Y": vx})
        assert got.values == (Q(1, 2), Q(1, 2))

    def test_unbound_variable(self):
        with pytest.raises(EvaluationError):
            evaluate_rv(X, halves(), {})

    def test_binding_space_checked(self):
        other = FiniteProbSpace(("a", "b", "c"), (Q(1, 3), Q(1, 3), Q(1, 3)))
        with pytest.raises(EvaluationError):
            evaluate_rv(X, halves(), {"X": other.variable((1, 2, 3))})


class TestEvaluateFunc:
    def test_variance_instance(self):
        sp = halves()
        vx = sp.variable((0, 1))
        variance = E(X**2) - E(X) ** 2
        assert evaluate_func(variance, sp, {"X": vx}) == Q(1, 4)

    def test_constant(self):
        assert evaluate_func(FuncConst(Q(5, 7)), halves(), {}) == Q(5, 7)

    def test_covariance_of_self_is_variance(self):
        sp = halves()
        vx = sp.variable((0, 1))
        cov = E(X * Y) - E(X) * E(Y)
        variance = E(X**2) - E(X) ** 2
        assert evaluate_func(cov, sp, {"X": vx, "Y": vx}) == evaluate_func(
            variance, sp, {"X": vx}
        )

    def test_reciprocal_of_zero(self):
        sp = halves()
        vx = sp.variable((-1, 1))
        with pytest.raises(EvaluationError):
            evaluate_func(inv(E(X)), sp, {"X": vx})

    def test_smooth_requires_float_mode(self):
        sp = halves()
        vx = sp.variable((1, 2))
        psi = Smooth("log", E(X))
        with pytest.raises(ExactModeError):
            evaluate_func(psi, sp, {"X": vx})
        import math

        got = evaluate_func(psi, sp, {"X": vx}, mode="float")
        assert got == pytest.approx(math.log(1.5))

    def test_float_mode_returns_float(self):
        sp = halves()
        vx = sp.variable((0, 1))
        got = evaluate_func(E(X), sp, {"X": vx}, mode="float")
        assert isinstance(got, float) and got == 0.5


class TestRendering:
    def test_plain_forms(self):
        assert str(E(X * Y) - E(X) * E(Y)) == "E[X*Y] - E[X]*E[Y]"
        assert str(X - E(X)) == "X - E[X]"
        assert str((X + Y) ** 2) == "(X + Y)^2"
        assert str(inv(E(X))) == "inv(E[X])"

    def test_negative_leading_term(self):
        assert str(RvConst(Q(-1)) * X) == "0 - X"
        assert render_func(FuncConst(Q(-3, 2))) == "0 - 1.5"

    def test_exact_decimal_constants(self):
        assert str(RvConst(Q(1, 4)) * X) == "0.25*X"
        assert str(RvConst(Q(3))) == "3"

    def test_non_decimal_constant_falls_back_to_inv(self):
        assert render_func(FuncConst(Q(1, 3))) == "inv(3)"
        assert render_func(FuncConst(Q(2, 3))) == "2*inv(3)"
