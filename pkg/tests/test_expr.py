"""Parser, evaluator, and symbolic derivative tests."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from yauyau.expr import (
    ArityError,
    BinOp,
    Call,
    Const,
    ExprSyntaxError,
    ModelSpec,
    Neg,
    UnknownFunctionError,
    UnknownVariableError,
    Var,
    differentiate,
    divergence,
    evaluate,
    parse,
    to_string,
)

from conftest import random_smooth_ast


class TestParse:
    def test_single_function_application(self):
        assert parse("cos(x1)", 3) == Call("cos", Var(1))

    def test_cubic_power(self):
        assert parse("x1^3", 3) == BinOp("^", Var(1), Const(3.0))

    def test_almost_linear_observation(self):
        ast = parse("x1*(1+0.25*cos(x1))", 1)
        expected = BinOp(
            "*",
            Var(1),
            BinOp("+", Const(1.0), BinOp("*", Const(0.25), Call("cos", Var(1)))),
        )
        assert ast == expected

    def test_precedence(self):
        # ^ above unary minus above */ above +-
        assert parse("-x1^2", 1) == Neg(BinOp("^", Var(1), Const(2.0)))
        assert parse("1+2*x1", 1) == BinOp("+", Const(1.0), BinOp("*", Const(2.0), Var(1)))
        assert parse("-x1*x1", 1) == BinOp("*", Neg(Var(1)), Var(1))
        assert parse("2^3^2", 1) == BinOp("^", Const(2.0), BinOp("^", Const(3.0), Const(2.0)))

    def test_exponent_allows_unary_minus(self):
        assert parse("x1^-2", 1) == BinOp("^", Var(1), Neg(Const(2.0)))

    def test_parentheses(self):
        assert parse("(x1+1)*2", 1) == BinOp("*", BinOp("+", Var(1), Const(1.0)), Const(2.0))

    def test_scientific_numbers(self):
        assert parse("1.5e-3", 1) == Const(1.5e-3)
        assert parse(".5", 1) == Const(0.5)

    def test_unknown_variable_over_dimension(self):
        with pytest.raises(UnknownVariableError, match="x4"):
            parse("cos(x4)", 3)

    def test_unknown_identifier(self):
        with pytest.raises(UnknownVariableError):
            parse("y1+1", 3)

    def test_unknown_function(self):
        with pytest.raises(UnknownFunctionError, match="foo"):
            parse("foo(x1)", 3)

    def test_arity_mismatch(self):
        with pytest.raises(ArityError):
            parse("sin(x1, x2)", 3)

    def test_syntax_error_carries_offset(self):
        with pytest.raises(ExprSyntaxError) as err:
            parse("x1 + $", 1)
        assert err.value.offset == 5

    def test_truncated_input(self):
        with pytest.raises(ExprSyntaxError):
            parse("x1 *", 1)
        with pytest.raises(ExprSyntaxError):
            parse("(x1", 1)


class TestEvaluate:
    def test_cos_at_zero(self):
        assert evaluate(parse("cos(x1)", 3), [0.0, 5.0, 5.0]) == 1.0

    def test_cube(self):
        assert evaluate(parse("x1^3", 3), [2.0, 0.0, 0.0]) == 8.0

    def test_almost_linear_at_pi(self):
        # x*(1+0.25*cos(x)) at pi: cos(pi) = -1 so the factor is 0.75
        value = evaluate(parse("x1*(1+0.25*cos(x1))", 1), [math.pi])
        assert value == pytest.approx(math.pi * 0.75, abs=1e-12)

    def test_vectorized_over_arrays(self):
        xs = np.linspace(-2, 2, 11)
        vals = evaluate(parse("sin(x1)+x1^2", 1), [xs])
        assert np.allclose(vals, np.sin(xs) + xs ** 2)

    def test_domain_error_poisons_with_nan(self):
        assert not np.isfinite(evaluate(parse("log(x1)", 1), [-1.0]))
        assert not np.isfinite(evaluate(parse("1/x1", 1), [0.0]))

    def test_pure_bit_identical(self):
        ast = parse("tanh(x1)*exp(x1/3)+sqrt(x1+2)", 1)
        a = float(evaluate(ast, [0.7]))
        b = float(evaluate(ast, [0.7]))
        assert a == b

    def test_sign_of_zero_is_zero(self):
        assert evaluate(Call("sign", Var(1)), [0.0]) == 0.0


class TestDifferentiate:
    def test_table_derivative_cos(self):
        d = differentiate(parse("cos(x1)", 1), 1)
        for x in (-1.0, 0.0, 0.3, 2.0):
            assert float(evaluate(d, [x])) == pytest.approx(-math.sin(x), abs=1e-15)

    def test_power_rule(self):
        d = differentiate(parse("x1^3", 1), 1)
        assert d == BinOp("*", Const(3.0), BinOp("^", Var(1), Const(2.0)))
        for x in (-2.0, 0.0, 1.5):
            assert float(evaluate(d, [x])) == pytest.approx(3 * x ** 2)

    def test_almost_linear_against_finite_differences(self):
        ast = parse("x1*(1+0.25*cos(x1))", 1)
        d = differentiate(ast, 1)
        h = 1e-5
        for x in np.linspace(-3.0, 3.0, 17):
            fd = (evaluate(ast, [x + h]) - evaluate(ast, [x - h])) / (2 * h)
            sym = float(evaluate(d, [x]))
            assert abs(sym - fd) < 1e-6 * max(abs(sym), 1e-8)

    def test_partial_wrt_other_variable_is_zero(self):
        d = differentiate(parse("cos(x1)", 2), 2)
        assert d == Const(0.0)

    def test_abs_derivative_is_sign(self):
        d = differentiate(parse("abs(x1)", 1), 1)
        assert float(evaluate(d, [2.0])) == 1.0
        assert float(evaluate(d, [-2.0])) == -1.0
        assert float(evaluate(d, [0.0])) == 0.0

    def test_general_power_via_log(self):
        # x^x has derivative x^x (log x + 1)
        ast = BinOp("^", Var(1), Var(1))
        d = differentiate(ast, 1)
        for x in (0.5, 1.0, 2.0):
            expected = x ** x * (math.log(x) + 1)
            assert float(evaluate(d, [x])) == pytest.approx(expected, rel=1e-12)

    def test_quotient_rule(self):
        ast = parse("sin(x1)/(2+x1^2)", 1)
        d = differentiate(ast, 1)
        h = 1e-5
        for x in np.linspace(-2, 2, 9):
            fd = (evaluate(ast, [x + h]) - evaluate(ast, [x - h])) / (2 * h)
            assert float(evaluate(d, [x])) == pytest.approx(fd, abs=1e-8)


class TestDivergence:
    def test_cubic_sensor_drift(self):
        f = [parse("cos(x1)", 3), parse("cos(x2)", 3), parse("cos(x3)", 3)]
        div = divergence(f)
        pts = np.random.default_rng(7).uniform(-2, 2, size=(10, 3))
        for p in pts:
            expected = -np.sin(p).sum()
            assert float(evaluate(div, p)) == pytest.approx(expected, abs=1e-12)

    def test_zero_field(self):
        assert divergence([Const(0.0)]) == Const(0.0)

    def test_cross_coupled_linear_field(self):
        div = divergence([parse("x2", 2), parse("x1", 2)])
        assert div == Const(0.0)


# --- property tests ---------------------------------------------------------

def _ast_strategy(dim=2, max_depth=4):
    """Hypothesis strategy over the printable grammar (non-negative consts)."""
    leaves = st.one_of(
        st.integers(1, dim).map(Var),
        st.floats(0.0, 5.0, allow_nan=False).map(lambda v: Const(round(v, 4))),
    )

    def extend(children):
        return st.one_of(
            st.tuples(st.sampled_from("+-*/^"), children, children).map(
                lambda t: BinOp(t[0], t[1], t[2])
            ),
            children.map(Neg),
            st.tuples(
                st.sampled_from(("sin", "cos", "exp", "log", "sqrt", "tanh", "abs", "sign")),
                children,
            ).map(lambda t: Call(t[0], t[1])),
        )

    return st.recursive(leaves, extend, max_leaves=2 ** max_depth)


@given(_ast_strategy())
@settings(max_examples=200, deadline=None)
def test_parse_print_round_trip(ast):
    assert parse(to_string(ast), 2) == ast


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_derivative_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    for _ in range(20):  # redraw when a tree is ill-conditioned everywhere
        dim = int(rng.integers(1, 3))
        ast = random_smooth_ast(rng, dim, depth=4)
        var = int(rng.integers(1, dim + 1))
        d = differentiate(ast, var)
        checked = _check_derivative_fd(ast, d, var, dim, rng, n_points=40)
        if checked >= 10:
            return
    raise AssertionError("no well-conditioned tree found in 20 draws")


def _check_derivative_fd(ast, deriv, var, dim, rng, n_points):
    """Assert symbolic vs central differences; returns #points checked.

    Points where the finite-difference oracle cannot resolve the tolerance
    (its h and h/2 evaluations disagree) are excluded; the filter never
    looks at the symbolic value, so derivative bugs still get caught.
    """
    h = 1e-5
    pts = [rng.uniform(-2.0, 2.0, size=4 * n_points) for _ in range(dim)]

    def fd_at(step):
        plus = [c + step if d == var - 1 else c for d, c in enumerate(pts)]
        minus = [c - step if d == var - 1 else c for d, c in enumerate(pts)]
        f_plus = np.broadcast_to(np.asarray(evaluate(ast, plus), dtype=float), pts[0].shape)
        f_minus = np.broadcast_to(np.asarray(evaluate(ast, minus), dtype=float), pts[0].shape)
        return f_plus, f_minus, (f_plus - f_minus) / (2 * step)

    with np.errstate(all="ignore"):
        base = np.broadcast_to(np.asarray(evaluate(ast, pts), dtype=float), pts[0].shape)
        f_plus, f_minus, fd = fd_at(h)
        _, _, fd_half = fd_at(h / 2)
        sym = np.broadcast_to(np.asarray(evaluate(deriv, pts), dtype=float), pts[0].shape)
        tol = np.maximum(1e-6 * np.maximum(np.abs(sym), np.abs(fd)), 1e-8)
        ok = (
            np.isfinite(base)
            & np.isfinite(f_plus)
            & np.isfinite(f_minus)
            & np.isfinite(sym)
            & np.isfinite(fd_half)
            & (np.abs(base) < 50)
            & (np.abs(f_plus) < 50)
            & (np.abs(f_minus) < 50)
            & (np.abs(fd - fd_half) < 0.2 * tol)
        )
    idx = np.flatnonzero(ok)[:n_points]
    err = np.abs(sym[idx] - fd[idx])
    assert np.all(err <= tol[idx]), (
        f"max err {err.max()} at tol {tol[idx][np.argmax(err)]}"
    )
    return idx.size


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_derivative_linearity(seed):
    rng = np.random.default_rng(seed)
    a = random_smooth_ast(rng, 1, depth=3)
    b = random_smooth_ast(rng, 1, depth=3)
    d_sum = differentiate(BinOp("+", a, b), 1)
    da = differentiate(a, 1)
    db = differentiate(b, 1)
    xs = rng.uniform(-2, 2, size=25)
    with np.errstate(all="ignore"):
        lhs = np.broadcast_to(np.asarray(evaluate(d_sum, [xs]), dtype=float), xs.shape)
        rhs = np.broadcast_to(
            np.asarray(evaluate(da, [xs]), dtype=float)
            + np.asarray(evaluate(db, [xs]), dtype=float),
            xs.shape,
        )
    ok = np.isfinite(lhs) & np.isfinite(rhs)
    assert np.allclose(lhs[ok], rhs[ok], rtol=1e-10, atol=1e-10)


class TestModelSpec:
    def test_from_texts(self):
        m = ModelSpec.from_texts(["cos(x1)"], ["x1^3"])
        assert m.dim == 1 and m.obs_dim == 1

    def test_rejects_out_of_range_variable(self):
        with pytest.raises(UnknownVariableError):
            ModelSpec.from_texts(["cos(x2)"], ["x1"])

    def test_count_mismatch(self):
        with pytest.raises(ValueError):
            ModelSpec(dim=2, obs_dim=1, drift=(Const(0.0),), observation=(Const(0.0),))
