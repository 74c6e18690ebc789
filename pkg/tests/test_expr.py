import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from vimode.expr import (
    Binary,
    Constant,
    EvaluationError,
    ParseError,
    Unary,
    VarT,
    VarX,
    differentiate,
    eval_expression,
    parse_expression,
    simplify,
    to_string,
)

from randexpr import DIMENSION, any_expression, safe_expression_strategy

points = st.tuples(
    st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)
)


def _value(e, t, x):
    try:
        v = float(eval_expression(e, t, list(x)))
    except EvaluationError:
        return None
    return v if math.isfinite(v) else None


class TestParse:
    def test_example1_rhs(self):
        assert parse_expression("2*x+t", 1) == Binary(
            "add", Binary("mul", Constant(2.0), VarX(1)), VarT()
        )

    def test_example2_rhs(self):
        assert parse_expression("x^2+1", 1) == Binary(
            "add", Binary("pow", VarX(1), Constant(2.0)), Constant(1.0)
        )

    def test_bare_t(self):
        assert parse_expression("t", 3) == VarT()

    def test_x_and_x1_agree_for_scalars(self):
        assert parse_expression("x", 1) == parse_expression("x1", 1) == VarX(1)

    def test_bare_x_rejected_for_systems(self):
        with pytest.raises(ParseError):
            parse_expression("x+1", 2)

    @pytest.mark.parametrize("source", ["x3", "x0"])
    def test_index_out_of_range(self, source):
        with pytest.raises(ParseError, match="out of range"):
            parse_expression(source, 2)

    @pytest.mark.parametrize("source", ["2^x", "x^t", "x^(t+1)", "exp(x)^x"])
    def test_non_constant_exponent(self, source):
        with pytest.raises(ParseError, match="non-constant exponent"):
            parse_expression(source, 1)

    def test_constant_exponent_expression_is_folded(self):
        assert parse_expression("x^(1/2)", 1) == Binary("pow", VarX(1), Constant(0.5))

    @pytest.mark.parametrize(
        "source, position",
        [("2*", 2), ("(x+1", 4), ("x $ 2", 2), ("foo(x)", 0), ("x y", 2)],
    )
    def test_syntax_error_reports_position(self, source, position):
        with pytest.raises(ParseError) as info:
            parse_expression(source, 1)
        assert info.value.position == position

    def test_empty_source(self):
        with pytest.raises(ParseError):
            parse_expression("  ", 1)

    def test_unary_minus_binds_looser_than_power(self):
        e = parse_expression("-x^2", 1)
        assert e == Unary("neg", Binary("pow", VarX(1), Constant(2.0)))
        assert eval_expression(e, 0.0, [3.0]) == -9.0

    def test_negative_literal(self):
        assert parse_expression("-2", 1) == Constant(-2.0)
        assert parse_expression("-2^2", 1) == Unary("neg", Binary("pow", Constant(2.0), Constant(2.0)))

    def test_scientific_notation(self):
        assert parse_expression("1.5e-3*t", 1) == Binary("mul", Constant(1.5e-3), VarT())


class TestEval:
    def test_substitution(self):
        assert eval_expression(parse_expression("2*x+t"), 0.5, [1.0]) == 2.5

    def test_zero_case(self):
        assert eval_expression(parse_expression("x^2+1"), 0.0, [0.0]) == 1.0

    def test_exp_one(self):
        assert eval_expression(parse_expression("exp(t)", 1), 1.0, []) == 2.718281828459045

    def test_vectorised(self):
        t = np.linspace(0, 1, 5)
        v = eval_expression(parse_expression("2*x+t"), t, [t**2])
        np.testing.assert_array_equal(v, 2 * t**2 + t)

    @pytest.mark.parametrize(
        "source, x, fragment",
        [
            ("log(x)", 0.0, "log of non-positive"),
            ("sqrt(x)", -1.0, "sqrt of negative"),
            ("1/x", 0.0, "division by zero"),
            ("x^(-1)", 0.0, "division by zero"),
            ("x^0.5", -4.0, "fractional power"),
        ],
    )
    def test_domain_faults(self, source, x, fragment):
        with pytest.raises(EvaluationError, match=fragment) as info:
            eval_expression(parse_expression(source), 0.0, [x])
        assert info.value.location.startswith("root")

    def test_fault_location_points_at_node(self):
        with pytest.raises(EvaluationError) as info:
            eval_expression(parse_expression("t + log(x)"), 0.0, [-1.0])
        assert info.value.location == "root.right"

    def test_overflow_is_ieee(self):
        assert eval_expression(parse_expression("exp(x)"), 0.0, [1000.0]) == math.inf


class TestDifferentiate:
    def test_linear(self):
        assert differentiate(parse_expression("2*x+t"), 1) == Constant(2.0)

    def test_power(self):
        assert differentiate(parse_expression("x^2+1"), 1) == Binary("mul", Constant(2.0), VarX(1))

    def test_exp_times_constant_factor(self):
        e = parse_expression("exp(x1)*sin(t)", 1)
        assert differentiate(e, 1) == e

    def test_other_variable_is_constant(self):
        assert differentiate(parse_expression("x2*t", 2), 1) == Constant(0.0)

    @pytest.mark.parametrize(
        "source, expected",
        [
            ("log(x)", lambda x: 1 / x),
            ("sqrt(x)", lambda x: 0.5 / math.sqrt(x)),
            ("tan(x)", lambda x: 1 / math.cos(x) ** 2),
            ("cos(x)", lambda x: -math.sin(x)),
            ("1/x", lambda x: -1 / x**2),
            ("x^(-2)", lambda x: -2 / x**3),
            ("x^0", lambda x: 0.0),
        ],
    )
    def test_rules(self, source, expected):
        d = differentiate(parse_expression(source), 1)
        for x in (0.3, 0.7, 1.3):
            assert eval_expression(d, 0.0, [x]) == pytest.approx(expected(x), rel=1e-13)

    @settings(max_examples=150, deadline=None)
    @given(e=safe_expression_strategy, k=st.integers(1, DIMENSION), p=points)
    def test_matches_central_difference(self, e, k, p):
        t, x1, x2 = p
        x = [x1, x2]
        value = _value(e, t, x)
        assume(value is not None and abs(value) < 1e3)
        step = 1e-6
        xp, xm = list(x), list(x)
        xp[k - 1] += step
        xm[k - 1] -= step
        fd = (float(eval_expression(e, t, xp)) - float(eval_expression(e, t, xm))) / (2 * step)
        exact = float(eval_expression(differentiate(e, k), t, x))
        assert abs(exact - fd) <= 1e-5 * (1 + abs(exact))


class TestSimplify:
    @pytest.mark.parametrize(
        "source, expected",
        [("0*x + 2", "2"), ("x^1", "x1"), ("2*3 + t", "6 + t"), ("-(-x)", "x1"),
         ("x^0", "1"), ("x*1 - 0", "x1"), ("0 + t/1", "t")],
    )
    def test_examples(self, source, expected):
        assert to_string(simplify(parse_expression(source))) == expected

    def test_does_not_fold_undefined_constants(self):
        e = parse_expression("log(0-1) + x")
        assert simplify(e) == Binary("add", Unary("log", Constant(-1.0)), VarX(1))

    @settings(max_examples=200, deadline=None)
    @given(e=any_expression, p=points)
    def test_value_preserving(self, e, p):
        t, x1, x2 = p
        before = _value(e, t, [x1, x2])
        after = _value(simplify(e), t, [x1, x2])
        assume(before is not None and after is not None)
        assert before == after

    @settings(max_examples=100, deadline=None)
    @given(e=any_expression)
    def test_idempotent(self, e):
        once = simplify(e)
        assert simplify(once) == once


class TestPrinter:
    @settings(max_examples=300, deadline=None)
    @given(e=any_expression)
    def test_round_trip(self, e):
        assert parse_expression(to_string(e), DIMENSION) == e

    @pytest.mark.parametrize(
        "e",
        [
            Unary("neg", Constant(2.0)),
            Constant(-2.0),
            Unary("neg", Constant(-2.0)),
            Binary("pow", Constant(-2.0), Constant(2.0)),
            Binary("pow", VarX(1), Constant(-1.0)),
            Binary("sub", VarX(1), Binary("sub", VarX(2), VarT())),
            Binary("div", VarX(1), Binary("mul", VarX(2), VarT())),
            Binary("mul", VarX(1), Unary("neg", VarX(2))),
            Unary("neg", Binary("mul", VarX(1), VarX(2))),
            Constant(1.5e-20),
            Constant(3e20),
        ],
    )
    def test_round_trip_edge_cases(self, e):
        assert parse_expression(to_string(e), DIMENSION) == e

    def test_minimal_parentheses(self):
        e = parse_expression("(x1 + t)*x2 - (x1 - t)", 2)
        assert to_string(e) == "(x1 + t)*x2 - (x1 - t)"
