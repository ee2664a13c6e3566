"""
🔤 Pruebas del analizador y evaluador de expresiones
"""

import math

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from gkverify.core.errors import (
    ArityError,
    ExprDomainError,
    ExprSyntaxError,
    SpecError,
    UnknownIdentifierError,
)
from gkverify.core.expr import Const, eval_jet, eval_value, parse_expr, to_text

COORDS = ["x1", "x2", "x3"]


# =============================================================================
# 🔍 ANÁLISIS
# =============================================================================

@pytest.mark.parametrize("text, expected", [
    ("1 + 2 * 3", 7.0),
    ("2 ^ 3 ^ 2", 64.0),
    ("-2 ^ 2", -4.0),
    ("(1 + 2) * 3", 9.0),
    ("8 / 4 / 2", 1.0),
    ("pi", math.pi),
    ("sqrt(4) + exp(0) + log(1)", 3.0),
    ("1.5e1 - .5", 14.5),
])
def test_constant_expressions(text, expected):
    assert eval_value(parse_expr(text, COORDS), [0.0, 0.0, 0.0]) == pytest.approx(expected)


def test_coordinates_and_parameters():
    expr = parse_expr("alpha * x1 + x2 ^ 2", COORDS, {"alpha": 3.0})
    assert eval_value(expr, [2.0, 3.0, 0.0]) == pytest.approx(15.0)


def test_parameter_becomes_constant():
    assert parse_expr("alpha", COORDS, {"alpha": 0.5}).is_constant()
    assert not parse_expr("alpha * x3", COORDS, {"alpha": 0.5}).is_constant()


def test_syntax_error_reports_byte_offset():
    with pytest.raises(ExprSyntaxError) as info:
        parse_expr("x1 + é", COORDS)
    assert info.value.offset == 5


def test_syntax_error_on_dangling_operator():
    with pytest.raises(ExprSyntaxError):
        parse_expr("x1 +", COORDS)


def test_empty_expression():
    with pytest.raises(ExprSyntaxError):
        parse_expr("   ", COORDS)


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifierError) as info:
        parse_expr("x1 + y", COORDS)
    assert info.value.name == "y"
    assert info.value.offset == 5


def test_arity_error():
    with pytest.raises(ArityError) as info:
        parse_expr("sin(x1, x2)", COORDS)
    assert (info.value.expected, info.value.got) == (1, 2)


def test_non_constant_exponent_rejected():
    with pytest.raises(ExprSyntaxError):
        parse_expr("x1 ^ x2", COORDS)


@pytest.mark.parametrize("text, parameters", [
    ("1e400 * x1", {}),
    ("x1 + a", {"a": float("nan")}),
    ("x1 - a", {"a": float("-inf")}),
    ("x1 ^ (1e200 * 1e200)", {}),
])
def test_non_finite_constants_rejected(text, parameters):
    with pytest.raises(ExprSyntaxError) as info:
        parse_expr(text, COORDS, parameters)
    assert "finit" in str(info.value)


def test_to_text_refuses_non_finite_constants():
    with pytest.raises(ValueError):
        to_text(Const(math.inf), COORDS)
    assert to_text(Const(-1e300), COORDS) == "(-1e+300)"
    assert parse_expr("(-1e+300)", COORDS).value(()) == -1e300


def test_expression_errors_are_spec_errors():
    with pytest.raises(SpecError):
        parse_expr("cosh(x1)", COORDS)


# =============================================================================
# 🚫 DOMINIO
# =============================================================================

@pytest.mark.parametrize("text, point", [
    ("log(x1)", [0.0, 1.0, 1.0]),
    ("sqrt(x1)", [-1.0, 1.0, 1.0]),
    ("1 / x2", [1.0, 0.0, 1.0]),
    ("x1 ^ 0.5", [-0.5, 1.0, 1.0]),
])
def test_domain_errors_carry_point(text, point):
    with pytest.raises(ExprDomainError) as info:
        eval_jet(parse_expr(text, COORDS), point)
    assert info.value.point == tuple(point)


# =============================================================================
# 🧮 JETS
# =============================================================================

def test_jet_of_product():
    jet = eval_jet(parse_expr("x1 * sin(x2)", COORDS), [2.0, 0.5, 0.0])
    assert float(jet.value) == pytest.approx(2 * math.sin(0.5))
    np.testing.assert_allclose(jet.grad, [math.sin(0.5), 2 * math.cos(0.5), 0.0], atol=1e-15)


def test_to_text_reparses_to_same_value():
    expr = parse_expr("-x1 ^ 2 / (1 + cos(x2)) - 3 * -x3", COORDS)
    again = parse_expr(to_text(expr, COORDS), COORDS)
    point = [0.3, -0.7, 1.1]
    assert eval_value(again, point) == eval_value(expr, point)


def _leaf():
    return st.one_of(
        st.sampled_from(COORDS),
        st.floats(min_value=-2, max_value=2, allow_nan=False).map(lambda c: f"({c!r})"),
    )


def _extend(children):
    binary = st.tuples(children, st.sampled_from(["+", "-", "*"]), children).map(
        lambda t: f"({t[0]} {t[1]} {t[2]})"
    )
    safe = st.tuples(
        st.sampled_from([
            "sin({})", "cos({})", "exp(sin({}))", "log(2 + sin({}))",
            "sqrt(2 + cos({}))", "1 / (2 + cos({}))", "({}) ^ 2",
        ]),
        children,
    ).map(lambda t: t[0].format(t[1]))
    return st.one_of(binary, safe)


expressions = st.recursive(_leaf(), _extend, max_leaves=6)
points = st.lists(st.floats(min_value=-1, max_value=1, allow_nan=False), min_size=3, max_size=3)


def assert_matches_central_differences(text, point):
    expr = parse_expr(text, COORDS)
    jet = eval_jet(expr, point)
    h = 1e-6
    for i in range(3):
        forward = list(point)
        backward = list(point)
        forward[i] += h
        backward[i] -= h
        numeric = (eval_value(expr, forward) - eval_value(expr, backward)) / (2 * h)
        exact = float(jet.grad[i])
        bound = max(1e-7, 1e-5 * abs(float(jet.value)), 1e-6 * abs(exact))
        assert abs(exact - numeric) <= bound, f"{text} ∂{i}: {exact} vs {numeric}"


@settings(max_examples=100, deadline=None)
@given(text=expressions, point=points)
def test_jet_matches_central_differences(text, point):
    assert_matches_central_differences(text, point)


@pytest.mark.slow
@settings(max_examples=1000, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(text=expressions, point=points)
def test_jet_matches_central_differences_thousand_expressions(text, point):
    assert_matches_central_differences(text, point)
