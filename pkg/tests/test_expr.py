import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from calabi import catalog
from calabi.errors import DomainViolation, EvaluationError
from calabi.expr import (Binary, Const, Domain, ExprSyntaxError, NonConstantExponent, Pow, Unary,
                         UnknownIdentifier, Var, VariableIndexError, compile_stack,
                         convex_function, evaluate, evaluate_mp, parse, run_stack, to_source,
                         variables)


def test_parse_log_paraboloid():
    e = parse("-0.25*ln(x1 - x2^2/2)", 2)
    assert e == Binary("*", Unary("neg", Const(0.25)),
                       Unary("ln", Binary("-", Var(1), Binary("/", Pow(Var(2), 2.0), Const(2.0)))))
    assert variables(e) == {1, 2}


def test_parse_single_variable():
    assert parse("x1", 1) == Var(1)


def test_variable_out_of_range():
    with pytest.raises(VariableIndexError):
        parse("ln(x3)", 2)


@pytest.mark.parametrize("source, error, offset", [
    ("x1 +", ExprSyntaxError, 4),
    ("1 2", ExprSyntaxError, 2),
    ("foo(x1)", UnknownIdentifier, 0),
    ("x1^x1", NonConstantExponent, 3),
    ("  u1", UnknownIdentifier, 2),
])
def test_errors_carry_byte_offset(source, error, offset):
    with pytest.raises(error) as info:
        parse(source, 2)
    assert info.value.offset == offset


def test_parametrization_identifiers():
    e = parse("exp(2*t)*u2 + u3", 3)
    assert variables(e) == {1, 2, 3}
    assert evaluate(e, [0.0, 2.0, 5.0]) == 7.0


def test_precedence_and_associativity():
    assert evaluate(parse("2^3^2", 1), [0]) == 2.0**9
    assert evaluate(parse("-2^2", 1), [0]) == -4.0
    assert evaluate(parse("8/4/2", 1), [0]) == 1.0
    assert evaluate(parse("1 - 2 - 3", 1), [0]) == -4.0
    assert evaluate(parse("x1^-1", 1), [4.0]) == 0.25


def test_evaluate_examples():
    f = catalog.get("thm13a", 2).function
    assert evaluate(f.body, [1.0, 0.0]) == 0.0
    g = catalog.get("thm13b", 2).function
    assert evaluate(g.body, [1.0, 0.0]) == 0.0


@pytest.mark.parametrize("source, point", [
    ("ln(x1)", [0.0]), ("sqrt(x1)", [-1.0]), ("1/x1", [0.0]), ("x1^0.5", [-2.0]),
])
def test_evaluation_errors_are_typed(source, point):
    with pytest.raises(EvaluationError):
        evaluate(parse(source, 1), point)


def test_evaluation_error_names_subtree():
    with pytest.raises(EvaluationError) as info:
        evaluate(parse("exp(x1) + ln(x1 - 1)", 1), [0.5])
    assert info.value.subtree == "ln(x1 - 1.0)"


# -- round trip ---------------------------------------------------------------------

_leaf = st.one_of(
    st.floats(min_value=0, max_value=1e6, allow_nan=False).map(Const),
    st.integers(1, 3).map(lambda i: Var(i)),
)


def _extend(children):
    return st.one_of(
        st.tuples(st.sampled_from(["neg", "ln", "exp", "sqrt", "sin", "cos", "sinh", "cosh"]),
                  children).map(lambda t: Unary(*t)),
        st.tuples(st.sampled_from("+-*/"), children, children).map(lambda t: Binary(*t)),
        st.tuples(children, st.floats(-5, 5, allow_nan=False)).map(lambda t: Pow(*t)),
    )


trees = st.recursive(_leaf, _extend, max_leaves=12)


@settings(max_examples=300, deadline=None)
@given(trees)
def test_print_parse_round_trip(tree):
    text = to_source(tree)
    again = parse(text, 3)
    assert again == tree
    assert to_source(again) == text


@pytest.mark.parametrize("name", catalog.names())
def test_catalog_sources_round_trip(name):
    f = catalog.get(name, 3).function
    once = parse(f.source, 3)
    assert once == f.body
    assert parse(to_source(once), 3) == once


@pytest.mark.parametrize("name", catalog.names())
def test_tree_walk_matches_stack_machine(name):
    e = catalog.get(name, 3)
    code = compile_stack(e.function.body)
    for p in e.sample(100, np.random.default_rng(3)):
        assert run_stack(code, p) == evaluate(e.function.body, p)


def test_mpmath_evaluation_agrees():
    e = catalog.get("sphere_case", 3)
    for p in e.sample(10, np.random.default_rng(4)):
        assert float(evaluate_mp(e.function.body, p)) == pytest.approx(
            evaluate(e.function.body, p), rel=1e-14)


# -- domains and convex functions -----------------------------------------------------

def test_domain_membership():
    d = Domain.parse(["x1", "1 - x1^2 - x2^2"], 2)
    assert d.contains([0.5, 0.1])
    assert not d.contains([-0.5, 0.1])
    assert not d.contains([0.9, 0.9])
    assert not d.contains([math.nan, 0.0])
    assert d.margin([0.5, 0.0]) == pytest.approx(0.5)


def test_domain_margin_is_minus_infinity_when_undefined():
    d = Domain.parse(["ln(x1)"], 1)
    assert d.margin([-1.0]) == -math.inf


def test_convex_function_checks():
    f = convex_function("-ln(x1) + x2^2", 2, ["x1"])
    assert f([1.0, 2.0]) == 4.0
    assert f.is_convex_at([1.0, 0.0])
    with pytest.raises(DomainViolation):
        f([-1.0, 0.0])
    g = convex_function("x1^2 - x2^2", 2)
    assert not g.is_convex_at([0.0, 0.0])
