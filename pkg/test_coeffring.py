from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src import coeffring as cr
from src.errors import (
    DivByInfinity,
    NegativeValue,
    ParameterizedComparison,
    PoleAtPoint,
    UndeclaredParameter,
    UndefinedAtPoint,
)

rationals = st.fractions(min_value=0, max_value=100, max_denominator=50)


def poly(text, params=("a",)):
    return cr.parse_poly(text, params)


def test_division_conventions():
    assert cr.guarded_div(cr.ZERO, cr.ZERO) == 0
    assert cr.guarded_div(Fraction(3), cr.ZERO) is cr.INF
    assert cr.guarded_div(cr.INF, Fraction(2)) is cr.INF
    with pytest.raises(DivByInfinity):
        cr.guarded_div(Fraction(1), cr.INF)


def test_zero_times_infinity_is_zero():
    assert cr.mul(cr.ZERO, cr.INF) == 0
    assert cr.mul(cr.INF, Fraction(1, 2)) is cr.INF
    assert cr.add(cr.INF, Fraction(5)) is cr.INF


def test_constant_field_elements_demote_to_fractions():
    a = poly("a")
    diff = cr.sub(cr.add(a, Fraction(1, 2)), a)
    assert isinstance(diff, Fraction)
    assert diff == Fraction(1, 2)
    assert cr.is_one(cr.add(a, poly("1 - a")))


def test_symbolic_fraction_is_canonical():
    a = poly("a")
    num = cr.mul(a, cr.sub(cr.ONE, a))
    assert cr.equal(cr.guarded_div(num, a), poly("1 - a"))


def test_eval_at_and_poles():
    a = poly("a")
    f = cr.guarded_div(cr.ONE, cr.sub(cr.ONE, a))
    assert cr.eval_at(f, {"a": Fraction(1, 2)}) == 2
    with pytest.raises(PoleAtPoint):
        cr.eval_at(f, {"a": 1})
    g = cr.guarded_div(cr.sub(cr.ONE, a), cr.sub(cr.ONE, cr.mul(a, a)))
    # (1-a)/(1-a^2) cancels to 1/(1+a)
    assert cr.eval_at(g, {"a": 1}) == Fraction(1, 2)
    with pytest.raises(UndefinedAtPoint):
        cr.eval_at(a, {})
    with pytest.raises(NegativeValue):
        cr.eval_at(cr.sub(a, cr.ONE), {"a": 0})
    assert cr.eval_at(cr.INF, {"a": 0}) is cr.INF


def test_parse_poly():
    assert cr.parse_poly("0.95") == Fraction(19, 20)
    assert cr.parse_poly("3/4") == Fraction(3, 4)
    p = cr.parse_poly("2*a^2 - a/2 + 0.1", ["a"])
    assert cr.eval_at(p, {"a": 1}) == Fraction(8, 5)
    with pytest.raises(UndeclaredParameter):
        cr.parse_poly("b + 1", ["a"])


def test_leq_refuses_parameters():
    assert cr.leq(Fraction(1), cr.INF)
    assert not cr.leq(cr.INF, Fraction(10**9))
    with pytest.raises(ParameterizedComparison):
        cr.leq(poly("a"), cr.ONE)


def test_rendering():
    assert cr.render(cr.INF) == "inf"
    assert cr.render(Fraction(352, 15)) == "352/15"
    assert "^" in cr.render(poly("a^2 + 1"))
    assert cr.to_decimal(Fraction(352, 15)) == "23.466667"
    assert cr.to_scientific(Fraction(14)) == "1.400·10¹"
    assert cr.to_scientific(Fraction(9276, 100)) == "9.276·10¹"
    assert cr.to_scientific(Fraction(8)) == "8.000·10⁰"
    assert cr.to_exact(Fraction(3, 8)) == "0.375"
    assert cr.to_exact(Fraction(460, 21)) == "460/21"
    assert cr.to_exact(Fraction(300)) == "300"


@pytest.mark.property_based
@given(rationals, rationals, rationals)
@settings(max_examples=100)
def test_ground_ring_laws(x, y, z):
    assert cr.add(x, y) == cr.add(y, x)
    assert cr.mul(x, cr.add(y, z)) == cr.add(cr.mul(x, y), cr.mul(x, z))
    assert cr.add(cr.sub(x, y), y) == x


@pytest.mark.property_based
@given(rationals, rationals, st.fractions(min_value=0, max_value=1, max_denominator=20))
@settings(max_examples=50)
def test_eval_commutes_with_arithmetic(x, y, point):
    a = poly("a")
    p = cr.add(cr.mul(x, a), y)
    q = cr.add(a, cr.ONE)
    at = {"a": point}
    assert cr.eval_at(cr.mul(p, q), at) == cr.eval_at(p, at) * cr.eval_at(q, at)
    assert cr.eval_at(cr.guarded_div(p, q), at) == cr.eval_at(p, at) / cr.eval_at(q, at)
