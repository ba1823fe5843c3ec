from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src import coeffring as cr
from src import expectation as ex
from src.errors import IncompleteState, TableTooLarge, UnknownVariable, ValueOutOfDomain
from src.expectation import FALSE, TRUE, Atom, Expectation, Extensional, VarDomain, conjunction

D = VarDomain({"x": (0, 1, 2), "y": (0, 1)})


def test_domain_lookup():
    assert D["x"] == (0, 1, 2)
    assert "y" in D and "z" not in D
    with pytest.raises(UnknownVariable):
        D["z"]
    with pytest.raises(ValueOutOfDomain):
        D.check_value("y", 5)


def test_iverson_and_support_minimization():
    f = ex.iverson(Atom("x", 1), D)
    assert f.support == ("x",)
    assert ex.point_eval(f, {"x": 1}) == 1
    assert ex.point_eval(f, {"x": 2}) == 0
    g = ex.iverson(Atom("x", 1) | ~Atom("x", 1), D)
    assert g.is_constant() and g.value() == 1


def test_conjunction_flattens():
    assert conjunction([]) is TRUE
    assert conjunction([Atom("x", 0)]) == Atom("x", 0)
    assert conjunction([Atom("x", 0), FALSE]) is FALSE
    both = conjunction([Atom("x", 0), conjunction([Atom("y", 1), TRUE])])
    assert both.render() == "x = 0 ∧ y = 1"


def test_select_matches_bracket_arithmetic():
    g = Atom("y", 1)
    then = ex.iverson(Atom("x", 2), D)
    other = ex.constant(Fraction(1, 3), D)
    direct = ex.select(g, then, other)
    via_brackets = ex.add(
        ex.mul(ex.iverson(g, D), then),
        ex.mul(ex.iverson(~g, D), other),
    )
    assert direct == via_brackets


def test_substitute_and_expected_over_dist():
    f = Expectation.tabulate(("x", "y"), lambda s: s["x"] + s["y"], D)
    assert ex.substitute(f, "x", 2) == Expectation.tabulate(("y",), lambda s: 2 + s["y"], D)
    avg = ex.expected_over_dist(f, "x", [(Fraction(1, 2), 0), (Fraction(1, 2), 2)])
    assert avg == Expectation.tabulate(("y",), lambda s: 1 + s["y"], D)


def test_point_eval_needs_full_state():
    f = ex.iverson(Atom("x", 0) & Atom("y", 0), D)
    with pytest.raises(IncompleteState):
        ex.point_eval(f, {"x": 0})


def test_extensional_guard():
    g = Extensional.from_predicate(("x", "y"), lambda x, y: x + y >= 2, D, "x + y >= 2")
    assert len(g.satisfying) == 3
    assert g.render() == "x + y >= 2"
    assert ex.iverson(g, D) == Expectation.tabulate(("x", "y"), lambda s: int(s["x"] + s["y"] >= 2), D)


def test_render():
    assert ex.constant(0, D).render() == "0"
    assert ex.iverson(Atom("x", 1), D).render() == "[x=1]·1"
    assert ex.constant(cr.INF, D).render() == "inf"


def test_table_cap(monkeypatch):
    from src import config

    monkeypatch.setattr(config, "MAX_TABLE_CELLS", 4)
    with pytest.raises(TableTooLarge):
        ex.iverson(Atom("x", 0) & Atom("y", 0), D)


def test_leq_pointwise():
    small = ex.iverson(Atom("x", 0), D)
    big = ex.iverson(Atom("x", 0) | Atom("y", 1), D)
    assert ex.leq(small, big)
    assert not ex.leq(big, small)


def test_parameters_flow_through_tables():
    a = cr.parse_poly("a", ["a"])
    f = ex.select(Atom("y", 0), ex.constant(a, D), ex.constant(cr.sub(cr.ONE, a), D))
    assert f.is_parametric()
    total = ex.expected_over_dist(f, "y", [(Fraction(1, 2), 0), (Fraction(1, 2), 1)])
    assert total.value() == Fraction(1, 2)
    assert ex.evaluate(f, {"a": Fraction(1, 4)}) == ex.select(
        Atom("y", 0), ex.constant(Fraction(1, 4), D), ex.constant(Fraction(3, 4), D)
    )


cells = st.fractions(min_value=0, max_value=10, max_denominator=12)


@st.composite
def tables(draw):
    support = draw(st.sampled_from([(), ("x",), ("y",), ("x", "y")]))
    return Expectation.tabulate(support, lambda _: draw(cells), D)


@pytest.mark.property_based
@given(tables(), tables(), tables())
@settings(max_examples=60)
def test_pointwise_algebra(f, g, h):
    assert ex.add(f, g) == ex.add(g, f)
    assert ex.mul(f, ex.add(g, h)) == ex.add(ex.mul(f, g), ex.mul(f, h))
    assert ex.leq(f, ex.add(f, g))


def test_point_eval_and_substitute_check_domains():
    f = ex.iverson(Atom("x", 0), D)
    with pytest.raises(ValueOutOfDomain):
        ex.point_eval(f, {"x": 7})
    with pytest.raises(ValueOutOfDomain):
        ex.substitute(f, "x", 7)
    with pytest.raises(UnknownVariable):
        ex.substitute(f, "w", 0)
    assert ex.substitute(f, "y", 1) == f


atoms = st.builds(Atom, st.sampled_from(["x", "y"]), st.sampled_from([0, 1]))
guards = st.recursive(
    atoms,
    lambda inner: st.one_of(
        st.builds(lambda a, b: a & b, inner, inner),
        st.builds(lambda a, b: a | b, inner, inner),
        inner.map(lambda g: ~g),
    ),
    max_leaves=6,
)


@pytest.mark.property_based
@given(guards)
@settings(max_examples=60)
def test_guard_and_complement_sum_to_one(g):
    assert ex.add(ex.iverson(g, D), ex.iverson(~g, D)) == ex.constant(1, D)


@pytest.mark.property_based
@given(tables())
@settings(max_examples=60)
def test_minimization_is_idempotent(f):
    again = Expectation(f.domains, f.support, f.table)
    assert again.support == f.support
    assert again == f
    full = {(a, b): ex.point_eval(f, {"x": a, "y": b}) for a in D["x"] for b in D["y"]}
    assert Expectation(D, ("x", "y"), full, minimize=False).support == ("x", "y")
    assert Expectation(D, ("x", "y"), full) == f
