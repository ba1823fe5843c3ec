from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src import coeffring as cr
from src import expectation as ex
from src.errors import MassNotOne, UnknownCostModel, UnsupportedLoop
from src.expectation import FALSE, Atom, VarDomain
from src.pgcl import (
    COST_MODELS,
    Assign,
    Diverge,
    DistExpr,
    If,
    RepeatUntil,
    Seq,
    Skip,
    While,
    cost_model,
    desugar,
    ert,
    is_loop_free,
    modified_vars,
    orbit_ert,
    orbit_wp,
    program_size,
    render,
    seq,
    wp,
)

D = VarDomain({"x": (0, 1, 2), "y": (0, 1, 2), "z": (0, 1, 2)})
ZERO = ex.constant(0, D)
ONE = ex.constant(1, D)


def coin(var, p=Fraction(1, 2)):
    return Assign(var, DistExpr(((p, 0), (1 - p, 1))))


def test_dist_expr_checks_mass():
    with pytest.raises(MassNotOne):
        DistExpr(((Fraction(1, 2), 0), (Fraction(1, 3), 1)))
    assert DistExpr.uniform([0, 1, 2]).outcomes[0][0] == Fraction(1, 3)
    assert DistExpr.point(2).render() == "⟨2⟩"


def test_standard_charges():
    assert ert(Skip(), ZERO).value() == 1
    assert ert(coin("x"), ZERO).value() == 1
    assert ert(If(Atom("x", 0), Skip(), seq(Skip(), Skip())), ZERO) == ex.select(
        Atom("x", 0), ex.constant(2, D), ex.constant(3, D)
    )
    assert ert(Diverge(), ZERO).value() is cr.INF
    assert wp(Diverge(), ONE).value() == 0


def test_cost_models():
    assert set(COST_MODELS) == {"standard", "guards", "body", "iterations", "assignments"}
    prog = seq(coin("x"), If(Atom("x", 0), Skip(), coin("y")))
    assert ert(prog, ZERO, "guards").value() == 1
    assert ert(prog, ZERO, "assignments").value() == Fraction(3, 2)
    assert ert(prog, ZERO, "iterations").value() == 0
    with pytest.raises(UnknownCostModel):
        cost_model("switch")


def test_while_false_costs_one_guard():
    assert ert(While(FALSE, coin("x")), ZERO).value() == 1
    assert ert(While(FALSE, coin("x")), ZERO, "body").value() == 0


def test_geometric_loop():
    # while (x = 0) { x := 1/2<0> + 1/2<1> }
    loop = While(Atom("x", 0), coin("x"))
    assert wp(loop, ONE).value() == 1
    expected = ex.select(Atom("x", 0), ex.constant(5, D), ex.constant(1, D))
    assert ert(loop, ZERO) == expected


def test_repeat_until_matches_desugared_form():
    body = seq(coin("x"), coin("y"))
    loop = RepeatUntil(body, Atom("x", 1) & Atom("y", 1))
    # 4 iterations on average, each 2 assignments plus one loop-guard check
    assert ert(loop, ZERO).value() == 12
    assert ert(desugar(loop), ZERO).value() == 12
    f = ex.iverson(Atom("y", 1), D)
    assert wp(loop, f).value() == 1


def test_syntax_helpers():
    prog = seq(coin("x"), If(Atom("x", 0), coin("y"), Skip()))
    assert modified_vars(prog) == {"x", "y"}
    assert is_loop_free(prog)
    assert not is_loop_free(While(Atom("x", 0), prog))
    assert program_size(prog) == 5
    assert program_size(RepeatUntil(prog, Atom("y", 1))) == 6


def test_render():
    prog = RepeatUntil(seq(coin("x"), If(Atom("x", 0), coin("y"), Assign("y", DistExpr.point(2)))), Atom("y", 2))
    assert render(prog) == "\n".join([
        "repeat {",
        "    x := 1/2·⟨0⟩ + 1/2·⟨1⟩;",
        "    if (x = 0) {",
        "        y := 1/2·⟨0⟩ + 1/2·⟨1⟩",
        "    } else {",
        "        y := ⟨2⟩",
        "    }",
        "} until (y = 2)",
    ])


def test_orbits_need_loop_free_body():
    with pytest.raises(UnsupportedLoop):
        orbit_wp(Atom("x", 0), While(Atom("y", 0), coin("y")), ONE, 3)


def test_orbit_converges_to_closed_form():
    loop_body = coin("x")
    phi = Atom("x", 0)
    approx = orbit_ert(phi, loop_body, 40, D)
    exact = ert(While(phi, loop_body), ZERO)
    gap = cr.sub(ex.point_eval(exact, {"x": 0}), ex.point_eval(approx, {"x": 0}))
    assert 0 < gap < Fraction(1, 10**9)


# ============================================================================
# TRANSFORMER LAWS ON RANDOM LOOP-FREE PROGRAMS
# ============================================================================
VARS = ("x", "y", "z")


@st.composite
def dists(draw):
    values = draw(st.lists(st.sampled_from((0, 1, 2)), min_size=1, max_size=3, unique=True))
    weights = [draw(st.integers(1, 5)) for _ in values]
    total = sum(weights)
    return DistExpr(tuple((Fraction(w, total), v) for w, v in zip(weights, values)))


def atoms():
    return st.builds(Atom, st.sampled_from(VARS), st.sampled_from((0, 1, 2)))


def programs(depth=3, diverge=True):
    leaves = [st.just(Skip()), st.builds(Assign, st.sampled_from(VARS), dists())]
    if diverge:
        leaves.append(st.just(Diverge()))
    leaf = st.one_of(*leaves)
    if depth == 0:
        return leaf
    sub = programs(depth - 1, diverge)
    return st.one_of(
        leaf,
        st.builds(Seq, sub, sub),
        st.builds(If, atoms(), sub, sub),
    )


def expectations(allowed=VARS):
    cell = st.fractions(min_value=0, max_value=6, max_denominator=6)
    support = st.lists(st.sampled_from(allowed), max_size=2, unique=True) if allowed else st.just([])
    return support.flatmap(
        lambda s: st.lists(cell, min_size=3 ** len(s), max_size=3 ** len(s)).map(
            lambda vals: ex.Expectation.tabulate(s, _picker(s, vals), D)
        )
    )


def _picker(support, vals):
    def pick(state):
        index = 0
        for v in sorted(support):
            index = index * 3 + state[v]
        return vals[index]
    return pick


@pytest.mark.property_based
@given(programs(), expectations(), expectations(), st.fractions(0, 3, max_denominator=4))
@settings(max_examples=200, deadline=None)
def test_transformer_laws(C, f, g, k):
    assert wp(C, ZERO) == ZERO
    assert ex.leq(wp(C, ONE), ONE)
    lhs = wp(C, ex.add(ex.scale(k, f), g))
    assert lhs == ex.add(ex.scale(k, wp(C, f)), wp(C, g))
    assert ert(C, f) == ex.add(ert(C, ZERO), wp(C, f))


@pytest.mark.property_based
@given(programs(diverge=False))
@settings(max_examples=200, deadline=None)
def test_diverge_free_programs_preserve_mass(C):
    assert wp(C, ONE) == ONE
    assert all(v is not cr.INF for v in ert(C, ZERO).table.values())


def test_diverging_branch_loses_mass():
    C = seq(coin("x"), If(Atom("x", 0), Diverge(), Skip()))
    assert wp(C, ONE).value() == Fraction(1, 2)
    assert ert(C, ZERO).value() is cr.INF


@pytest.mark.property_based
@given(st.data())
@settings(max_examples=100, deadline=None)
def test_unaffected_factor_scales_out(data):
    C = data.draw(programs())
    free = tuple(v for v in VARS if v not in modified_vars(C))
    g = data.draw(expectations(free))
    f = data.draw(expectations())
    assert wp(C, ex.mul(g, f)) == ex.mul(g, wp(C, f))


@pytest.mark.property_based
@given(atoms(), programs(depth=2), expectations())
@settings(max_examples=60, deadline=None)
def test_orbits_increase(phi, body, f):
    previous = orbit_wp(phi, body, f, 0)
    for n in range(1, 8):
        current = orbit_wp(phi, body, f, n)
        assert ex.leq(previous, current)
        previous = current


def test_orbit_ert_over_assigning_body():
    # one iteration of while (x = 0) { x := 1/2<0> + 1/2<1> }
    once = orbit_ert(Atom("x", 0), coin("x"), 1, D)
    assert once == ex.select(Atom("x", 0), ex.constant(2, D), ex.constant(1, D))
    with pytest.raises(TypeError):
        orbit_ert(Atom("x", 0), coin("x"), 1)
