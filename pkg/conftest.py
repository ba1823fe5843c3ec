import itertools
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from src.config import NETWORKS_DIR
from src.bayesnet import build_network
from src.dataset import load_network
from src.expectation import Extensional, VarDomain
from src.pgcl import Assign, DistExpr, RepeatUntil, Seq, seq


def pytest_configure(config):
    config.addinivalue_line("markers", "property_based: hypothesis property-based tests")
    config.addinivalue_line("markers", "slow: long simulator runs (10^6 trials)")


# ============================================================================
# VENDORED NETWORKS
# ============================================================================
@pytest.fixture(scope="session")
def networks_dir():
    return NETWORKS_DIR


@pytest.fixture(scope="session")
def mood():
    return load_network(NETWORKS_DIR / "mood.json")


@pytest.fixture(scope="session")
def sprinkler():
    return load_network(NETWORKS_DIR / "sprinkler.json")


@pytest.fixture(scope="session")
def earthquake():
    return load_network(NETWORKS_DIR / "earthquake.bif")


@pytest.fixture(scope="session")
def asia():
    return load_network(NETWORKS_DIR / "asia.bif")


# ============================================================================
# WORKED PROGRAMS
# ============================================================================
DICE_DOMAINS = VarDomain({"x1": range(1, 7), "x2": range(1, 7)})


@pytest.fixture
def dice():
    """Throw a die, then rethrow a second one until it is at least the first."""
    die = DistExpr.uniform(range(1, 7))
    accept = Extensional.from_predicate(("x1", "x2"), lambda a, b: b >= a, DICE_DOMAINS, "x2 >= x1")
    return seq(Assign("x1", die), RepeatUntil(Assign("x2", die), accept)), DICE_DOMAINS


CIRCLE_DOMAINS = VarDomain({"x": range(11), "y": range(11)})


def circle_guard(limit=None):
    """(x-5)^2 + (y-5)^2 >= 25 over the 11x11 grid, optionally cut to ``limit`` cells."""
    g = Extensional.from_predicate(
        ("x", "y"), lambda x, y: (x - 5) ** 2 + (y - 5) ** 2 >= 25, CIRCLE_DOMAINS, "outside"
    )
    if limit is None:
        return g
    return Extensional(g.vars, frozenset(sorted(g.satisfying)[:limit]), "outside48")


@pytest.fixture
def circle_body():
    grid = DistExpr.uniform(range(11))
    return Seq(Assign("x", grid), Assign("y", grid))


# ============================================================================
# RANDOM NETWORKS
# ============================================================================
_PROBS = st.sampled_from([Fraction(k, 10) for k in range(11)] + [Fraction(1, 3), Fraction(2, 3)])


@st.composite
def binary_networks(draw, max_nodes=5):
    """Random binary networks over V0..Vn-1 with edges only from lower to higher index."""
    n = draw(st.integers(1, max_nodes))
    names = [f"V{i}" for i in range(n)]
    dep = {}
    for i, v in enumerate(names):
        parents = [u for u in names[:i] if draw(st.booleans())][:3]
        dep[v] = parents
    cpt = {}
    for v in names:
        rows = {}
        for row in itertools.product((0, 1), repeat=len(dep[v])):
            p = draw(_PROBS)
            rows[row] = {0: p, 1: 1 - p}
        cpt[v] = rows
    return build_network(names, {v: (0, 1) for v in names}, dep, cpt, name="random")


@st.composite
def observations(draw, net):
    obs = {}
    for v in net.nodes:
        if draw(st.integers(0, 3)) == 0:
            obs[v] = draw(st.sampled_from((0, 1)))
    return obs
