"""
Compilation of an extended Bayesian network with observations into a
loop-free sampling program wrapped in a single rejection loop.

Program variables are the node and input names. Each node becomes one
block that assigns the node from the CPT row selected by its dep values;
blocks are concatenated by repeatedly peeling the roots, and the
observations become the ``until`` guard of a repeat-until loop.
"""
import itertools
from typing import List, Mapping, Optional, Sequence

from . import bayesnet
from . import coeffring as cr
from . import config
from .bayesnet import Network, Row
from .errors import ArityMismatch, InputError
from .expectation import Atom, Guard, Value, as_value, conjunction
from .pgcl import Assign, DistExpr, If, Program, RepeatUntil, seq

BRANCH_ORDERS = ("lex", "rows")


def _order(order: Optional[str]) -> str:
    order = order or config.DEFAULT_BRANCH_ORDER
    if order not in BRANCH_ORDERS:
        raise InputError(f"unknown branch order {order!r} (choose from {', '.join(BRANCH_ORDERS)})")
    return order


def _row(net: Network, v: str, z: Sequence) -> Row:
    if v not in net.nodes:
        raise InputError(f"{v} is not a node of {net.name}")
    deps = net.dep[v]
    z = tuple(as_value(x) for x in z)
    if len(z) != len(deps):
        raise ArityMismatch(f"{v} depends on {len(deps)} variables, got {len(z)} values")
    for u, x in zip(deps, z):
        net.domains.check_value(u, x)
    return z


def guard_of(net: Network, v: str, z: Sequence) -> Guard:
    """Conjunction of ``dep(v)[i] = z[i]`` in dep order."""
    z = _row(net, v, z)
    return conjunction(Atom(u, x) for u, x in zip(net.dep[v], z))


def assign_of(net: Network, v: str, z: Sequence) -> Assign:
    """``v := Σ cpt_v(z)(a)·⟨a⟩`` over the values with nonzero mass."""
    z = _row(net, v, z)
    dist = net.cpt[v][z]
    outcomes = tuple((p, a) for a, p in dist.items() if not cr.is_zero(p))
    return Assign(v, DistExpr(outcomes))


def branch_rows(net: Network, v: str, order: Optional[str] = None) -> List[Row]:
    """Parent-value tuples of ``v`` in the order their guards are tested."""
    if _order(order) == "rows":
        return net.row_order(v)
    return [tuple(z) for z in itertools.product(*(net.domains[u] for u in net.dep[v]))]


def block_of(net: Network, v: str, order: Optional[str] = None) -> Program:
    """Nested if-else over the dep values of ``v``; the last row is the unguarded else."""
    rows = branch_rows(net, v, order)
    if not net.dep[v]:
        return assign_of(net, v, ())
    block: Program = assign_of(net, v, rows[-1])
    for z in reversed(rows[:-1]):
        block = If(guard_of(net, v, z), assign_of(net, v, z), block)
    return block


def block_order(net: Network) -> List[str]:
    """Nodes in emission order: peel the roots, each round in name order."""
    if net.inputs:
        raise InputError(f"network {net.name} still has inputs {', '.join(net.inputs)}")
    emitted: List[str] = []
    current = net
    while current.nodes:
        round_ = bayesnet.roots(current)
        emitted.extend(round_)
        current = bayesnet.peel(current, round_)
    return emitted


def program_of(net: Network, order: Optional[str] = None) -> Program:
    """Sequence of the blocks of every node of an input-free network."""
    return seq(*(block_of(net, v, order) for v in block_order(net)))


def observation_guard(net: Network, obs: Mapping[str, Value]) -> Guard:
    """``⋀ v = obs(v)`` in node declaration order; true when nothing is observed."""
    for var in obs:
        if var not in net.nodes:
            raise InputError(f"{var} is not an observable node of {net.name}")
    return conjunction(Atom(v, net.domains.check_value(v, obs[v])) for v in net.nodes if v in obs)


def with_observations(p: Program, net: Network, obs: Mapping[str, Value]) -> RepeatUntil:
    """Rejection sampling: rerun ``p`` until every observed node has its value."""
    return RepeatUntil(p, observation_guard(net, obs))


def translate(net: Network, obs: Optional[Mapping[str, Value]] = None, order: Optional[str] = None) -> RepeatUntil:
    return with_observations(program_of(net, order), net, obs or {})
