"""
Extended Bayesian networks: nodes, external inputs, ordered dependencies
and exact conditional probability tables, plus brute-force probability
oracles and the graph views used by the translation.

Variable values are the rationals of each node's domain; networks read from
BIF keep their value names as ``labels`` (value ``i`` is the ``i``-th
declared name).
"""
import itertools
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

import networkx as nx

from . import coeffring as cr
from . import config
from . import graph_analysis
from .coeffring import Coefficient
from .errors import (
    CycleDetected,
    IncompleteAssignment,
    InconsistentQuery,
    InputError,
    MissingCptRow,
    RowMassNotOne,
    TableTooLarge,
    UndeclaredParameter,
    UnknownVariable,
    ValueOutOfDomain,
)
from .expectation import Value, VarDomain, as_value

Row = Tuple[Value, ...]
Cpt = Dict[Row, Dict[Value, Coefficient]]


@dataclass(frozen=True, eq=False)
class Network:
    nodes: Tuple[str, ...]
    inputs: Tuple[str, ...]
    edges: FrozenSet[Tuple[str, str]]
    domains: VarDomain
    dep: Dict[str, Tuple[str, ...]]
    cpt: Dict[str, Cpt]
    labels: Dict[str, Tuple[str, ...]] = field(default_factory=dict)
    params: Tuple[str, ...] = ()
    name: str = "network"

    @property
    def graph(self) -> nx.DiGraph:
        return graph_analysis.build_dependency_graph(self.nodes, self.edges)

    def parents(self, v: str) -> List[str]:
        return sorted(u for u, w in self.edges if w == v)

    def children(self, v: str) -> List[str]:
        return sorted(w for u, w in self.edges if u == v)

    def row_order(self, v: str) -> List[Row]:
        """CPT rows of ``v`` in declaration order."""
        return list(self.cpt[v])

    def value_of(self, var: str, text) -> Value:
        """Resolve a value name or rational literal for ``var``."""
        if var not in self.domains:
            raise UnknownVariable(var)
        labels = self.labels.get(var, ())
        if isinstance(text, str) and text in labels:
            return self.domains[var][labels.index(text)]
        try:
            value = as_value(Fraction(str(text)))
        except (ValueError, ZeroDivisionError):
            raise ValueOutOfDomain(var, text, labels or self.domains[var]) from None
        if value not in self.domains[var]:
            raise ValueOutOfDomain(var, text, labels or self.domains[var])
        return value

    def label(self, var: str, value: Value) -> str:
        labels = self.labels.get(var)
        if labels:
            return labels[self.domains[var].index(value)]
        return str(value)


def build_network(
    nodes: Sequence[str],
    domains: Mapping[str, Sequence],
    dep: Mapping[str, Sequence[str]],
    cpt: Mapping[str, Mapping[Row, Mapping[Value, Coefficient]]],
    inputs: Sequence[str] = (),
    edges: Optional[Iterable[Tuple[str, str]]] = None,
    labels: Optional[Mapping[str, Sequence[str]]] = None,
    params: Sequence[str] = (),
    name: str = "network",
    normalize: bool = False,
) -> Network:
    """Validate and freeze a network. Edges default to dep entries that are nodes."""
    nodes = tuple(nodes)
    inputs = tuple(inputs)
    if set(nodes) & set(inputs):
        raise InputError(f"nodes and inputs overlap: {sorted(set(nodes) & set(inputs))}")
    doms = domains if isinstance(domains, VarDomain) else VarDomain(domains)
    for v in nodes + inputs:
        doms[v]

    deps = {v: tuple(dep.get(v, ())) for v in nodes}
    if edges is None:
        edges = {(u, v) for v in nodes for u in deps[v] if u in nodes}
    edges = frozenset((u, v) for u, v in edges)
    for u, v in edges:
        if u not in nodes or v not in nodes:
            raise InputError(f"edge {u} -> {v} leaves the node set")

    G = graph_analysis.build_dependency_graph(nodes, edges)
    cycle = graph_analysis.find_cycle(G)
    if cycle:
        raise CycleDetected(cycle)

    for v in nodes:
        for u in deps[v]:
            if u == v or (u not in inputs and (u, v) not in edges):
                raise InputError(f"{u} is neither an input nor a parent of {v}")

    tables = {}
    for v in nodes:
        tables[v] = _check_cpt(v, deps[v], doms, cpt.get(v, {}), normalize)

    return Network(
        nodes=nodes,
        inputs=inputs,
        edges=edges,
        domains=doms,
        dep=deps,
        cpt=tables,
        labels={k: tuple(x) for k, x in (labels or {}).items()},
        params=tuple(params),
        name=name,
    )


def _check_cpt(v: str, parents: Tuple[str, ...], domains: VarDomain, rows, normalize: bool) -> Cpt:
    checked: Cpt = {}
    for row, dist in rows.items():
        row = tuple(as_value(x) for x in row)
        if len(row) != len(parents):
            raise InputError(f"CPT row {row} of {v} does not match parents {parents}")
        for u, x in zip(parents, row):
            domains.check_value(u, x)
        entries = {}
        for value in domains[v]:
            entries[value] = cr.coerce(dist.get(value, cr.ZERO))
        for value in dist:
            domains.check_value(v, value)
        mass = cr.total(entries.values())
        if not cr.is_one(mass):
            if normalize and not cr.is_parametric(mass) and abs(mass - 1) <= config.NORMALIZE_TOLERANCE and mass > 0:
                entries = {k: cr.guarded_div(p, mass) for k, p in entries.items()}
            else:
                raise RowMassNotOne(v, row, cr.render(mass))
        checked[row] = entries
    for row in itertools.product(*(domains[u] for u in parents)):
        if row not in checked:
            raise MissingCptRow(v, row)
    return checked


# ============================================================================
# OBSERVATIONS
# ============================================================================
class ObservationMap(dict):
    """Partial assignment of observed nodes to values."""

    @classmethod
    def of(cls, net: Network, items: Optional[Mapping[str, object]] = None) -> "ObservationMap":
        obs = cls()
        for var, value in dict(items or {}).items():
            if var in net.inputs:
                raise InputError(f"input {var} cannot be observed")
            if var not in net.nodes:
                raise UnknownVariable(var)
            obs[var] = net.value_of(var, value)
        return obs


def parse_assignments(net: Network, specs: Iterable[str]) -> Dict[str, Value]:
    """Turn ``VAR=VALUE`` strings into a checked partial assignment."""
    result: Dict[str, Value] = {}
    for spec in specs:
        if "=" not in spec:
            raise InputError(f"expected VAR=VALUE, got {spec!r}")
        var, text = (s.strip() for s in spec.split("=", 1))
        if var not in net.nodes:
            raise UnknownVariable(var)
        value = net.value_of(var, text)
        if var in result and result[var] != value:
            raise InconsistentQuery(f"{var} assigned twice")
        result[var] = value
    return result


def instantiate(net: Network, point: Mapping[str, object]) -> Network:
    """Fix every parameter to a rational and re-validate the CPTs."""
    for p in point:
        if p not in net.params:
            raise UndeclaredParameter(f"{p} is not a parameter of {net.name}")
    point = {p: Fraction(v) for p, v in point.items()}
    cpt = {
        v: {row: {a: cr.eval_at(p, point) for a, p in dist.items()} for row, dist in rows.items()}
        for v, rows in net.cpt.items()
    }
    return build_network(
        net.nodes,
        net.domains,
        net.dep,
        cpt,
        inputs=net.inputs,
        edges=net.edges,
        labels=net.labels,
        name=net.name,
    )


# ============================================================================
# GRAPH VIEWS
# ============================================================================
def roots(net: Network) -> List[str]:
    """Nodes without an incoming edge from another node, in name order."""
    return graph_analysis.root_nodes(net.graph)


def peel(net: Network, S: Iterable[str]) -> Network:
    """Turn the nodes in S into inputs; dep and cpt are unchanged."""
    S = set(S)
    if not S:
        return net
    missing = S - set(net.nodes)
    if missing:
        raise UnknownVariable(", ".join(sorted(missing)))
    return replace(
        net,
        nodes=tuple(v for v in net.nodes if v not in S),
        inputs=net.inputs + tuple(sorted(S)),
        edges=frozenset((u, v) for u, v in net.edges if u not in S and v not in S),
    )


def markov_blanket_avg(net: Network) -> Fraction:
    return graph_analysis.markov_blanket_avg(net.graph)


def network_stats(net: Network) -> Dict[str, object]:
    stats = graph_analysis.calculate_graph_metrics(net.graph)
    stats["assignments"] = len(net.nodes)
    stats["blocks_with_parents"] = sum(1 for v in net.nodes if net.dep[v])
    return stats


# ============================================================================
# PROBABILITY ORACLES
# ============================================================================
def cpt_entry(net: Network, v: str, state: Mapping[str, Value]) -> Coefficient:
    row = tuple(state[u] for u in net.dep[v])
    return net.cpt[v][row][state[v]]


def joint_prob(net: Network, full: Mapping[str, Value]) -> Coefficient:
    """Product of CPT lookups for a total node assignment."""
    if net.inputs:
        raise IncompleteAssignment(f"network still has inputs {', '.join(net.inputs)}")
    missing = [v for v in net.nodes if v not in full]
    if missing:
        raise IncompleteAssignment(f"assignment misses {', '.join(missing)}")
    state = {v: net.domains.check_value(v, full[v]) for v in net.nodes}
    acc: Coefficient = cr.ONE
    for v in net.nodes:
        acc = cr.mul(acc, cpt_entry(net, v, state))
        if cr.is_zero(acc):
            break
    return acc


def full_assignments(net: Network, fixed: Optional[Mapping[str, Value]] = None) -> Iterator[Dict[str, Value]]:
    fixed = dict(fixed or {})
    free = [v for v in net.nodes if v not in fixed]
    count = net.domains.cells(free)
    if count > config.MAX_ORACLE_ASSIGNMENTS:
        raise TableTooLarge(count, config.MAX_ORACLE_ASSIGNMENTS)
    for values in itertools.product(*(net.domains[v] for v in free)):
        state = dict(fixed)
        state.update(zip(free, values))
        yield state


def marginal(net: Network, partial: Mapping[str, Value]) -> Coefficient:
    return cr.total(joint_prob(net, s) for s in full_assignments(net, partial))


def conditional_prob(net: Network, query: Mapping[str, Value], obs: Mapping[str, Value]) -> Coefficient:
    """P(query | obs) by enumeration, with 0/0 = 0."""
    for var in set(query) & set(obs):
        if query[var] != obs[var]:
            raise InconsistentQuery(f"query and observation disagree on {var}")
    both = dict(obs)
    both.update(query)
    return cr.guarded_div(marginal(net, both), marginal(net, obs))
