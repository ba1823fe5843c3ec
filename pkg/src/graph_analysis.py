from fractions import Fraction
from typing import Dict, Iterable, List, Set, Tuple

import networkx as nx


def build_dependency_graph(nodes: Iterable[str], edges: Iterable[Tuple[str, str]]) -> nx.DiGraph:
    G = nx.DiGraph()
    G.add_nodes_from(nodes)
    G.add_edges_from(edges)
    return G


def find_cycle(G: nx.DiGraph) -> List[str]:
    """Nodes of one directed cycle, or [] for a DAG."""
    try:
        cycle = nx.find_cycle(G, orientation="original")
    except nx.NetworkXNoCycle:
        return []
    path = [u for u, _, _ in cycle]
    return path + [path[0]]


def root_nodes(G: nx.DiGraph) -> List[str]:
    return sorted(n for n, d in G.in_degree() if d == 0)


def longest_path_length(G: nx.DiGraph) -> int:
    if not G.number_of_nodes():
        return 0
    return nx.dag_longest_path_length(G)


def markov_blanket(G: nx.DiGraph, v: str) -> Set[str]:
    """Parents, children and the children's other parents of ``v``."""
    blanket = set(G.predecessors(v)) | set(G.successors(v))
    for child in G.successors(v):
        blanket.update(G.predecessors(child))
    blanket.discard(v)
    return blanket


def markov_blanket_avg(G: nx.DiGraph) -> Fraction:
    n = G.number_of_nodes()
    if not n:
        return Fraction(0)
    return Fraction(sum(len(markov_blanket(G, v)) for v in G.nodes()), n)


def calculate_graph_metrics(G: nx.DiGraph) -> Dict[str, object]:
    return {
        "nodes": G.number_of_nodes(),
        "edges": G.number_of_edges(),
        "avg_mb": markov_blanket_avg(G),
        "roots": len(root_nodes(G)),
        "longest_path": longest_path_length(G),
        "max_in_degree": max((d for _, d in G.in_degree()), default=0),
    }
