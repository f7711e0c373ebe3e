"""
Graph plumbing: line multigraphs, induced subdigraphs and directed cycles.
"""
import logging
from typing import Iterable, Optional

import networkx as nx

from kernelkit.config import settings
from kernelkit.exceptions import InstanceTooLarge, InvalidInput, UnknownVertex
from kernelkit.models.graph import Digraph, Edge, Multigraph

logger = logging.getLogger(__name__)

PARITIES = ('odd', 'even')


def line_edge_id(e: str, f: str, w: str) -> str:
    """Id of the L(H) edge joining root edges e, f through their common end w."""
    return f"{e}~{f}@{w}"


def build_line_multigraph(H: Multigraph) -> Multigraph:
    """
    Build L(H).

    One vertex per edge of H; for each unordered pair of edges and each
    shared endpoint one edge, labeled with that endpoint. Parallel edges of H
    therefore become doubly joined vertices of L(H).

    Args:
        H: Root multigraph

    Returns:
        Line multigraph whose edge labels carry the shared root endpoint
    """
    edges = []
    ids = [edge.id for edge in H.edges]
    for i, e in enumerate(ids):
        for f in ids[i + 1:]:
            for w in H.shared_ends(e, f):
                edges.append(Edge(line_edge_id(e, f, w), e, f, label=w))
    return Multigraph(tuple(ids), tuple(edges))


def induced_subdigraph(D: Digraph, S: Iterable[str]) -> Digraph:
    """
    Restrict D to the vertex set S, keeping arcs with both ends in S.

    Raises:
        UnknownVertex: If S names a vertex outside D
    """
    keep = set(S)
    for v in keep:
        if v not in D.vertex_index:
            raise UnknownVertex(v)
    vertices = tuple(v for v in D.vertices if v in keep)
    arcs = tuple(arc for arc in D.arcs if arc.tail in keep and arc.head in keep)
    return Digraph(vertices, arcs)


def canonical_cycle(D: Digraph, cycle: Iterable[str]) -> tuple:
    """Rotate a directed cycle to start at its first vertex in declared order."""
    cycle = tuple(cycle)
    if not cycle:
        return cycle
    start = min(range(len(cycle)), key=lambda i: D.vertex_index[cycle[i]])
    return cycle[start:] + cycle[:start]


def _check_parity(parity: Optional[str]) -> None:
    if parity is not None and parity not in PARITIES:
        raise InvalidInput(f"parity filter must be 'odd' or 'even', got {parity!r}")


def matches_parity(length: int, parity: Optional[str]) -> bool:
    if parity is None:
        return True
    return (length % 2 == 1) == (parity == 'odd')


def enumerate_directed_cycles(
    D: Digraph,
    parity_filter: Optional[str] = None,
    budget: Optional[int] = None,
) -> list:
    """
    Every directed cycle of D, each once, digons included.

    Cycles start at their first vertex in declared order and keep their
    traversal direction; output is sorted by length then vertex positions.

    Args:
        D: Digraph (parallel arcs collapse)
        parity_filter: 'odd', 'even' or None
        budget: Max cycles to enumerate; defaults to settings.cycle_budget

    Raises:
        InstanceTooLarge: If more than `budget` cycles exist
    """
    _check_parity(parity_filter)
    limit = settings.limit('cycle_budget', budget)
    found = []
    for count, cycle in enumerate(nx.simple_cycles(D.to_networkx()), start=1):
        if count > limit:
            raise InstanceTooLarge("directed cycle enumeration", limit)
        if matches_parity(len(cycle), parity_filter):
            found.append(canonical_cycle(D, cycle))
    found.sort(key=lambda c: (len(c), [D.vertex_index[v] for v in c]))
    logger.debug("[Cycles] %d directed cycle(s) on %d vertices", len(found), len(D.vertices))
    return found
