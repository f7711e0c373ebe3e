"""
Multigraph and digraph types.

Both are immutable after construction. Vertex and edge ids are strings; the
declared vertex order is the canonical order used by every enumeration.
"""
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional

import networkx as nx

from kernelkit.exceptions import InvalidInput, UnknownEdge, UnknownVertex


@dataclass(frozen=True)
class Edge:
    """Undirected edge. `label` names the shared root endpoint in a line multigraph."""
    id: str
    u: str
    v: str
    label: Optional[str] = None

    @property
    def ends(self) -> tuple:
        return (self.u, self.v)

    def other(self, w: str) -> str:
        return self.v if w == self.u else self.u


@dataclass(frozen=True)
class Multigraph:
    """Loopless undirected graph; parallel edges permitted."""
    vertices: tuple
    edges: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, 'vertices', tuple(self.vertices))
        object.__setattr__(self, 'edges', tuple(self.edges))
        if len(set(self.vertices)) != len(self.vertices):
            raise InvalidInput("Duplicate vertex names")
        known = set(self.vertices)
        seen = set()
        for edge in self.edges:
            if edge.id in seen:
                raise InvalidInput(f"Duplicate edge id: {edge.id}")
            seen.add(edge.id)
            for end in edge.ends:
                if end not in known:
                    raise UnknownVertex(end)
            if edge.u == edge.v:
                raise InvalidInput(f"Loop at {edge.u} (edge {edge.id}) is not allowed")

    @cached_property
    def edge_index(self) -> dict:
        return {edge.id: edge for edge in self.edges}

    @cached_property
    def vertex_index(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def incidence(self) -> dict:
        incident = {v: [] for v in self.vertices}
        for edge in self.edges:
            incident[edge.u].append(edge.id)
            incident[edge.v].append(edge.id)
        return {v: tuple(ids) for v, ids in incident.items()}

    def edge(self, edge_id: str) -> Edge:
        try:
            return self.edge_index[edge_id]
        except KeyError:
            raise UnknownEdge(edge_id) from None

    def incident(self, v: str) -> tuple:
        """delta(v): ids of edges incident with v, in declaration order."""
        try:
            return self.incidence[v]
        except KeyError:
            raise UnknownVertex(v) from None

    def degree(self, v: str) -> int:
        return len(self.incident(v))

    def shared_ends(self, e: str, f: str) -> tuple:
        """Common endpoints of two edges, in declared vertex order."""
        ends_f = set(self.edge(f).ends)
        common = {w for w in self.edge(e).ends if w in ends_f}
        return tuple(sorted(common, key=self.vertex_index.__getitem__))

    @cached_property
    def parallel_classes(self) -> tuple:
        """Edges grouped by endpoint pair, in first-appearance order."""
        classes = {}
        for edge in self.edges:
            classes.setdefault(frozenset(edge.ends), []).append(edge.id)
        return tuple(tuple(ids) for ids in classes.values())

    @property
    def is_simple(self) -> bool:
        return all(len(cls) == 1 for cls in self.parallel_classes)

    def to_networkx(self) -> nx.MultiGraph:
        graph = nx.MultiGraph()
        graph.add_nodes_from(self.vertices)
        for edge in self.edges:
            graph.add_edge(edge.u, edge.v, key=edge.id)
        return graph


# Separators of Digraph.encoding(); names containing them would not round-trip
ENCODING_SEPARATORS = frozenset('>@;|,')


def _check_name(name: str, what: str) -> None:
    if not name or ENCODING_SEPARATORS.intersection(name):
        raise InvalidInput(f"Invalid {what} name {name!r}: must be nonempty and avoid any of > @ ; | ,")


@dataclass(frozen=True)
class Arc:
    """Directed arc. `provenance` names the shared root endpoint it came from."""
    id: str
    tail: str
    head: str
    provenance: Optional[str] = None


@dataclass(frozen=True)
class Digraph:
    """Loopless directed multigraph; parallel and antiparallel arcs permitted."""
    vertices: tuple
    arcs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, 'vertices', tuple(self.vertices))
        object.__setattr__(self, 'arcs', tuple(self.arcs))
        if len(set(self.vertices)) != len(self.vertices):
            raise InvalidInput("Duplicate vertex names")
        for v in self.vertices:
            _check_name(v, 'vertex')
        known = set(self.vertices)
        seen = set()
        for arc in self.arcs:
            if arc.id in seen:
                raise InvalidInput(f"Duplicate arc id: {arc.id}")
            seen.add(arc.id)
            for end in (arc.tail, arc.head):
                if end not in known:
                    raise UnknownVertex(end)
            if arc.tail == arc.head:
                raise InvalidInput(f"Loop at {arc.tail} (arc {arc.id}) is not allowed")
            if arc.provenance is not None:
                _check_name(arc.provenance, 'provenance')

    @cached_property
    def vertex_index(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def pairs(self) -> frozenset:
        """Distinct (tail, head) pairs; parallel arcs collapse."""
        return frozenset((arc.tail, arc.head) for arc in self.arcs)

    @cached_property
    def out_map(self) -> dict:
        out = {v: set() for v in self.vertices}
        for tail, head in self.pairs:
            out[tail].add(head)
        return {v: frozenset(heads) for v, heads in out.items()}

    def out_neighbors(self, v: str) -> frozenset:
        """N+(v): heads of arcs with tail v."""
        try:
            return self.out_map[v]
        except KeyError:
            raise UnknownVertex(v) from None

    def has_arc(self, tail: str, head: str) -> bool:
        return (tail, head) in self.pairs

    def adjacent(self, a: str, b: str) -> bool:
        return self.has_arc(a, b) or self.has_arc(b, a)

    def is_one_way(self, tail: str, head: str) -> bool:
        return self.has_arc(tail, head) and not self.has_arc(head, tail)

    def order(self, vertices: Iterable[str]) -> list:
        """Sort vertex ids by declared position."""
        return sorted(vertices, key=self.vertex_index.__getitem__)

    def encoding(self) -> str:
        """Canonical text key: declared vertices, then sorted distinct arc pairs with provenance."""
        arcs = sorted({(a.tail, a.head, a.provenance or '') for a in self.arcs})
        body = ';'.join(f"{t}>{h}" + (f"@{p}" if p else '') for t, h, p in arcs)
        return f"{','.join(self.vertices)}|{body}"

    def to_networkx(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(self.vertices)
        graph.add_edges_from(self.pairs)
        return graph
