"""
Preference systems: a multigraph plus a strict order on each delta(v).
"""
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Optional

from kernelkit.exceptions import InvalidInput, UnknownVertex
from kernelkit.models.graph import Multigraph


@dataclass(frozen=True, eq=False)
class PreferenceSystem:
    """
    Multigraph with a strict total order on the incident edges of every vertex.

    `orders[v]` lists delta(v) most-preferred first, so e precedes f in
    orders[v] exactly when e <_v f ("v prefers e").
    """
    graph: Multigraph
    orders: Mapping = field(default_factory=dict)

    def __post_init__(self):
        orders = {}
        for v in self.graph.vertices:
            incident = self.graph.incident(v)
            order = tuple(self.orders.get(v, ()))
            if not order and not incident:
                orders[v] = ()
                continue
            if len(order) != len(incident) or set(order) != set(incident):
                raise InvalidInput(
                    f"Order at {v} must list each incident edge exactly once "
                    f"(expected {' '.join(incident)}, got {' '.join(order) or 'nothing'})"
                )
            orders[v] = order
        for v in self.orders:
            if v not in self.graph.vertex_index:
                raise UnknownVertex(v)
        object.__setattr__(self, 'orders', orders)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PreferenceSystem):
            return NotImplemented
        return self.graph == other.graph and self.orders == other.orders

    def __hash__(self) -> int:
        return hash((self.graph, tuple(sorted(self.orders.items()))))

    @cached_property
    def ranks(self) -> dict:
        """(v, e) -> position of e in orders[v] (0 = most preferred)."""
        return {(v, e): i for v, order in self.orders.items() for i, e in enumerate(order)}

    def rank(self, v: str, e: str) -> int:
        return self.ranks[(v, e)]

    def prefers(self, v: str, e: str, f: str) -> bool:
        """True when e <_v f."""
        return self.ranks[(v, e)] < self.ranks[(v, f)]

    def dominators(self, e: str, at: Optional[str] = None) -> frozenset:
        """
        phi(e): e plus the edges preferred to e at either end; with `at`,
        phi_at(e): the edges of delta(at) preferred to e.
        """
        edge = self.graph.edge(e)
        if at is not None:
            return frozenset(self.orders[at][:self.ranks[(at, e)]])
        found = {e}
        for w in edge.ends:
            found.update(self.orders[w][:self.ranks[(w, e)]])
        return frozenset(found)

    @property
    def is_simple(self) -> bool:
        return self.graph.is_simple

    @property
    def edge_ids(self) -> tuple:
        return tuple(edge.id for edge in self.graph.edges)


@dataclass(frozen=True)
class PreferenceCycle:
    """
    A cycle of the root graph listed in its preference-increasing direction.

    edges[i] joins vertices[i] and vertices[i+1] (indices mod length), and
    edges[i-1] is preferred to edges[i] at vertices[i].
    """
    vertices: tuple
    edges: tuple

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def parity(self) -> str:
        return 'odd' if len(self.edges) % 2 else 'even'

    def to_dict(self) -> dict:
        return {'vertices': list(self.vertices), 'edges': list(self.edges), 'parity': self.parity}
