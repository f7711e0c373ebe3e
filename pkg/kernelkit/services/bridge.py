"""
Digraph <-> preference system correspondence.

An orientation D of L(H) and a preference system (H, <) determine each other:
the arc (f, e) with provenance v means e <_v f, i.e. v prefers e. This module
converts between the two, enumerates and classifies cliques, checks goodness,
and finds cycles with cyclic preferences.
"""
import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Optional

import networkx as nx

from kernelkit.config import settings
from kernelkit.exceptions import (
    AmbiguousAttribution,
    IncompleteTournament,
    InstanceTooLarge,
    InvalidInput,
    NotCliqueAcyclic,
    UnknownId,
)
from kernelkit.models.graph import Arc, Digraph, Multigraph
from kernelkit.models.preference import PreferenceCycle, PreferenceSystem
from kernelkit.models.reports import GoodnessReport
from kernelkit.services.graphcore import _check_parity, enumerate_directed_cycles, matches_parity

logger = logging.getLogger(__name__)

CLIQUE_MODES = ('all', 'maximal')


@dataclass(frozen=True)
class Clique:
    """
    Clique of a digraph with its type when the digraph is an oriented line multigraph.

    kind is 'a' (all of delta(at)), 'b' (proper subset of delta(at)),
    'c' (edges of the triangle `at`) or None for untyped digraphs.
    """
    members: tuple
    kind: Optional[str] = None
    at: Optional[tuple] = None

    def __len__(self) -> int:
        return len(self.members)


def orientation_from_prefs(PS: PreferenceSystem) -> Digraph:
    """
    Orient L(H) by the preferences: arc (f, e) with provenance v whenever e <_v f.

    Args:
        PS: Preference system over root H

    Returns:
        Digraph on the edge ids of H
    """
    arcs = []
    for v in PS.graph.vertices:
        order = PS.orders[v]
        for i, preferred in enumerate(order):
            for worse in order[i + 1:]:
                arcs.append(Arc(f"{worse}>{preferred}@{v}", worse, preferred, provenance=v))
    return Digraph(PS.edge_ids, tuple(arcs))


def attribute_arc(H: Multigraph, arc: Arc) -> str:
    """
    Root vertex an arc of an oriented L(H) belongs to.

    Raises:
        InvalidInput: If the arc's ends share no endpoint, or its label is not shared
        AmbiguousAttribution: If the ends share two endpoints and the arc is unlabeled
    """
    shared = H.shared_ends(arc.tail, arc.head)
    if not shared:
        raise InvalidInput(f"Arc {arc.id}: edges {arc.tail} and {arc.head} share no endpoint")
    if arc.provenance is not None:
        if arc.provenance not in shared:
            raise InvalidInput(f"Arc {arc.id}: provenance {arc.provenance} is not a common end of {arc.tail} and {arc.head}")
        return arc.provenance
    if len(shared) > 1:
        raise AmbiguousAttribution(arc.id)
    return shared[0]


def prefs_from_orientation(H: Multigraph, D: Digraph) -> PreferenceSystem:
    """
    Recover the preference system an orientation of L(H) encodes.

    Args:
        H: Root multigraph
        D: Digraph on the edge ids of H

    Returns:
        PreferenceSystem whose orientation is D (up to arc ids)

    Raises:
        InvalidInput: If D is not on E(H) or an arc joins non-adjacent edges
        AmbiguousAttribution: See attribute_arc
        NotCliqueAcyclic: If the arcs attributed to some v contain a directed cycle
        IncompleteTournament: If some pair in delta(v) has no attributed arc
    """
    edge_ids = {edge.id for edge in H.edges}
    if set(D.vertices) != edge_ids:
        raise InvalidInput("Digraph vertices must be exactly the edge ids of the root")

    local = {v: nx.DiGraph() for v in H.vertices}
    for v in H.vertices:
        local[v].add_nodes_from(H.incident(v))
    for arc in D.arcs:
        local[attribute_arc(H, arc)].add_edge(arc.tail, arc.head)

    orders = {}
    for v in H.vertices:
        tournament = local[v]
        try:
            cycle = nx.find_cycle(tournament)
        except nx.NetworkXNoCycle:
            cycle = None
        if cycle:
            raise NotCliqueAcyclic(v, [tail for tail, _ in cycle])
        for e, f in combinations(H.incident(v), 2):
            if not (tournament.has_edge(e, f) or tournament.has_edge(f, e)):
                raise IncompleteTournament(v, (e, f))
        # sources are least preferred
        orders[v] = tuple(reversed(list(nx.topological_sort(tournament))))
    return PreferenceSystem(H, orders)


def _adjacency_graph(D: Digraph) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(D.vertices)
    graph.add_edges_from(D.pairs)
    return graph


def _provenance_map(D: Digraph) -> dict:
    """Unordered vertex pair -> set of provenance labels on arcs between them."""
    labels = {}
    for arc in D.arcs:
        if arc.provenance is not None:
            labels.setdefault(frozenset((arc.tail, arc.head)), set()).add(arc.provenance)
    return labels


def classify_clique(D: Digraph, members: tuple, root: Optional[Multigraph] = None) -> Clique:
    """Tag a clique with its line-multigraph type (see Clique)."""
    if root is not None:
        return _classify_by_root(root, members)
    labels = _provenance_map(D)
    if not labels:
        return Clique(members)
    if len(members) == 1:
        isolated = all(members[0] not in pair for pair in labels)
        return Clique(members, 'a' if isolated else 'b', None)

    spans = {}
    for arc in D.arcs:
        if arc.provenance is not None:
            spans.setdefault(arc.provenance, set()).update((arc.tail, arc.head))
    pair_labels = [labels.get(frozenset(pair), set()) for pair in combinations(members, 2)]
    common = set.intersection(*pair_labels) if pair_labels else set()
    if common:
        for w in sorted(common):
            if spans[w] == set(members):
                return Clique(members, 'a', (w,))
        return Clique(members, 'b', (sorted(common)[0],))
    corners = set().union(*pair_labels)
    if len(corners) == 3:
        return Clique(members, 'c', tuple(sorted(corners)))
    return Clique(members)


def _classify_by_root(H: Multigraph, members: tuple) -> Clique:
    ends = [set(H.edge(e).ends) for e in members]
    common = set.intersection(*ends)
    ordered = sorted(common, key=H.vertex_index.__getitem__)
    for w in ordered:
        if set(H.incident(w)) == set(members):
            return Clique(members, 'a', (w,))
    if ordered:
        return Clique(members, 'b', (ordered[0],))
    corners = set().union(*ends)
    if len(corners) == 3:
        return Clique(members, 'c', tuple(sorted(corners, key=H.vertex_index.__getitem__)))
    return Clique(members)


def enumerate_cliques(
    D: Digraph,
    mode: str = 'all',
    root: Optional[Multigraph] = None,
    budget: Optional[int] = None,
) -> list:
    """
    Cliques of D (vertex sets joined pairwise by at least one arc).

    Args:
        D: Digraph
        mode: 'all' (every nonempty clique, singletons included) or 'maximal'
        root: Root multigraph, used for type classification when given
        budget: Max cliques; defaults to settings.clique_budget

    Returns:
        Clique objects sorted by size, then by declared vertex positions

    Raises:
        InvalidInput: On an unknown mode
        InstanceTooLarge: If the clique count exceeds the budget
    """
    if mode not in CLIQUE_MODES:
        raise InvalidInput(f"clique mode must be 'all' or 'maximal', got {mode!r}")
    limit = settings.limit('clique_budget', budget)
    graph = _adjacency_graph(D)
    source = nx.enumerate_all_cliques(graph) if mode == 'all' else nx.find_cliques(graph)
    found = []
    for count, clique in enumerate(source, start=1):
        if count > limit:
            raise InstanceTooLarge("clique enumeration", limit)
        found.append(tuple(D.order(clique)))
    found.sort(key=lambda c: (len(c), [D.vertex_index[v] for v in c]))
    return [classify_clique(D, members, root) for members in found]


def _one_way_cycle(D: Digraph, members: tuple) -> Optional[list]:
    inside = set(members)
    one_way = nx.DiGraph()
    one_way.add_nodes_from(members)
    one_way.add_edges_from(
        (tail, head) for tail, head in D.pairs
        if tail in inside and head in inside and not D.has_arc(head, tail)
    )
    try:
        cycle = nx.find_cycle(one_way)
    except nx.NetworkXNoCycle:
        return None
    return [tail for tail, _ in cycle]


def has_chord_or_pseudo_chord(D: Digraph, cycle: Iterable[str]) -> bool:
    """True when some arc among the cycle's vertices is not a forward step of it."""
    cycle = list(cycle)
    forward = {(cycle[i], cycle[(i + 1) % len(cycle)]) for i in range(len(cycle))}
    inside = set(cycle)
    return any(
        tail in inside and head in inside and (tail, head) not in forward
        for tail, head in D.pairs
    )


def is_good(D: Digraph, budget: Optional[int] = None) -> GoodnessReport:
    """
    Check that D is clique-acyclic and every directed odd cycle has a (pseudo-)chord.

    Only maximal cliques are inspected for condition (i); one-way acyclicity
    is inherited by subcliques.

    Args:
        D: Digraph
        budget: Enumeration cap applied to cliques and cycles

    Returns:
        GoodnessReport with a replayable certificate on failure
    """
    for clique in enumerate_cliques(D, 'maximal', budget=budget):
        cycle = _one_way_cycle(D, clique.members)
        if cycle:
            logger.debug("[Good] one-way cycle %s inside clique %s", cycle, clique.members)
            return GoodnessReport(
                verdict='not_clique_acyclic',
                certificate={'kind': 'clique_cycle', 'clique': list(clique.members), 'cycle': cycle},
            )
    for cycle in enumerate_directed_cycles(D, 'odd', budget=budget):
        if not has_chord_or_pseudo_chord(D, cycle):
            return GoodnessReport(
                verdict='chordless_odd_cycle',
                certificate={'kind': 'chordless_odd_cycle', 'cycle': list(cycle)},
            )
    return GoodnessReport(verdict='good')


def replay_goodness_certificate(D: Digraph, certificate: dict) -> bool:
    """
    Re-validate a goodness refutation against D.

    Returns:
        True if the certificate exhibits the claimed violation
    """
    kind = certificate.get('kind')
    cycle = [str(v) for v in certificate.get('cycle', [])]
    if len(cycle) < 2 or any(v not in D.vertex_index for v in cycle) or len(set(cycle)) != len(cycle):
        return False
    steps = [(cycle[i], cycle[(i + 1) % len(cycle)]) for i in range(len(cycle))]
    if kind == 'clique_cycle':
        clique = [str(v) for v in certificate.get('clique', [])]
        if any(v not in D.vertex_index for v in clique) or not set(cycle) <= set(clique):
            return False
        if any(not D.adjacent(a, b) for a, b in combinations(clique, 2)):
            return False
        return all(D.is_one_way(a, b) for a, b in steps)
    if kind == 'chordless_odd_cycle':
        if len(cycle) % 2 == 0 or not all(D.has_arc(a, b) for a, b in steps):
            return False
        return not has_chord_or_pseudo_chord(D, cycle)
    return False


def kernel_matching_translate(H: Multigraph, U: Iterable[str]) -> frozenset:
    """
    Identify a vertex set of D = oriented L(H) with an edge set of H.

    The map is the identity on ids; it exists to validate that every id is a
    root edge.

    Raises:
        UnknownId: If some id is not an edge of H
    """
    chosen = frozenset(U)
    for identifier in chosen:
        if identifier not in H.edge_index:
            raise UnknownId(identifier)
    return chosen


def _dart_graph(PS: PreferenceSystem) -> nx.DiGraph:
    """
    Darts (edge, tail, head); (e, a, b) -> (f, b, c) whenever f != e and e <_b f.
    """
    graph = nx.DiGraph()
    H = PS.graph
    for edge in H.edges:
        graph.add_node((edge.id, edge.u, edge.v))
        graph.add_node((edge.id, edge.v, edge.u))
    for dart in list(graph.nodes):
        e, _, b = dart
        for f in H.incident(b):
            if f != e and PS.prefers(b, e, f):
                graph.add_edge(dart, (f, b, H.edge(f).other(b)))
    return graph


def _rotate_cycle(PS: PreferenceSystem, darts: list) -> PreferenceCycle:
    position = {edge_id: i for i, edge_id in enumerate(PS.edge_ids)}
    start = min(range(len(darts)), key=lambda i: position[darts[i][0]])
    darts = darts[start:] + darts[:start]
    return PreferenceCycle(tuple(d[1] for d in darts), tuple(d[0] for d in darts))


def find_cyclic_preference_cycles(
    PS: PreferenceSystem,
    parity_filter: Optional[str] = None,
    budget: Optional[int] = None,
) -> list:
    """
    Every cycle of the root graph with cyclic preferences, each once.

    Cycles come back in their preference-increasing direction, starting at
    their first edge in declaration order. Parallel edges can form 2-cycles.

    Args:
        PS: Preference system
        parity_filter: 'odd', 'even' or None (cycle length parity)
        budget: Max dart cycles examined; defaults to settings.cycle_budget

    Raises:
        InstanceTooLarge: On budget excess
    """
    _check_parity(parity_filter)
    limit = settings.limit('cycle_budget', budget)
    seen, found = set(), []
    for count, darts in enumerate(nx.simple_cycles(_dart_graph(PS)), start=1):
        if count > limit:
            raise InstanceTooLarge("cyclic-preference cycle enumeration", limit)
        tails = [d[1] for d in darts]
        if len(set(tails)) != len(tails):
            continue
        if not matches_parity(len(darts), parity_filter):
            continue
        key = frozenset(d[0] for d in darts)
        if key in seen:
            continue
        seen.add(key)
        found.append(_rotate_cycle(PS, list(darts)))
    position = {edge_id: i for i, edge_id in enumerate(PS.edge_ids)}
    found.sort(key=lambda c: (len(c), [position[e] for e in c.edges]))
    return found


def is_cyclic_preference_cycle(PS: PreferenceSystem, cycle: PreferenceCycle) -> bool:
    """True when `cycle` is a cycle of the root graph labeled in its preference-increasing direction."""
    length = len(cycle.edges)
    if length < 2 or len(cycle.vertices) != length or len(set(cycle.vertices)) != length:
        return False
    H = PS.graph
    for i, edge_id in enumerate(cycle.edges):
        if edge_id not in H.edge_index:
            return False
        a, b = cycle.vertices[i], cycle.vertices[(i + 1) % length]
        if set(H.edge(edge_id).ends) != {a, b}:
            return False
    return all(
        cycle.edges[i - 1] != cycle.edges[i] and PS.prefers(cycle.vertices[i], cycle.edges[i - 1], cycle.edges[i])
        for i in range(length)
    )
