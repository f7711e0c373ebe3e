"""
Stable matchings and the fractional stable matching polytope FSM.

Brute-force stable matching enumeration, the membership test for FSM, the
decomposition of half-integral points into cycles with cyclic preferences,
and the perturbation that rounds a half-integral point to a stable matching
when no odd cycle has cyclic preferences.
"""
import logging
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Optional

import networkx as nx

from kernelkit.config import settings
from kernelkit.exceptions import (
    Degenerate,
    InconsistentLabeling,
    InstanceTooLarge,
    InvalidInput,
    NotAnEndpoint,
    NotHalfIntegral,
    NotInFSM,
    OddCycle,
    OddCyclicCycle,
    StructureViolation,
    UnknownEdge,
)
from kernelkit.models.linear import FractionalPoint, point_is_integral
from kernelkit.models.preference import PreferenceCycle, PreferenceSystem
from kernelkit.services.bridge import is_cyclic_preference_cycle
from kernelkit.services.polyhedra import build_pi

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)
MAX_SIGN_PATTERNS = 2 ** 12


def compute_phi(PS: PreferenceSystem, e: str, at: Optional[str] = None) -> frozenset:
    """
    Dominance sets.

    Args:
        PS: Preference system
        e: Edge id
        at: Optional endpoint of e

    Returns:
        phi(e) = {e} plus edges preferred to e at either end, or, with `at`,
        the edges of delta(at) preferred to e

    Raises:
        UnknownEdge: If e is not an edge
        NotAnEndpoint: If `at` is not an end of e
    """
    edge = PS.graph.edge(e)
    if at is not None and at not in edge.ends:
        raise NotAnEndpoint(at, e)
    return PS.dominators(e, at)


def is_stable_matching(PS: PreferenceSystem, M: Iterable[str]) -> tuple:
    """
    Check that M is a matching dominating every other edge.

    Returns:
        (True, None) or (False, violation) where violation names the shared
        vertex or the undominated edge

    Raises:
        UnknownEdge: If M names a non-edge
    """
    H = PS.graph
    chosen = set(M)
    for e in chosen:
        H.edge(e)
    covered = {}
    for e in sorted(chosen, key=PS.edge_ids.index):
        for w in H.edge(e).ends:
            if w in covered:
                return False, {'reason': 'not_a_matching', 'vertex': w, 'edges': [covered[w], e]}
            covered[w] = e
    for f in PS.edge_ids:
        if f in chosen:
            continue
        if not any(w in covered and PS.prefers(w, covered[w], f) for w in H.edge(f).ends):
            return False, {'reason': 'blocking_edge', 'edge': f}
    return True, None


def enumerate_stable_matchings(PS: PreferenceSystem, budget: Optional[int] = None) -> list:
    """
    All stable matchings by exhaustive search over matchings.

    Returns:
        frozensets of edge ids, ordered by their edges' declaration positions

    Raises:
        InstanceTooLarge: If more than `budget` matchings are examined
    """
    limit = settings.limit('matching_budget', budget)
    H = PS.graph
    edges = PS.edge_ids
    found = []
    examined = 0

    def extend(start: int, chosen: list, covered: set) -> None:
        nonlocal examined
        examined += 1
        if examined > limit:
            raise InstanceTooLarge("matching enumeration", limit)
        if is_stable_matching(PS, chosen)[0]:
            found.append(frozenset(chosen))
        for i in range(start, len(edges)):
            ends = H.edge(edges[i]).ends
            if covered.isdisjoint(ends):
                chosen.append(edges[i])
                extend(i + 1, chosen, covered | set(ends))
                chosen.pop()

    extend(0, [], set())
    position = {e: i for i, e in enumerate(edges)}
    found.sort(key=lambda m: sorted(position[e] for e in m))
    return found


def incidence_vector(PS: PreferenceSystem, M: Iterable[str]) -> FractionalPoint:
    chosen = set(M)
    return {e: Fraction(int(e in chosen)) for e in PS.edge_ids}


def fsm_check(PS: PreferenceSystem, x: Mapping) -> tuple:
    """
    Membership test for FSM(PS) with exact arithmetic.

    Returns:
        (ok, violated row labels); missing coordinates read as 0
    """
    unknown = [e for e in x if e not in PS.graph.edge_index]
    if unknown:
        raise UnknownEdge(unknown[0])
    violated = build_pi(PS).violated(x)
    return not violated, violated


def _require_fsm(PS: PreferenceSystem, x: Mapping) -> None:
    ok, violated = fsm_check(PS, x)
    if not ok:
        raise NotInFSM(violated)


def _require_half_integral(PS: PreferenceSystem, x: Mapping) -> None:
    for e in PS.edge_ids:
        value = Fraction(x.get(e, 0))
        if value not in (0, HALF, 1):
            raise NotHalfIntegral(e, value)


def _trace_cycle(PS: PreferenceSystem, edges: list) -> PreferenceCycle:
    """Order a 2-regular connected edge set as a preference-increasing cycle."""
    H = PS.graph
    position = {e: i for i, e in enumerate(PS.edge_ids)}
    start = min(edges, key=position.__getitem__)
    remaining = set(edges) - {start}
    for first, second in (H.edge(start).ends, H.edge(start).ends[::-1]):
        vertices, sequence, current, rest = [first], [start], second, set(remaining)
        while rest:
            step = next(f for f in rest if current in H.edge(f).ends)
            vertices.append(current)
            sequence.append(step)
            rest.discard(step)
            current = H.edge(step).other(current)
        cycle = PreferenceCycle(tuple(vertices), tuple(sequence))
        if is_cyclic_preference_cycle(PS, cycle):
            return cycle
    raise StructureViolation("cycle lacks cyclic preferences", sorted(edges, key=position.__getitem__))


def half_integral_decomposition(PS: PreferenceSystem, x: Mapping) -> list:
    """
    Split E_1/2(x) into its cycles and check their preferences.

    Args:
        PS: Preference system
        x: Half-integral point of FSM(PS)

    Returns:
        PreferenceCycle per component, each in its preference-increasing
        direction; odd ones are reported, not rejected

    Raises:
        NotInFSM: If x is outside FSM(PS)
        NotHalfIntegral: If some coordinate is not 0, 1/2 or 1
        StructureViolation: If a component is not a cycle with cyclic preferences
    """
    _require_half_integral(PS, x)
    _require_fsm(PS, x)
    H = PS.graph
    half = [e for e in PS.edge_ids if Fraction(x.get(e, 0)) == HALF]
    graph = nx.MultiGraph()
    for e in half:
        edge = H.edge(e)
        graph.add_edge(edge.u, edge.v, key=e)
    cycles = []
    position = {e: i for i, e in enumerate(PS.edge_ids)}
    for component in nx.connected_components(graph):
        sub = graph.subgraph(component)
        edges = sorted((key for _, _, key in sub.edges(keys=True)), key=position.__getitem__)
        if any(degree != 2 for _, degree in sub.degree()):
            raise StructureViolation("component is not a cycle", edges)
        cycles.append(_trace_cycle(PS, edges))
    cycles.sort(key=lambda c: position[c.edges[0]])
    for cycle in cycles:
        logger.debug("[Decompose] %s cycle %s", cycle.parity, ' '.join(cycle.edges))
    return cycles


def perturbation_vector(cycles: Iterable[PreferenceCycle], PS: Optional[PreferenceSystem] = None) -> dict:
    """
    The alternating vector z on a family of even cycles.

    Along each cycle e_1 ... e_l, z(e_i) = +1 for even i and -1 for odd i;
    z is 0 off the cycles.

    Args:
        cycles: Edge-disjoint even cycles in preference-increasing labeling
        PS: When given, each cycle's labeling is checked against it

    Raises:
        OddCycle: If some cycle has odd length
        InconsistentLabeling: If a cycle breaks cyclic preferences under PS
    """
    z = {}
    if PS is not None:
        z = {e: 0 for e in PS.edge_ids}
    for cycle in cycles:
        if len(cycle) % 2:
            raise OddCycle(list(cycle.edges))
        if PS is not None and not is_cyclic_preference_cycle(PS, cycle):
            raise InconsistentLabeling(list(cycle.edges), _first_break(PS, cycle))
        for i, e in enumerate(cycle.edges, start=1):
            if z.get(e):
                raise InvalidInput(f"Cycles share edge {e}")
            z[e] = 1 if i % 2 == 0 else -1
    return z


def _first_break(PS: PreferenceSystem, cycle: PreferenceCycle) -> int:
    length = len(cycle.edges)
    for i in range(length):
        try:
            if not PS.prefers(cycle.vertices[i], cycle.edges[i - 1], cycle.edges[i]):
                return i
        except KeyError:
            return i
    return 0


def _step_length(rows, x: Mapping, direction: Mapping) -> Optional[Fraction]:
    """Largest eps >= 0 keeping every row satisfied along x + eps*direction (None if unlimited)."""
    best = None
    for row in rows:
        rate = sum((c * direction.get(v, 0) for v, c in row.coeffs.items()), Fraction(0))
        if row.rel == '>=':
            rate = -rate
        if rate > 0:
            step = row.slack(x) / rate
            if best is None or step < best:
                best = step
    return best


def perturb_and_round(PS: PreferenceSystem, x: Mapping) -> FractionalPoint:
    """
    Round a half-integral FSM point to a stable matching.

    While x is fractional: decompose E_1/2(x) into even cycles with cyclic
    preferences, build z, and move along the first sign pattern (z, then -z,
    then per-cycle flips) whose exact ratio test gives a positive step.

    Args:
        PS: Preference system with no odd cycle of cyclic preferences
        x: Half-integral point of FSM(PS)

    Returns:
        Integral point of FSM(PS) (incidence vector of a stable matching)

    Raises:
        OddCyclicCycle: If E_1/2(x) contains an odd cycle
        NotHalfIntegral, NotInFSM: On bad input
        Degenerate: If no sign pattern moves the point
    """
    point = {e: Fraction(x.get(e, 0)) for e in PS.edge_ids}
    rows = build_pi(PS).rows
    while not point_is_integral(point):
        cycles = half_integral_decomposition(PS, point)
        odd = next((c for c in cycles if len(c) % 2), None)
        if odd is not None:
            raise OddCyclicCycle(list(odd.vertices), list(odd.edges))
        base = perturbation_vector(cycles, PS)
        if 2 ** len(cycles) > MAX_SIGN_PATTERNS:
            raise InstanceTooLarge("perturbation sign patterns", MAX_SIGN_PATTERNS)
        patterns = [(1,) * len(cycles), (-1,) * len(cycles)]
        patterns += [p for p in product((1, -1), repeat=len(cycles)) if p not in patterns]
        for signs in patterns:
            direction = dict(base)
            for sign, cycle in zip(signs, cycles):
                for e in cycle.edges:
                    direction[e] = sign * base[e]
            step = _step_length(rows, point, direction)
            if step is not None and step > 0:
                point = {e: point[e] + step * direction[e] for e in PS.edge_ids}
                logger.debug("[Round] moved by %s along signs %s", step, signs)
                break
        else:
            raise Degenerate("No sign pattern of the perturbation vector leaves the point")
    return point
