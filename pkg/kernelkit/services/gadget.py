"""
Parallel-edge gadget.

Every edge of a parallel class is replaced by a 6-cycle u0 u1 v2 v0 v1 u2
with two hanging edges u-u0 and v-v0; the hanging edges take the replaced
edge's place in the orders at u and v. Points of the fractional stable
matching polytope lift into the expanded system and project back.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from kernelkit.config import budget_cap, current_budget_cap, settings
from kernelkit.exceptions import InvalidInput, InvalidTable, NoValidTable, NotInFSM, ProjectionMismatch, UnknownEdge
from kernelkit.models.graph import Edge, Multigraph
from kernelkit.models.linear import FractionalPoint, LinearSystem
from kernelkit.models.preference import PreferenceSystem
from kernelkit.services.formats import parse_order_fragment, render_orders
from kernelkit.services.polyhedra import (
    MatchResult,
    build_pi,
    drop_implied_rows,
    enumerate_vertices,
    fm_eliminate_sequence,
    systems_match,
)
from kernelkit.services.stable import compute_phi, fsm_check

logger = logging.getLogger(__name__)

ONE = Fraction(1)

INTERNAL = ('u0', 'u1', 'u2', 'v0', 'v1', 'v2')

ROLE_ENDS = {
    'u-u0': ('u', 'u0'),
    'v-v0': ('v', 'v0'),
    'u0-u1': ('u0', 'u1'),
    'u0-u2': ('u0', 'u2'),
    'v0-v1': ('v0', 'v1'),
    'v0-v2': ('v0', 'v2'),
    'u1-v2': ('u1', 'v2'),
    'u2-v1': ('u2', 'v1'),
}
ROLES = tuple(ROLE_ENDS)

INCIDENT_ROLES = {name: tuple(role for role, ends in ROLE_ENDS.items() if name in ends) for name in INTERNAL}

# Fourier-Motzkin order that projects a gadget back onto its hanging edge v-v0
ELIMINATION_ORDER = ('u1-v2', 'u2-v1', 'u-u0', 'u0-u1', 'u0-u2', 'v0-v1', 'v0-v2')


@dataclass(frozen=True)
class InternalOrderTable:
    """
    Strict order (most preferred first) on the gadget edges at each internal
    vertex, written over role names.
    """
    orders: Mapping = field(default_factory=dict)

    def __post_init__(self):
        missing = [name for name in INTERNAL if name not in self.orders]
        extra = [name for name in self.orders if name not in INTERNAL]
        if missing or extra:
            raise InvalidTable(
                f"Table must order exactly the internal vertices {' '.join(INTERNAL)}",
                {'missing': missing, 'unexpected': extra},
            )
        normalized = {}
        for name in INTERNAL:
            order = tuple(self.orders[name])
            if len(order) != len(INCIDENT_ROLES[name]) or set(order) != set(INCIDENT_ROLES[name]):
                raise InvalidTable(
                    f"Order at {name} must list {' '.join(INCIDENT_ROLES[name])} exactly once",
                    {'vertex': name, 'order': list(order)},
                )
            normalized[name] = order
        object.__setattr__(self, 'orders', normalized)

    def __hash__(self) -> int:
        return hash(self.key())

    def key(self) -> tuple:
        return tuple(self.orders[name] for name in INTERNAL)

    def to_text(self) -> str:
        """Preference-format fragment over the canonical internal names."""
        return '\n'.join(render_orders(self.orders, INTERNAL)) + '\n'

    @classmethod
    def from_text(cls, text: str) -> 'InternalOrderTable':
        try:
            return cls(parse_order_fragment(text))
        except InvalidInput as e:
            raise InvalidTable(f"Unreadable order table: {e.message}") from None

    @classmethod
    def load(cls, path: Path) -> 'InternalOrderTable':
        return cls.from_text(Path(path).read_text(encoding='utf-8'))


def candidate_tables() -> list:
    """All 3!*3!*2^4 = 576 tables, in a fixed order."""
    choices = [list(permutations(INCIDENT_ROLES[name])) for name in INTERNAL]
    return [InternalOrderTable(dict(zip(INTERNAL, combo))) for combo in product(*choices)]


def load_default_table() -> InternalOrderTable:
    """The shipped table at settings.default_gadget_table."""
    path = settings.default_gadget_table
    if not path.exists():
        raise InvalidTable(f"Gadget table not found at {path}")
    return InternalOrderTable.load(path)


@dataclass(frozen=True)
class Gadget:
    """Fresh vertices and edges standing in for one replaced edge."""
    edge: str
    u: str
    v: str
    vertices: Mapping
    edges: Mapping

    def edge_for(self, role: str) -> str:
        return self.edges[role]


def _make_gadget(edge: Edge) -> Gadget:
    vertices = {name: f"{edge.id}:{name}" for name in INTERNAL}
    return Gadget(
        edge=edge.id,
        u=edge.u,
        v=edge.v,
        vertices=vertices,
        edges={role: f"{edge.id}:{role}" for role in ROLES},
    )


@dataclass(frozen=True, eq=False)
class GadgetExpansion:
    """An expanded preference system with the map back to the original edges."""
    original: PreferenceSystem
    expanded: PreferenceSystem
    table: InternalOrderTable
    gadgets: Mapping = field(default_factory=dict)

    @property
    def replaced(self) -> tuple:
        return tuple(self.gadgets)

    def origin(self, edge_id: str) -> str:
        """Original edge an expanded edge stands for (itself if unreplaced)."""
        head, _, role = edge_id.rpartition(':')
        if head in self.gadgets and role in ROLE_ENDS:
            return head
        if edge_id in self.original.graph.edge_index:
            return edge_id
        raise UnknownEdge(edge_id)

    def elimination_order(self, edge: Optional[str] = None) -> list:
        """Gadget variables to eliminate, gadget by gadget (or for one gadget)."""
        edges = list(self.gadgets) if edge is None else [edge]
        return [self.gadgets[e].edge_for(role) for e in edges for role in ELIMINATION_ORDER]

    def projection_renaming(self) -> dict:
        return {gadget.edge_for('v-v0'): e for e, gadget in self.gadgets.items()}


def expand(
    PS: PreferenceSystem,
    table: InternalOrderTable,
    only: Optional[Iterable[str]] = None,
) -> GadgetExpansion:
    """
    Replace the edges of nontrivial parallel classes by gadgets.

    Args:
        PS: Preference system, possibly with parallel edges
        table: Internal order table
        only: Restrict replacement to these edges (the result may then keep
            parallel edges)

    Returns:
        GadgetExpansion whose expanded system is simple when `only` is None

    Raises:
        InvalidTable: If table is not an InternalOrderTable
        UnknownEdge: If `only` names an unknown edge
    """
    if not isinstance(table, InternalOrderTable):
        raise InvalidTable(f"Expected an InternalOrderTable, got {type(table).__name__}")
    H = PS.graph
    parallel = {e for group in H.parallel_classes if len(group) > 1 for e in group}
    if only is not None:
        wanted = set(only)
        for e in wanted:
            H.edge(e)
        parallel &= wanted
    gadgets = {edge.id: _make_gadget(edge) for edge in H.edges if edge.id in parallel}
    if not gadgets:
        return GadgetExpansion(PS, PS, table, {})

    vertices = list(H.vertices)
    edges = []
    orders = {}
    for edge in H.edges:
        gadget = gadgets.get(edge.id)
        if gadget is None:
            edges.append(edge)
            continue
        names = {'u': edge.u, 'v': edge.v, **gadget.vertices}
        vertices.extend(gadget.vertices[name] for name in INTERNAL)
        for role, (a, b) in ROLE_ENDS.items():
            edges.append(Edge(gadget.edge_for(role), names[a], names[b]))
        for name in INTERNAL:
            orders[gadget.vertices[name]] = tuple(gadget.edge_for(role) for role in table.orders[name])

    for w in H.vertices:
        replaced = []
        for e in PS.orders[w]:
            gadget = gadgets.get(e)
            if gadget is None:
                replaced.append(e)
            else:
                replaced.append(gadget.edge_for('u-u0' if w == gadget.u else 'v-v0'))
        orders[w] = tuple(replaced)

    expanded = PreferenceSystem(Multigraph(tuple(vertices), tuple(edges)), orders)
    logger.info("[Gadget] replaced %d edge(s): %d -> %d edges", len(gadgets), len(H.edges), len(edges))
    return GadgetExpansion(PS, expanded, table, gadgets)


def _gadget_values(a: Fraction, p: Fraction) -> dict:
    return {
        'u-u0': a,
        'v-v0': a,
        'u0-u1': ONE - a - p,
        'v0-v2': ONE - a - p,
        'u0-u2': p,
        'v0-v1': p,
        'u1-v2': a + p,
        'u2-v1': ONE - p,
    }


def lift_point(x: Mapping, exp: GadgetExpansion, verify: bool = True) -> FractionalPoint:
    """
    Lift a point of FSM(original) to the expanded system.

    With a = x(e) and p = x(phi_u(e)) measured in the original system, the
    hanging edges carry a, u0-u1 and v0-v2 carry 1-a-p, u0-u2 and v0-v1
    carry p, u1-v2 carries a+p and u2-v1 carries 1-p.

    Args:
        x: Point of FSM(original)
        exp: Gadget expansion
        verify: Re-check that the lift lies in FSM(expanded)

    Returns:
        Lifted point over the expanded edges

    Raises:
        NotInFSM: If x is not in FSM(original)
        InvalidTable: If verify is set and the lift leaves FSM(expanded)
    """
    ok, violated = fsm_check(exp.original, x)
    if not ok:
        raise NotInFSM(violated)
    lifted = {}
    for e in exp.original.edge_ids:
        a = Fraction(x.get(e, 0))
        gadget = exp.gadgets.get(e)
        if gadget is None:
            lifted[e] = a
            continue
        p = sum((Fraction(x.get(f, 0)) for f in compute_phi(exp.original, e, at=gadget.u)), Fraction(0))
        for role, value in _gadget_values(a, p).items():
            lifted[gadget.edge_for(role)] = value
    if verify:
        ok, violated = fsm_check(exp.expanded, lifted)
        if not ok:
            raise InvalidTable(
                f"Lifted point leaves FSM of the expansion ({', '.join(violated[:5])})",
                {'violated': violated},
            )
    return {e: lifted[e] for e in exp.expanded.edge_ids}


def project_point(x: Mapping, exp: GadgetExpansion) -> FractionalPoint:
    """
    Project a point of FSM(expanded) back onto the original edges.

    Raises:
        ProjectionMismatch: If a gadget's hanging edges carry different values
        NotInFSM: If x is not in FSM(expanded)
    """
    for e, gadget in exp.gadgets.items():
        left = Fraction(x.get(gadget.edge_for('u-u0'), 0))
        right = Fraction(x.get(gadget.edge_for('v-v0'), 0))
        if left != right:
            raise ProjectionMismatch(e, left, right)
    ok, violated = fsm_check(exp.expanded, x)
    if not ok:
        raise NotInFSM(violated)
    projected = {}
    for e in exp.original.edge_ids:
        gadget = exp.gadgets.get(e)
        source = gadget.edge_for('u-u0') if gadget else e
        projected[e] = Fraction(x.get(source, 0))
    return projected


@dataclass(frozen=True)
class EliminationStep:
    """System left after one more gadget is eliminated, with the pi it should equal."""
    edge: str
    reduced: LinearSystem
    expected: LinearSystem

    def match(self) -> MatchResult:
        return systems_match(self.reduced, self.expected)


def _expected_after(exp: GadgetExpansion, done: Sequence[str]) -> LinearSystem:
    rest = [e for e in exp.gadgets if e not in done]
    partial = expand(exp.original, exp.table, only=rest)
    return build_pi(partial.expanded).renamed({e: exp.gadgets[e].edge_for('v-v0') for e in done})


def elimination_steps(exp: GadgetExpansion, budget: Optional[int] = None) -> Iterator[EliminationStep]:
    """
    Eliminate the gadgets of exp one at a time.

    After the seven Fourier-Motzkin steps of a gadget, rows implied by the
    rest are dropped except the rows of pi of the expansion that still
    keeps the remaining gadgets (v-v0 standing for each eliminated edge).
    The next gadget thus starts from unit-coefficient pi rows.
    """
    sys = build_pi(exp.expanded)
    done = []
    for e in exp.gadgets:
        sys = fm_eliminate_sequence(sys, exp.elimination_order(e), budget)
        done.append(e)
        expected = _expected_after(exp, done)
        sys = drop_implied_rows(sys, keep=expected)
        logger.info("[Gadget] eliminated %s: %d rows, %d expected", e, len(sys), len(expected))
        yield EliminationStep(e, sys, expected)


def eliminate_gadgets(exp: GadgetExpansion, budget: Optional[int] = None) -> LinearSystem:
    """pi(expanded) with every gadget variable but v-v0 eliminated."""
    sys = build_pi(exp.expanded)
    for step in elimination_steps(exp, budget):
        sys = step.reduced
    return sys


def check_projection(exp: GadgetExpansion, budget: Optional[int] = None, exact: bool = True) -> MatchResult:
    """
    Compare the eliminated expansion, renamed v-v0 -> e, with pi(original).

    Args:
        exp: Gadget expansion
        budget: FM row budget per step
        exact: Require equal row sets after every gadget; otherwise compare
            the final feasible sets only

    Returns:
        MatchResult; on an exact mismatch, the one of the first failing gadget
    """
    reduced = build_pi(exp.expanded)
    for step in elimination_steps(exp, budget):
        reduced = step.reduced
        if not exact:
            continue
        result = step.match()
        if not result.matched:
            logger.warning("[Gadget] elimination of %s leaves rows outside pi", step.edge)
            return result
    return systems_match(reduced, build_pi(exp.original), exp.projection_renaming(), allow_redundant=not exact)


def _lifts_everywhere(table: InternalOrderTable, corpus: Sequence) -> bool:
    for PS, points in corpus:
        exp = expand(PS, table)
        for x in points:
            if not fsm_check(exp.expanded, lift_point(x, exp, verify=False))[0]:
                return False
    return True


def derive_internal_orders(
    corpus: Sequence[PreferenceSystem],
    check_elimination: bool = True,
    max_workers: Optional[int] = None,
) -> list:
    """
    Search all 576 internal order tables.

    A table is kept when (i) the lift of every vertex of FSM(PS) lies in
    FSM of the expansion for every corpus instance and, with
    check_elimination, (ii) eliminating the gadget variables leaves the
    polyhedron of pi(PS).

    Args:
        corpus: Preference systems with parallel edges
        check_elimination: Apply criterion (ii)
        max_workers: Thread count for criterion (i); defaults to settings

    Returns:
        Passing tables in candidate order

    Raises:
        InvalidInput: If the corpus is empty
        NoValidTable: If no candidate passes
    """
    corpus = list(corpus)
    if not corpus:
        raise InvalidInput("Gadget derivation needs a nonempty corpus")
    prepared = [(PS, enumerate_vertices(build_pi(PS))) for PS in corpus]
    candidates = candidate_tables()
    logger.info("[Gadget] testing %d tables on %d instance(s)", len(candidates), len(corpus))

    cap = current_budget_cap()

    def lifts(table: InternalOrderTable) -> bool:
        # worker threads start with a fresh context
        with budget_cap(cap):
            return _lifts_everywhere(table, prepared)

    with ThreadPoolExecutor(max_workers=max_workers or settings.max_workers) as pool:
        verdicts = list(pool.map(lifts, candidates))
    passing = [table for table, ok in zip(candidates, verdicts) if ok]
    logger.info("[Gadget] %d table(s) pass the lift test", len(passing))

    if check_elimination:
        passing = [
            table for table in passing
            if all(check_projection(expand(PS, table), exact=False).matched for PS in corpus)
        ]
        logger.info("[Gadget] %d table(s) pass the elimination test", len(passing))

    if not passing:
        raise NoValidTable("No internal order table passes the gadget checks")
    return passing
