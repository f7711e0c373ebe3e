"""
Linear systems of the kernel and stable matching problems, and the
operations on them: vertex enumeration, integrality and bounded TDI checks,
Fourier-Motzkin elimination and system comparison.

LP solving, vertex enumeration and the TDI search live in lp.py,
vertices.py and tdi.py; they are re-exported here.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Optional

from kernelkit.config import settings
from kernelkit.exceptions import InstanceTooLarge, InvalidInput, UnknownVariable
from kernelkit.models.graph import Digraph
from kernelkit.models.linear import (
    LinearSystem,
    Row,
    format_fraction,
    point_is_integral,
    primitive_le,
)
from kernelkit.models.preference import PreferenceSystem
from kernelkit.models.reports import IntegralityReport
from kernelkit.services.bridge import enumerate_cliques
from kernelkit.services.lp import solve_lp_exact, verify_lp_certificate
from kernelkit.services.tdi import check_tdi, check_tdi_objective, find_tdi_refutation
from kernelkit.services.vertices import enumerate_vertices

logger = logging.getLogger(__name__)

__all__ = [
    'build_sigma', 'build_pi', 'build_sigma_as_prefs', 'solve_lp_exact', 'verify_lp_certificate',
    'enumerate_vertices', 'check_integrality', 'check_tdi', 'check_tdi_objective',
    'find_tdi_refutation', 'fm_eliminate', 'fm_eliminate_sequence', 'drop_implied_rows', 'systems_match',
    'MatchResult',
]

ONE = Fraction(1)
ZERO = Fraction(0)


def _ones(variables) -> dict:
    return {v: ONE for v in variables}


def build_sigma(D: Digraph, clique_mode: str = 'all', budget: Optional[int] = None) -> LinearSystem:
    """
    Fractional kernel system of D.

    Rows: x(v) + x(N+(v)) >= 1 per vertex, x(Q) <= 1 per clique Q (all
    cliques including singletons, or maximal ones), x >= 0.

    Args:
        D: Digraph
        clique_mode: 'all' (default, used for TDI work) or 'maximal'
        budget: Clique budget

    Raises:
        InstanceTooLarge: On clique budget excess
    """
    rows = []
    for v in D.vertices:
        members = [v] + D.order(D.out_neighbors(v))
        rows.append(Row(f"dom[{v}]", _ones(members), '>=', ONE, 'domination'))
    for clique in enumerate_cliques(D, clique_mode, budget=budget):
        rows.append(Row(f"clique[{','.join(clique.members)}]", _ones(clique.members), '<=', ONE, 'clique'))
    for v in D.vertices:
        rows.append(Row(f"nn[{v}]", {v: ONE}, '>=', ZERO, 'nonneg'))
    return LinearSystem(D.vertices, tuple(rows))


def build_pi(PS: PreferenceSystem) -> LinearSystem:
    """
    Stable matching system of PS.

    Rows: x(phi(e)) >= 1 per edge, x(delta(v)) <= 1 per non-isolated vertex,
    x >= 0 per edge.
    """
    H = PS.graph
    rows = []
    for e in PS.edge_ids:
        rows.append(Row(f"stab[{e}]", _ones(PS.dominators(e)), '>=', ONE, 'stability'))
    for v in H.vertices:
        if H.incident(v):
            rows.append(Row(f"deg[{v}]", _ones(H.incident(v)), '<=', ONE, 'degree'))
    for e in PS.edge_ids:
        rows.append(Row(f"nn[{e}]", {e: ONE}, '>=', ZERO, 'nonneg'))
    return LinearSystem(PS.edge_ids, tuple(rows))


def _triangles(PS: PreferenceSystem) -> list:
    H = PS.graph
    adjacent = {v: set() for v in H.vertices}
    for edge in H.edges:
        adjacent[edge.u].add(edge.v)
        adjacent[edge.v].add(edge.u)
    found = []
    for a, b, c in combinations(H.vertices, 3):
        if b in adjacent[a] and c in adjacent[a] and c in adjacent[b]:
            corners = {a, b, c}
            found.append(((a, b, c), [e.id for e in H.edges if set(e.ends) <= corners]))
    return found


def build_sigma_as_prefs(PS: PreferenceSystem, budget: Optional[int] = None) -> LinearSystem:
    """
    Kernel system of the preference orientation, written over root edges.

    Families: 'stability' (x(phi(e)) >= 1), 'vertex-clique' (x(delta(v)) <= 1),
    'subset-clique' (x(S) <= 1 for every proper nonempty S of delta(v)),
    'triangle' (x(O) <= 1 for the edges O induced on each triangle of H),
    'nonneg'.

    Raises:
        InstanceTooLarge: If the subset rows exceed the clique budget
    """
    limit = settings.limit('clique_budget', budget)
    H = PS.graph
    rows = []
    for e in PS.edge_ids:
        rows.append(Row(f"stab[{e}]", _ones(PS.dominators(e)), '>=', ONE, 'stability'))
    for v in H.vertices:
        if H.incident(v):
            rows.append(Row(f"deg[{v}]", _ones(H.incident(v)), '<=', ONE, 'vertex-clique'))
    count = 0
    for v in H.vertices:
        incident = H.incident(v)
        count += 2 ** len(incident) - 2 if incident else 0
        if count > limit:
            raise InstanceTooLarge("subset clique rows", limit)
        for size in range(1, len(incident)):
            for subset in combinations(incident, size):
                rows.append(Row(f"sub[{v}:{','.join(subset)}]", _ones(subset), '<=', ONE, 'subset-clique'))
    for corners, edges in _triangles(PS):
        rows.append(Row(f"tri[{','.join(corners)}]", _ones(edges), '<=', ONE, 'triangle'))
    for e in PS.edge_ids:
        rows.append(Row(f"nn[{e}]", {e: ONE}, '>=', ZERO, 'nonneg'))
    return LinearSystem(PS.edge_ids, tuple(rows))


def check_integrality(sys: LinearSystem, k: int = 1, budget: Optional[int] = None) -> IntegralityReport:
    """
    Decide whether every vertex of sys is 1/k-integral.

    Returns:
        IntegralityReport; `witness` is the first offending vertex

    Raises:
        Unbounded, Infeasible, InstanceTooLarge: As enumerate_vertices
    """
    if k < 1:
        raise InvalidInput("k must be a positive integer")
    vertices = enumerate_vertices(sys, budget=budget)
    for point in vertices:
        if not point_is_integral(point, k):
            return IntegralityReport(
                k=k, integral=False, vertex_count=len(vertices),
                witness={v: format_fraction(point[v]) for v in sys.variables},
            )
    return IntegralityReport(k=k, integral=True, vertex_count=len(vertices))


def _canonical(coeffs: Mapping, rhs: Fraction) -> tuple:
    """(sorted primitive <=-form coefficient items, rhs)."""
    scaled, bound = primitive_le(coeffs, rhs)
    return tuple(sorted(scaled.items())), bound


def fm_eliminate(sys: LinearSystem, variable: str, budget: Optional[int] = None) -> LinearSystem:
    """
    Fourier-Motzkin elimination of one variable.

    Every lower bound on `variable` is paired with every upper bound; rows
    without it are kept. The result drops rows 0 <= b with b >= 0, exact
    duplicates and rows dominated by a parallel row with smaller right-hand
    side (compared in primitive <=-form). Emitted rows are primitive <=-rows.

    Args:
        sys: Linear system
        variable: Variable to eliminate
        budget: Max combined rows; defaults to settings.fm_row_budget

    Raises:
        UnknownVariable: If `variable` is not declared
        InstanceTooLarge: On budget excess
    """
    if variable not in sys.variables:
        raise UnknownVariable(variable)
    limit = settings.limit('fm_row_budget', budget)
    lower, upper, kept = [], [], []
    non_unit = False
    for row in sys.rows:
        if variable not in row.coeffs:
            kept.append(row)
            continue
        non_unit = non_unit or abs(row.coeffs[variable]) != 1
        coeffs, rhs = row.as_le()
        (upper if coeffs[variable] > 0 else lower).append((coeffs, rhs))
    if non_unit:
        logger.warning("[FM] %s has a coefficient outside {0, +1, -1}; total dual integrality may not survive", variable)
    if len(lower) * len(upper) > limit:
        raise InstanceTooLarge(f"Fourier-Motzkin step on {variable}", limit)

    emitted = []
    for low_coeffs, low_rhs in lower:
        a_low = -low_coeffs[variable]
        for up_coeffs, up_rhs in upper:
            a_up = up_coeffs[variable]
            names = (set(low_coeffs) | set(up_coeffs)) - {variable}
            coeffs = {v: a_low * up_coeffs.get(v, ZERO) + a_up * low_coeffs.get(v, ZERO) for v in names}
            emitted.append(({v: c for v, c in coeffs.items() if c != 0}, a_low * up_rhs + a_up * low_rhs))

    chosen = {}
    order = []

    def offer(key_rhs: tuple, row: Row) -> None:
        key, bound = key_rhs
        if key not in chosen:
            chosen[key] = (bound, row)
            order.append(key)
        elif bound < chosen[key][0]:
            chosen[key] = (bound, row)

    contradictions = []
    for row in kept:
        offer(_canonical(*row.as_le()), row)
    for index, (coeffs, rhs) in enumerate(emitted, start=1):
        key, bound = _canonical(coeffs, rhs)
        if not key:
            if bound < 0:
                contradictions.append(Row(f"fm[{variable}]#{index}", {}, '<=', bound, 'fm'))
            continue
        offer((key, bound), Row(f"fm[{variable}]#{index}", dict(key), '<=', bound, 'fm'))

    rows = [chosen[key][1] for key in order if key] + contradictions
    rows += [chosen[key][1] for key in order if not key and chosen[key][0] < 0]
    variables = tuple(v for v in sys.variables if v != variable)
    logger.info("[FM] eliminated %s: %d lower x %d upper, %d rows remain", variable, len(lower), len(upper), len(rows))
    return LinearSystem(variables, tuple(rows))


def fm_eliminate_sequence(sys: LinearSystem, variables, budget: Optional[int] = None) -> LinearSystem:
    """Eliminate several variables in the given order."""
    for variable in variables:
        sys = fm_eliminate(sys, variable, budget)
    return sys


@dataclass
class MatchResult:
    """Outcome of systems_match: rows (as text) found in only one system."""
    matched: bool
    only_in_a: list = field(default_factory=list)
    only_in_b: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {'matched': self.matched, 'only_in_a': self.only_in_a, 'only_in_b': self.only_in_b}


def _row_set(sys: LinearSystem) -> dict:
    rows = {}
    for row in sys.rows:
        key, bound = _canonical(*row.as_le())
        if not key and bound >= 0:
            continue
        rows.setdefault((key, bound), row)
    return rows


def _describe(key: tuple, bound: Fraction) -> str:
    coeffs = dict(key)
    return Row('diff', coeffs, '<=', bound).describe() if coeffs else f"0 <= {format_fraction(bound)}"


def _implied(row_key: tuple, system: LinearSystem) -> bool:
    key, bound = row_key
    result = solve_lp_exact(system, dict(key), 'max')
    if result.status == 'infeasible':
        return True
    return result.status == 'optimal' and result.value <= bound


def drop_implied_rows(sys: LinearSystem, keep: Optional[LinearSystem] = None) -> LinearSystem:
    """
    Drop, first to last, every row the remaining rows imply (LP check).

    Rows whose canonical form is a row of `keep` are never dropped, so a
    system with keep's feasible set that contains all of keep's rows
    comes back with exactly those rows.

    Args:
        sys: System to reduce; the feasible set does not change
        keep: Rows to protect

    Returns:
        LinearSystem over the same variables
    """
    protected = set(_row_set(keep)) if keep is not None else set()
    rows = list(sys.rows)
    seen = set()
    index = 0
    while index < len(rows):
        key = _canonical(*rows[index].as_le())
        if key in protected and key not in seen:
            seen.add(key)
            index += 1
            continue
        rest = LinearSystem(sys.variables, tuple(rows[:index] + rows[index + 1:]))
        if (not key[0] and key[1] >= 0) or _implied(key, rest):
            del rows[index]
        else:
            index += 1
    logger.info("[LP] redundancy pass: %d -> %d rows", len(sys), len(rows))
    return LinearSystem(sys.variables, tuple(rows))


def systems_match(
    a: LinearSystem,
    b: LinearSystem,
    renaming: Optional[Mapping] = None,
    allow_redundant: bool = False,
) -> MatchResult:
    """
    Compare two systems as sets of canonical rows.

    Rows are brought to primitive integer <=-form; trivially true rows are
    ignored and duplicates collapse. `renaming` is applied to a first.

    Args:
        a: First system
        b: Second system
        renaming: Variable renaming applied to a
        allow_redundant: Also accept a row found in one system only when the
            other system implies it (LP check), i.e. compare feasible sets

    Returns:
        MatchResult with the unmatched rows of each side
    """
    if renaming:
        a = a.renamed(renaming)
    rows_a, rows_b = _row_set(a), _row_set(b)
    only_a = [key for key in rows_a if key not in rows_b]
    only_b = [key for key in rows_b if key not in rows_a]
    if allow_redundant and (only_a or only_b):
        variables = tuple(dict.fromkeys(a.variables + b.variables))
        wide_a = LinearSystem(variables, a.rows)
        wide_b = LinearSystem(variables, b.rows)
        only_a = [key for key in only_a if not _implied(key, wide_b)]
        only_b = [key for key in only_b if not _implied(key, wide_a)]
    only_a.sort(key=lambda kb: (kb[0], kb[1]))
    only_b.sort(key=lambda kb: (kb[0], kb[1]))
    return MatchResult(
        matched=not only_a and not only_b,
        only_in_a=[_describe(*key) for key in only_a],
        only_in_b=[_describe(*key) for key in only_b],
    )
