"""
Brute-force ground truth and the equivalence sweep.

Kernels are found by exhaustive search over vertex subsets; the sweep runs
every orientation of a small line multigraph through four independent
checks (goodness, kernel perfection, integrality of every induced
subdigraph's fractional kernel polytope, bounded TDI of its kernel system)
and reports any orientation on which they disagree.
"""
import logging
import random
from dataclasses import dataclass
from itertools import combinations, permutations, product
from math import factorial, prod
from typing import Iterator, Optional

import networkx as nx

from kernelkit.config import settings
from kernelkit.exceptions import Infeasible, InstanceTooLarge, InvalidInput
from kernelkit.models.graph import Arc, Digraph, Edge, Multigraph
from kernelkit.models.linear import point_is_integral
from kernelkit.models.preference import PreferenceSystem
from kernelkit.models.reports import CorollaryReport, GoodnessReport, OrientationVerdict, TheoremReport
from kernelkit.services.bridge import is_good, kernel_matching_translate, orientation_from_prefs
from kernelkit.services.graphcore import build_line_multigraph, induced_subdigraph
from kernelkit.services.polyhedra import (
    build_pi,
    build_sigma,
    check_integrality,
    check_tdi,
    enumerate_vertices,
    find_tdi_refutation,
)
from kernelkit.services.stable import enumerate_stable_matchings, fsm_check, incidence_vector

logger = logging.getLogger(__name__)

CANONICAL_LIMIT = 6


def _masks(D: Digraph) -> list:
    index = D.vertex_index
    out = [0] * len(D.vertices)
    for tail, head in D.pairs:
        out[index[tail]] |= 1 << index[head]
    return out


def _is_kernel_mask(out: list, universe: int, chosen: int) -> bool:
    for i in range(len(out)):
        bit = 1 << i
        if not universe & bit:
            continue
        if chosen & bit:
            if out[i] & chosen:
                return False
        elif not out[i] & chosen:
            return False
    return True


def _submasks(universe: int) -> Iterator[int]:
    sub = universe
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & universe


def _check_subsets(n: int, budget: Optional[int], what: str) -> None:
    limit = settings.limit('subset_budget', budget)
    if 2 ** n > limit:
        raise InstanceTooLarge(what, limit)


def _has_kernel_mask(out: list, universe: int) -> bool:
    return any(_is_kernel_mask(out, universe, sub) for sub in _submasks(universe))


def enumerate_kernels(D: Digraph, budget: Optional[int] = None) -> list:
    """
    All kernels of D: independent vertex sets that every outside vertex points into.

    Args:
        D: Digraph
        budget: Max subsets examined; defaults to settings.subset_budget

    Returns:
        Kernels as vertex lists in declared order, sorted by size then positions

    Raises:
        InstanceTooLarge: If 2^|V| exceeds the budget
    """
    n = len(D.vertices)
    _check_subsets(n, budget, "kernel enumeration")
    out = _masks(D)
    universe = (1 << n) - 1
    found = []
    for chosen in range(1 << n):
        if _is_kernel_mask(out, universe, chosen):
            found.append([D.vertices[i] for i in range(n) if chosen >> i & 1])
    found.sort(key=lambda U: (len(U), [D.vertex_index[v] for v in U]))
    return found


def has_kernel(D: Digraph, budget: Optional[int] = None) -> bool:
    _check_subsets(len(D.vertices), budget, "kernel search")
    return _has_kernel_mask(_masks(D), (1 << len(D.vertices)) - 1)


def _subsets_by_size(vertices: tuple) -> Iterator[tuple]:
    for size in range(1, len(vertices) + 1):
        yield from combinations(vertices, size)


def is_kernel_perfect(D: Digraph, budget: Optional[int] = None) -> tuple:
    """
    Check that every induced subdigraph of D has a kernel.

    The empty subdigraph has the empty kernel.

    Returns:
        (True, None) or (False, smallest kernel-free vertex subset)

    Raises:
        InstanceTooLarge: If 2^|V| exceeds the budget
    """
    n = len(D.vertices)
    _check_subsets(n, budget, "kernel-perfect check")
    out = _masks(D)
    index = D.vertex_index
    for subset in _subsets_by_size(D.vertices):
        universe = sum(1 << index[v] for v in subset)
        if not _has_kernel_mask(out, universe):
            return False, list(subset)
    return True, None


def goodness_witness_subset(D: Digraph, report: GoodnessReport) -> Optional[list]:
    """
    Vertex set on which a goodness failure forces a kernel-free subdigraph.

    A one-way cycle inside a clique has no kernel; neither does a directed odd
    cycle without chords or pseudo-chords.
    """
    if report.is_good or not report.certificate:
        return None
    return D.order(report.certificate['cycle'])


def raw_orientations(H: Multigraph, budget: Optional[int] = None) -> Iterator[Digraph]:
    """
    Every orientation of L(H), one arc per line edge, provenance kept.

    Raises:
        InstanceTooLarge: If 2^|E(L(H))| exceeds the budget
    """
    L = build_line_multigraph(H)
    _check_subsets(len(L.edges), budget, "raw orientation sweep")
    for flips in product((False, True), repeat=len(L.edges)):
        arcs = []
        for edge, flip in zip(L.edges, flips):
            tail, head = (edge.v, edge.u) if flip else (edge.u, edge.v)
            arcs.append(Arc(f"{tail}>{head}@{edge.label}", tail, head, edge.label))
        yield Digraph(L.vertices, tuple(arcs))


def preference_systems(H: Multigraph) -> Iterator[PreferenceSystem]:
    """Every preference system over H, per-vertex permutations in lexicographic order."""
    choices = [list(permutations(H.incident(v))) for v in H.vertices]
    for combo in product(*choices):
        yield PreferenceSystem(H, dict(zip(H.vertices, combo)))


def count_preference_systems(H: Multigraph) -> int:
    return prod(factorial(H.degree(v)) for v in H.vertices)


def sample_preference_systems(H: Multigraph, count: int, seed: int = 0) -> list:
    """Seeded random preference systems over H (repeats possible)."""
    rng = random.Random(seed)
    sampled = []
    for _ in range(count):
        orders = {}
        for v in H.vertices:
            order = list(H.incident(v))
            rng.shuffle(order)
            orders[v] = tuple(order)
        sampled.append(PreferenceSystem(H, orders))
    return sampled


def _root_from_networkx(graph: nx.MultiGraph) -> Multigraph:
    names = {node: f"r{i}" for i, node in enumerate(sorted(graph.nodes), start=1)}
    pairs = sorted((min(names[a], names[b]), max(names[a], names[b])) for a, b in graph.edges())
    edges = tuple(Edge(f"e{i}", a, b) for i, (a, b) in enumerate(pairs, start=1))
    return Multigraph(tuple(names[node] for node in sorted(graph.nodes)), edges)


def small_roots(max_edges: int, simple_only: bool = False) -> list:
    """
    Loopless multigraphs without isolated vertices on 1..max_edges edges,
    one per isomorphism class, in a deterministic order.
    """
    if max_edges < 1:
        raise InvalidInput("max_edges must be positive")
    seed = nx.MultiGraph()
    seed.add_edge(0, 1)
    levels = [[seed]]
    for _ in range(max_edges - 1):
        buckets = {}
        for graph in levels[-1]:
            n = graph.number_of_nodes()
            candidates = [(a, b) for a in range(n) for b in range(a + 1, n)]
            candidates += [(a, n) for a in range(n)] + [(n, n + 1)]
            for a, b in candidates:
                if simple_only and graph.has_edge(a, b):
                    continue
                grown = graph.copy()
                grown.add_edge(a, b)
                key = (grown.number_of_nodes(), tuple(sorted(d for _, d in grown.degree())))
                bucket = buckets.setdefault(key, [])
                if not any(nx.is_isomorphic(grown, other) for other in bucket):
                    bucket.append(grown)
        levels.append([graph for key in sorted(buckets) for graph in buckets[key]])
    roots = [_root_from_networkx(graph) for level in levels for graph in level]
    logger.info("[Corpus] %d root(s) with at most %d edge(s)", len(roots), max_edges)
    return roots


def compare_oracles(PS: PreferenceSystem, budget: Optional[int] = None) -> dict:
    """
    Stable matchings three ways: brute force, integral points of FSM, and
    kernels of the derived orientation.
    """
    edge_ids = PS.edge_ids
    _check_subsets(len(edge_ids), budget, "integral point scan")
    stable = {frozenset(M) for M in enumerate_stable_matchings(PS, budget)}
    integral = set()
    for bits in product((0, 1), repeat=len(edge_ids)):
        chosen = [e for e, bit in zip(edge_ids, bits) if bit]
        if fsm_check(PS, incidence_vector(PS, chosen))[0]:
            integral.add(frozenset(chosen))
    D = orientation_from_prefs(PS)
    kernels = {kernel_matching_translate(PS.graph, U) for U in enumerate_kernels(D, budget)}
    return {
        'agree': stable == integral == kernels,
        'stable_matchings': stable,
        'fsm_integral_points': integral,
        'kernels': kernels,
    }


@dataclass(frozen=True)
class SubdigraphVerdict:
    has_kernel: bool
    integral: bool
    tdi: Optional[bool]


def canonical_key(D: Digraph) -> tuple:
    """Isomorphism-invariant key for digraphs up to CANONICAL_LIMIT vertices."""
    n = len(D.vertices)
    if n > CANONICAL_LIMIT:
        return ('labelled', D.vertices, tuple(sorted(D.pairs)))
    index = D.vertex_index
    pairs = [(index[t], index[h]) for t, h in D.pairs]
    best = None
    for perm in permutations(range(n)):
        code = tuple(sorted((perm[t], perm[h]) for t, h in pairs))
        if best is None or code < best:
            best = code
    return (n, best)


class TheoremVerifier:
    """
    Runs the equivalence checks on orientations, caching per-subdigraph
    verdicts by isomorphism class.
    """

    def __init__(
        self,
        tdi_c_bound: Optional[int] = None,
        budget: Optional[int] = None,
        tdi_ceiling: Optional[int] = None,
    ):
        self.tdi_c_bound = settings.tdi_c_bound if tdi_c_bound is None else tdi_c_bound
        if self.tdi_c_bound < 1:
            raise InvalidInput("tdi_c_bound must be a positive integer")
        # box searched for a refutation once integrality fails
        self.tdi_ceiling = max(self.tdi_c_bound, settings.tdi_ceiling if tdi_ceiling is None else tdi_ceiling)
        self.budget = budget
        self._cache = {}

    def subdigraph_verdict(self, D: Digraph) -> SubdigraphVerdict:
        key = canonical_key(D)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        sigma = build_sigma(D, budget=self.budget)
        try:
            vertices = enumerate_vertices(sigma, budget=self.budget)
            integral = bool(vertices) and all(point_is_integral(p) for p in vertices)
        except Infeasible:
            integral = False
        tdi = None
        if integral:
            tdi = check_tdi(sigma, 1, self.tdi_c_bound, stop_at_first=True).passed
        verdict = SubdigraphVerdict(has_kernel(D, self.budget), integral, tdi)
        self._cache[key] = verdict
        return verdict

    def orientation_verdict(
        self,
        D: Digraph,
        source: str = 'raw',
        PS: Optional[PreferenceSystem] = None,
        goodness: Optional[GoodnessReport] = None,
    ) -> OrientationVerdict:
        """All four verdicts for one orientation, with witnesses."""
        _check_subsets(len(D.vertices), self.budget, "induced subdigraph sweep")
        if goodness is None:
            goodness = is_good(D, budget=self.budget)
        kernel_free = nonintegral = tdi_subset = None
        tdi_state = 'pass'
        for subset in _subsets_by_size(D.vertices):
            verdict = self.subdigraph_verdict(induced_subdigraph(D, subset))
            if kernel_free is None and not verdict.has_kernel:
                kernel_free = list(subset)
            if nonintegral is None and not verdict.integral:
                nonintegral = list(subset)
            if tdi_subset is None and verdict.tdi is False:
                tdi_subset = list(subset)

        nonintegral_vertex = tdi_objective = None
        if nonintegral is not None:
            sigma = build_sigma(induced_subdigraph(D, nonintegral))
            try:
                nonintegral_vertex = check_integrality(sigma, 1, self.budget).witness
                failure = find_tdi_refutation(sigma, 1, self.tdi_ceiling)
            except Infeasible:
                failure = None
            if failure is not None and tdi_subset is None:
                tdi_subset, tdi_objective = list(nonintegral), failure.objective
        if tdi_objective is None and tdi_subset is not None:
            report = check_tdi(build_sigma(induced_subdigraph(D, tdi_subset)), 1, self.tdi_c_bound, stop_at_first=True)
            tdi_objective = report.failures[0].objective if report.failures else None
        if tdi_subset is not None:
            tdi_state = 'fail'
        elif nonintegral is not None:
            # empty, or no refuting objective up to the ceiling
            tdi_state = 'implied_fail'

        return OrientationVerdict(
            encoding=D.encoding(),
            source=source,
            preferences={v: list(order) for v, order in PS.orders.items()} if PS is not None else None,
            good=goodness.is_good,
            kernel_perfect=kernel_free is None,
            kernel_ideal=nonintegral is None,
            tdi=tdi_state,
            goodness_certificate=goodness.certificate,
            kernel_free_subset=kernel_free,
            nonintegral_subset=nonintegral,
            nonintegral_vertex=nonintegral_vertex,
            tdi_subset=tdi_subset,
            tdi_objective=tdi_objective,
        )

    def violations(self, D: Digraph, verdict: OrientationVerdict, goodness: GoodnessReport) -> list:
        found = []
        if not verdict.consistent:
            found.append(
                f"{verdict.encoding}: good={verdict.good} kernel_perfect={verdict.kernel_perfect} "
                f"kernel_ideal={verdict.kernel_ideal} tdi={verdict.tdi}"
            )
        witness = goodness_witness_subset(D, goodness)
        if witness is not None and has_kernel(induced_subdigraph(D, witness), self.budget):
            found.append(f"{verdict.encoding}: goodness witness {' '.join(witness)} has a kernel")
        return found

    def verify(self, H: Multigraph) -> TheoremReport:
        """
        Sweep every preference system over H and, when L(H) has at most
        settings.raw_orientation_edge_limit edges, every raw orientation.

        Raises:
            InstanceTooLarge: If the number of preference systems exceeds the subset budget
        """
        limit = settings.limit('subset_budget', self.budget)
        if count_preference_systems(H) > limit:
            raise InstanceTooLarge("preference system sweep", limit)
        orientations = {}
        for PS in preference_systems(H):
            D = orientation_from_prefs(PS)
            orientations.setdefault(D.encoding(), (D, 'prefs', PS))
        L = build_line_multigraph(H)
        if len(L.edges) <= settings.raw_orientation_edge_limit:
            for D in raw_orientations(H, self.budget):
                orientations.setdefault(D.encoding(), (D, 'raw', None))

        verdicts, violations = [], []
        for encoding in sorted(orientations):
            D, source, PS = orientations[encoding]
            goodness = is_good(D, budget=self.budget)
            verdict = self.orientation_verdict(D, source, PS, goodness)
            verdicts.append(verdict)
            violations.extend(self.violations(D, verdict, goodness))
        root = ' '.join(f"{e.id}:{e.u}-{e.v}" for e in H.edges)
        logger.info("[Sweep] root %s: %d orientation(s), %d violation(s)", root, len(verdicts), len(violations))
        return TheoremReport(
            root=root,
            tdi_c_bound=self.tdi_c_bound,
            orientations=verdicts,
            violations=violations,
        )


def verify_main_theorem(H: Multigraph, tdi_c_bound: Optional[int] = None,
                        verifier: Optional[TheoremVerifier] = None) -> TheoremReport:
    """
    Sweep the orientations of L(H) and report disagreements between goodness,
    kernel perfection, kernel idealness and bounded kernel Mengerian-ness.

    Args:
        H: Small root multigraph
        tdi_c_bound: Objective box for TDI checks; defaults to settings.tdi_c_bound
        verifier: Reuse a verifier (and its cache) across roots

    Returns:
        TheoremReport; `violations` is empty when the equivalences hold
    """
    verifier = verifier or TheoremVerifier(tdi_c_bound)
    return verifier.verify(H)


def _tdi_passes(sys, k: int, c_bound: int) -> bool:
    return check_tdi(sys, k, c_bound, stop_at_first=True).passed


def verify_half_tdi(PS: PreferenceSystem, c_bound: Optional[int] = None,
                    include_sigma: bool = True) -> CorollaryReport:
    """
    Half-integrality corollaries for one preference system.

    FSM(PS) is 1/2-integral and pi(PS) is TDI/2; pi(PS) is TDI exactly when
    FSM(PS) is integral. For simple bipartite roots FSM(PS) is integral. With
    include_sigma the same is checked for the kernel system of the derived
    orientation. A non-integral polytope with integral right-hand sides is
    never TDI, so the k=1 search only runs on integral polytopes.
    """
    bound = c_bound or settings.tdi_c_bound
    pi = build_pi(PS)
    vertices = enumerate_vertices(pi)
    half = all(point_is_integral(p, 2) for p in vertices)
    integral = all(point_is_integral(p) for p in vertices)
    pi_tdi = integral and _tdi_passes(pi, 1, bound)
    simple = PS.is_simple
    bipartite = nx.is_bipartite(nx.Graph(PS.graph.to_networkx()))
    report = {
        'simple': simple,
        'bipartite': bipartite,
        'fsm_half_integral': half,
        'fsm_integral': integral,
        'pi_tdi_half': _tdi_passes(pi, 2, bound),
        'pi_tdi': pi_tdi,
        'tdi_iff_integral': pi_tdi == integral,
        'rothblum_holds': integral if simple and bipartite else None,
        'c_bound': bound,
    }
    if include_sigma:
        sigma = build_sigma(orientation_from_prefs(PS))
        try:
            sigma_integral = check_integrality(sigma, 1).integral
        except Infeasible:
            # a root triangle with cyclic preferences empties the kernel system
            report.update(sigma_checked=True, sigma_empty=True, sigma_tdi_half=True, sigma_tdi_iff_integral=True)
        else:
            sigma_tdi = sigma_integral and _tdi_passes(sigma, 1, bound)
            report.update(
                sigma_checked=True,
                sigma_tdi_half=_tdi_passes(sigma, 2, bound),
                sigma_tdi_iff_integral=sigma_tdi == sigma_integral,
            )
    return CorollaryReport(**report)

