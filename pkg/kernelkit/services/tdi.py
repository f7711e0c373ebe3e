"""
Bounded total dual 1/k-integrality checks.

For each integral objective c in the box [-B, B]^n the optimum is read off
the enumerated vertices. Every dual optimum is supported on the rows tight on
the whole optimal face T, so the dual optimal face is {y >= 0 on T :
A_T^T y = c}, and a 1/k-integral dual optimum exists iff the integer system
A_T^T w = k*c, w >= 0 is solvable. That system is decided by a bounded
depth-first search: first with a small bound, then with an exact bound taken
from the vertices and extreme rays of the dual face. A failure is therefore
always a genuine refutation.
"""
import logging
from fractions import Fraction
from itertools import product
from math import floor, lcm
from typing import Optional

from kernelkit.config import settings
from kernelkit.exceptions import CertificateError, InstanceTooLarge, InvalidInput
from kernelkit.models.linear import LinearSystem, format_fraction, is_multiple_of
from kernelkit.models.reports import TdiFailure, TdiReport
from kernelkit.services.vertices import LinealityError, double_description, enumerate_vertices

logger = logging.getLogger(__name__)

QUICK_NODE_LIMIT = 5000


class _SearchBudgetExceeded(Exception):
    pass


def _integer_point(matrix: list, target: list, bounds: list, node_limit: int) -> Optional[list]:
    """
    Find integers 0 <= w[t] <= bounds[t] with matrix . w = target.

    Args:
        matrix: Integer rows (one per equation)
        target: Integer right-hand side
        bounds: Upper bound per column
        node_limit: Max search nodes

    Returns:
        A solution, or None if none exists within the bounds

    Raises:
        _SearchBudgetExceeded: If the node limit is hit first
    """
    rows, cols = len(matrix), len(bounds)
    # suffix interval sums: reach[t][j] = (min, max) contribution of columns t.. to row j
    reach = [[(0, 0)] * rows for _ in range(cols + 1)]
    for t in range(cols - 1, -1, -1):
        reach[t] = [
            (lo + min(0, matrix[j][t] * bounds[t]), hi + max(0, matrix[j][t] * bounds[t]))
            for j, (lo, hi) in enumerate(reach[t + 1])
        ]
    last_nonzero = [max((t for t in range(cols) if matrix[j][t]), default=-1) for j in range(rows)]
    nodes = 0
    w = [0] * cols

    def search(t: int, residual: list) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > node_limit:
            raise _SearchBudgetExceeded()
        for j in range(rows):
            lo, hi = reach[t][j]
            if not lo <= residual[j] <= hi:
                return False
        if t == cols:
            return True
        forced = None
        for j in range(rows):
            if last_nonzero[j] == t:
                a = matrix[j][t]
                if residual[j] % a:
                    return False
                value = residual[j] // a
                if forced is not None and forced != value:
                    return False
                forced = value
        candidates = [forced] if forced is not None else range(bounds[t] + 1)
        column = [matrix[j][t] for j in range(rows)]
        for value in candidates:
            if value < 0 or value > bounds[t]:
                continue
            w[t] = value
            if search(t + 1, [r - a * value for r, a in zip(residual, column)]):
                return True
        w[t] = 0
        return False

    if search(0, list(target)):
        return list(w)
    return None


class TdiChecker:
    """
    Decides, objective by objective, whether a dual optimum is 1/k-integral.

    Usage:
        checker = TdiChecker(system, k=1)
        failure = checker.check_objective((0, 1, -1, 0))
    """

    def __init__(self, sys: LinearSystem, k: int, node_budget: Optional[int] = None):
        if k < 1:
            raise InvalidInput("k must be a positive integer")
        self.sys = sys
        self.k = k
        self.node_budget = settings.limit('tdi_node_budget', node_budget)
        self.matrix, self.rhs = sys.dense_le()
        self.integral_rhs = all(b.denominator == 1 for b in self.rhs)
        self.vertices = [sys.as_vector(p) for p in enumerate_vertices(sys)]
        self.tight = [
            frozenset(i for i, (row, b) in enumerate(zip(self.matrix, self.rhs))
                      if sum(a * x for a, x in zip(row, v)) == b)
            for v in self.vertices
        ]
        self._columns = {}

    def _equations(self, support: frozenset) -> tuple:
        """Integer equations A_T^T w = k c, one per variable (scaled per row)."""
        cached = self._columns.get(support)
        if cached is None:
            order = sorted(support)
            n = len(self.sys.variables)
            raw = [[self.matrix[i][j] for i in order] for j in range(n)]
            scales = [lcm(*(a.denominator for a in row)) if row else 1 for row in raw]
            equations = [[int(a * s) for a in row] for row, s in zip(raw, scales)]
            cached = (order, equations, scales)
            self._columns[support] = cached
        return cached

    def check_objective(self, c: tuple) -> Optional[TdiFailure]:
        """
        Check one integral objective.

        Returns:
            None when a 1/k-integral dual optimum exists, else the failure
        """
        values = [sum(ci * x for ci, x in zip(c, v)) for v in self.vertices]
        optimum = max(values)
        support = frozenset.intersection(*(self.tight[i] for i, val in enumerate(values) if val == optimum))
        objective = dict(zip(self.sys.variables, c))
        if self.integral_rhs and not is_multiple_of(optimum, self.k):
            return TdiFailure(objective=objective, optimum=format_fraction(optimum),
                              reason=f"optimum is not 1/{self.k}-integral")

        order, equations, scales = self._equations(support)
        target = [self.k * ci * s for ci, s in zip(c, scales)]
        quick = [self.k * max(1, max(abs(ci) for ci in c))] * len(order)
        try:
            if _integer_point(equations, target, quick, QUICK_NODE_LIMIT) is not None:
                return None
        except _SearchBudgetExceeded:
            pass

        bounds = self._exact_bounds(equations, target, len(order))
        if bounds is None:
            return None
        try:
            found = _integer_point(equations, target, bounds, self.node_budget)
        except _SearchBudgetExceeded:
            raise InstanceTooLarge("dual-face integer search", self.node_budget) from None
        if found is not None:
            return None
        return TdiFailure(objective=objective, optimum=format_fraction(optimum),
                          reason=f"no 1/{self.k}-integral point on the dual optimal face")

    def _exact_bounds(self, equations: list, target: list, width: int) -> Optional[list]:
        """
        Coordinate bounds containing an integral point of the dual face if one exists.

        Every integral w = q + sum(mu_r r) can be shifted by integer multiples
        of the primitive rays r to a point below max(vertices) + sum(rays).

        Returns:
            Bounds, or None if a dual-face vertex is already integral
        """
        matrix, rhs = [], []
        for row, g in zip(equations, target):
            matrix.append([Fraction(a) for a in row])
            rhs.append(Fraction(g))
            matrix.append([Fraction(-a) for a in row])
            rhs.append(Fraction(-g))
        for t in range(width):
            matrix.append([Fraction(-int(s == t)) for s in range(width)])
            rhs.append(Fraction(0))
        try:
            points, rays = double_description(matrix, rhs)
        except LinealityError:
            raise CertificateError("Dual face with nonnegativity rows cannot contain a line") from None
        if not points:
            raise CertificateError("LP duality guarantees a dual optimum; the dual face is empty")
        if any(all(x.denominator == 1 for x in p) for p in points):
            return None
        return [
            floor(max(p[t] for p in points) + sum(r[t] for r in rays))
            for t in range(width)
        ]


def check_tdi(
    sys: LinearSystem,
    k: int,
    c_bound: int,
    stop_at_first: bool = False,
    node_budget: Optional[int] = None,
) -> TdiReport:
    """
    Bounded TDI/k check over every integral objective in [-c_bound, c_bound]^n.

    Args:
        sys: Bounded, feasible system
        k: Denominator of the dual integrality target
        c_bound: Box half-width
        stop_at_first: Return after the first failing objective
        node_budget: Per-objective search budget

    Returns:
        TdiReport; passed means no violation inside the box

    Raises:
        InstanceTooLarge: If a dual-face search exceeds its budget
        Unbounded, Infeasible: As enumerate_vertices
    """
    if c_bound < 1:
        raise InvalidInput("c_bound must be a positive integer")
    checker = TdiChecker(sys, k, node_budget)
    failures, checked = [], 0
    n = len(sys.variables)
    for c in product(range(-c_bound, c_bound + 1), repeat=n):
        checked += 1
        failure = checker.check_objective(c)
        if failure is not None:
            failures.append(failure)
            if stop_at_first:
                break
    logger.info("[TDI] k=%d box=%d: %d objective(s), %d failure(s)", k, c_bound, checked, len(failures))
    return TdiReport(k=k, c_bound=c_bound, objectives_checked=checked, passed=not failures, failures=failures)


def find_tdi_refutation(sys: LinearSystem, k: int, ceiling: Optional[int] = None) -> Optional[TdiFailure]:
    """Grow the box from 1 to `ceiling` (settings.tdi_ceiling) until an objective fails."""
    top = ceiling or settings.tdi_ceiling
    for bound in range(1, top + 1):
        report = check_tdi(sys, k, bound, stop_at_first=True)
        if report.failures:
            return report.failures[0]
    return None


def check_tdi_objective(sys: LinearSystem, k: int, objective: dict) -> Optional[TdiFailure]:
    """Re-check a single objective (used to validate refutation certificates)."""
    c = tuple(int(objective.get(v, 0)) for v in sys.variables)
    return TdiChecker(sys, k).check_objective(c)
