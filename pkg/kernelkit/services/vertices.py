"""
Exact vertex enumeration.

The default engine is the double description method on the homogenized cone
{(t, x) : t*b - A x >= 0, t >= 0}: extreme rays with t > 0 are the vertices,
rays with t = 0 span the recession cone. Rays are kept as primitive integer
vectors and adjacency uses the combinatorial zero-set test, so everything is
exact. A plain basis enumeration over n-subsets of rows is kept for
cross-checking small systems.
"""
import logging
from fractions import Fraction
from itertools import combinations
from math import comb, gcd, lcm
from typing import Mapping, Optional

from kernelkit.config import settings
from kernelkit.exceptions import Infeasible, InstanceTooLarge, InvalidInput, Unbounded
from kernelkit.models.linear import LinearSystem

logger = logging.getLogger(__name__)

METHODS = ('dd', 'basis')


class LinealityError(Exception):
    """The cone contains a line (the polyhedron is not pointed)."""


def primitive_int_vector(values) -> tuple:
    """Scale a rational vector to coprime integers, keeping its direction."""
    values = [Fraction(v) for v in values]
    scale = lcm(*(v.denominator for v in values)) if values else 1
    ints = [int(v * scale) for v in values]
    divisor = 0
    for value in ints:
        divisor = gcd(divisor, value)
    if divisor == 0:
        return tuple(ints)
    return tuple(value // divisor for value in ints)


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b) if x and y)


def independent_rows(rows: list, limit: int) -> list:
    """Indices of a greedy maximal linearly independent subset (at most `limit`)."""
    echelon = []  # (pivot column, normalized row)
    chosen = []
    for index, row in enumerate(rows):
        vector = [Fraction(v) for v in row]
        for pivot, base in echelon:
            if vector[pivot] != 0:
                factor = vector[pivot]
                vector = [a - factor * b for a, b in zip(vector, base)]
        pivot = next((j for j, v in enumerate(vector) if v != 0), None)
        if pivot is None:
            continue
        vector = [v / vector[pivot] for v in vector]
        echelon.append((pivot, vector))
        chosen.append(index)
        if len(chosen) == limit:
            break
    return chosen


def invert(matrix: list) -> list:
    """Exact inverse of a nonsingular square matrix (Gauss-Jordan)."""
    size = len(matrix)
    work = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(size)] for i, row in enumerate(matrix)]
    for col in range(size):
        pivot = next((r for r in range(col, size) if work[r][col] != 0), None)
        if pivot is None:
            raise InvalidInput("Matrix is singular")
        work[col], work[pivot] = work[pivot], work[col]
        factor = work[col][col]
        work[col] = [v / factor for v in work[col]]
        for r in range(size):
            if r != col and work[r][col] != 0:
                scale = work[r][col]
                work[r] = [a - scale * b for a, b in zip(work[r], work[col])]
    return [row[size:] for row in work]


def solve_square(matrix: list, rhs: list) -> Optional[list]:
    """Unique solution of a square system, or None when singular."""
    size = len(matrix)
    work = [[Fraction(v) for v in row] + [Fraction(b)] for row, b in zip(matrix, rhs)]
    for col in range(size):
        pivot = next((r for r in range(col, size) if work[r][col] != 0), None)
        if pivot is None:
            return None
        work[col], work[pivot] = work[pivot], work[col]
        factor = work[col][col]
        work[col] = [v / factor for v in work[col]]
        for r in range(size):
            if r != col and work[r][col] != 0:
                scale = work[r][col]
                work[r] = [a - scale * b for a, b in zip(work[r], work[col])]
    return [row[-1] for row in work]


def double_description(matrix: list, rhs: list, budget: Optional[int] = None) -> tuple:
    """
    Vertices and extreme rays of the pointed polyhedron {x : A x <= b}.

    Args:
        matrix: Rows of A (rationals)
        rhs: Entries of b
        budget: Max rays held at any step; defaults to settings.vertex_budget

    Returns:
        (vertices, rays): tuples of Fractions; rays are primitive integer
        directions. Both empty when the polyhedron is empty.

    Raises:
        LinealityError: If A does not have full column rank
        InstanceTooLarge: On budget excess
    """
    limit = settings.limit('vertex_budget', budget)
    n = len(matrix[0]) if matrix else 0
    dim = n + 1
    cone = [tuple([1] + [0] * n)]
    for row, b in zip(matrix, rhs):
        vector = primitive_int_vector([b] + [-a for a in row])
        if any(vector):
            cone.append(vector)

    basis_rows = independent_rows(cone, dim)
    if len(basis_rows) < dim:
        raise LinealityError()
    inverse = invert([cone[i] for i in basis_rows])
    rays = [primitive_int_vector([inverse[r][c] for r in range(dim)]) for c in range(dim)]

    processed = list(basis_rows)

    def zero_set(ray):
        mask = 0
        for i in processed:
            if _dot(cone[i], ray) == 0:
                mask |= 1 << i
        return mask

    zeros = [zero_set(ray) for ray in rays]
    pending = [i for i in range(len(cone)) if i not in set(basis_rows)]
    for i in pending:
        h = cone[i]
        scores = [_dot(h, ray) for ray in rays]
        plus = [k for k, s in enumerate(scores) if s > 0]
        minus = [k for k, s in enumerate(scores) if s < 0]
        bit = 1 << i
        next_rays, next_zeros = [], []
        for k, s in enumerate(scores):
            if s > 0:
                next_rays.append(rays[k])
                next_zeros.append(zeros[k])
            elif s == 0:
                next_rays.append(rays[k])
                next_zeros.append(zeros[k] | bit)
        for p in plus:
            for q in minus:
                common = zeros[p] & zeros[q]
                if common.bit_count() < dim - 2:
                    continue
                if any(t != p and t != q and zeros[t] & common == common for t in range(len(rays))):
                    continue
                combined = [scores[p] * b - scores[q] * a for a, b in zip(rays[p], rays[q])]
                next_rays.append(primitive_int_vector(combined))
                next_zeros.append(common | bit)
                if len(next_rays) > limit:
                    raise InstanceTooLarge("double description rays", limit)
        unique = {}
        for ray, mask in zip(next_rays, next_zeros):
            unique.setdefault(ray, mask)
        rays, zeros = list(unique), list(unique.values())
        processed.append(i)
        if not rays:
            return [], []

    vertices = sorted({tuple(Fraction(v, ray[0]) for v in ray[1:]) for ray in rays if ray[0] > 0})
    directions = sorted({ray[1:] for ray in rays if ray[0] == 0})
    logger.debug("[DD] %d vertices, %d rays in dimension %d", len(vertices), len(directions), n)
    return vertices, directions


def _basis_enumeration(matrix: list, rhs: list, budget: int) -> list:
    m = len(matrix)
    n = len(matrix[0]) if matrix else 0
    if comb(m, n) > budget:
        raise InstanceTooLarge(f"basis enumeration over C({m},{n}) row subsets", budget)
    found = set()
    for subset in combinations(range(m), n):
        point = solve_square([matrix[i] for i in subset], [rhs[i] for i in subset])
        if point is None:
            continue
        if all(_dot(row, point) <= b for row, b in zip(matrix, rhs)):
            found.add(tuple(point))
    return sorted(found)


def _classify_empty_or_unbounded(sys: LinearSystem):
    from kernelkit.services.lp import solve_lp_exact
    if solve_lp_exact(sys, {}, 'max').status == 'infeasible':
        return Infeasible("The system has no solution")
    return Unbounded("The polyhedron is unbounded")


def enumerate_vertices(sys: LinearSystem, method: str = 'dd', budget: Optional[int] = None) -> list:
    """
    All vertices of a bounded, feasible system, sorted.

    Args:
        sys: Linear system
        method: 'dd' (double description) or 'basis' (n-subsets of rows)
        budget: Ray / subset budget; defaults to settings.vertex_budget

    Returns:
        Fractional points (variable -> Fraction), sorted by coordinate tuple

    Raises:
        Unbounded: If the polyhedron is unbounded
        Infeasible: If it is empty
        InstanceTooLarge: On budget excess
    """
    if method not in METHODS:
        raise InvalidInput(f"method must be one of {METHODS}, got {method!r}")
    limit = settings.limit('vertex_budget', budget)
    matrix, rhs = sys.dense_le()
    n = len(sys.variables)
    if n == 0:
        if any(b < 0 for b in rhs):
            raise Infeasible("The system has no solution")
        return [{}]
    if method == 'basis':
        points = _basis_enumeration(matrix, rhs, limit)
        if not points:
            raise _classify_empty_or_unbounded(sys)
        _assert_bounded(sys)
        return [sys.to_point(p) for p in points]
    try:
        points, directions = double_description(matrix, rhs, limit)
    except LinealityError:
        raise _classify_empty_or_unbounded(sys) from None
    if not points:
        raise Infeasible("The system has no solution")
    if directions:
        raise Unbounded(f"The polyhedron has {len(directions)} extreme ray(s)")
    return [sys.to_point(p) for p in points]


def _assert_bounded(sys: LinearSystem) -> None:
    from kernelkit.services.lp import solve_lp_exact
    for v in sys.variables:
        for sense in ('max', 'min'):
            if solve_lp_exact(sys, {v: 1}, sense).status == 'unbounded':
                raise Unbounded(f"{v} is unbounded ({sense})")


def is_vertex(sys: LinearSystem, point: Mapping) -> bool:
    """True when the point satisfies sys and its tight rows have full rank."""
    if sys.violated(point):
        return False
    tight = set(sys.tight(point))
    matrix, _ = sys.dense_le()
    rows = [coeffs for coeffs, row in zip(matrix, sys.rows) if row.label in tight]
    return len(independent_rows(rows, len(sys.variables))) == len(sys.variables)
