"""
Exact rational LP solver.

Two-phase tableau simplex over fractions.Fraction with Bland's rule, so it
never cycles. Free variables are split as x = p - q, every row gets a slack,
and rows with negative right-hand side get an artificial column for phase 1.
The dual solution is read off the slack reduced costs and re-verified.
"""
import logging
from fractions import Fraction
from typing import Mapping, Optional

from kernelkit.exceptions import CertificateError, InvalidInput, UnknownVariable
from kernelkit.models.linear import LinearSystem, LPResult, as_fraction

logger = logging.getLogger(__name__)

ZERO = Fraction(0)
SENSES = ('max', 'min')


class SimplexTableau:
    """
    Dense tableau for max{cost . w : T w = rhs, w >= 0}.

    `rows[i]` holds the coefficients followed by the right-hand side;
    `basis[i]` is the column basic in row i.
    """

    def __init__(self, rows: list, basis: list):
        self.rows = rows
        self.basis = basis
        self.width = len(rows[0]) - 1 if rows else 0
        self.pivots = 0

    def pivot(self, r: int, j: int) -> None:
        pivot_row = self.rows[r]
        factor = pivot_row[j]
        if factor != 1:
            self.rows[r] = pivot_row = [value / factor for value in pivot_row]
        for i, row in enumerate(self.rows):
            if i != r and row[j] != 0:
                scale = row[j]
                self.rows[i] = [a - scale * b for a, b in zip(row, pivot_row)]
        self.basis[r] = j
        self.pivots += 1

    def reduced_costs(self, cost: list) -> list:
        basic_cost = [cost[b] for b in self.basis]
        reduced = list(cost)
        for c_b, row in zip(basic_cost, self.rows):
            if c_b != 0:
                for j in range(self.width):
                    if row[j] != 0:
                        reduced[j] -= c_b * row[j]
        return reduced

    def objective(self, cost: list) -> Fraction:
        return sum((cost[b] * row[-1] for b, row in zip(self.basis, self.rows)), ZERO)

    def maximize(self, cost: list, allowed: set) -> Optional[int]:
        """
        Run Bland's rule to optimality.

        Returns:
            None at optimum, or the entering column that proved unboundedness
        """
        while True:
            reduced = self.reduced_costs(cost)
            entering = next((j for j in range(self.width) if j in allowed and reduced[j] > 0), None)
            if entering is None:
                return None
            leaving, best = None, None
            for i, row in enumerate(self.rows):
                if row[entering] > 0:
                    ratio = row[-1] / row[entering]
                    if best is None or ratio < best or (ratio == best and self.basis[i] < self.basis[leaving]):
                        leaving, best = i, ratio
            if leaving is None:
                return entering
            self.pivot(leaving, entering)

    def values(self) -> list:
        w = [ZERO] * self.width
        for b, row in zip(self.basis, self.rows):
            w[b] = row[-1]
        return w


def solve_lp_exact(sys: LinearSystem, objective: Mapping, sense: str = 'max') -> LPResult:
    """
    Optimize a linear objective over sys with exact arithmetic.

    Args:
        sys: Linear system (variables are free unless rows bound them)
        objective: Variable -> coefficient; missing variables have coefficient 0
        sense: 'max' or 'min'

    Returns:
        LPResult; on `optimal` the primal point and dual multipliers are
        re-verified before returning

    Raises:
        InvalidInput: On an unknown sense
        UnknownVariable: If the objective names an undeclared variable
        CertificateError: If the computed certificates fail verification
    """
    if sense not in SENSES:
        raise InvalidInput(f"sense must be 'max' or 'min', got {sense!r}")
    for v in objective:
        if v not in sys.variables:
            raise UnknownVariable(v)

    n = len(sys.variables)
    matrix, rhs = sys.dense_le()
    m = len(matrix)
    c = [as_fraction(objective.get(v, 0)) for v in sys.variables]
    if sense == 'min':
        c = [-value for value in c]

    if m == 0:
        if any(value != 0 for value in c):
            return LPResult(status='unbounded', sense=sense)
        return LPResult(status='optimal', sense=sense, value=ZERO, primal={v: ZERO for v in sys.variables})

    # columns: p (n), q (n), slacks (m), artificials (one per negative rhs)
    negative = [i for i in range(m) if rhs[i] < 0]
    art_col = {i: 2 * n + m + k for k, i in enumerate(negative)}
    width = 2 * n + m + len(negative)
    rows, basis = [], []
    for i in range(m):
        sign = -1 if rhs[i] < 0 else 1
        row = [ZERO] * (width + 1)
        for j, a in enumerate(matrix[i]):
            row[j] = sign * a
            row[n + j] = -sign * a
        row[2 * n + i] = Fraction(sign)
        row[-1] = sign * rhs[i]
        if sign < 0:
            row[art_col[i]] = Fraction(1)
            basis.append(art_col[i])
        else:
            basis.append(2 * n + i)
        rows.append(row)
    tableau = SimplexTableau(rows, basis)
    artificial = set(art_col.values())

    if artificial:
        phase_one = [Fraction(-1) if j in artificial else ZERO for j in range(width)]
        tableau.maximize(phase_one, set(range(width)))
        if tableau.objective(phase_one) < 0:
            logger.debug("[LP] infeasible after %d pivots", tableau.pivots)
            return LPResult(status='infeasible', sense=sense)
        for i in range(m):
            if tableau.basis[i] in artificial:
                j = next((j for j in range(width) if j not in artificial and tableau.rows[i][j] != 0), None)
                if j is None:
                    raise CertificateError("Slack columns make every row independent; phase 1 left a redundant row")
                tableau.pivot(i, j)

    cost = c + [-value for value in c] + [ZERO] * (m + len(negative))
    allowed = set(range(2 * n + m))
    if tableau.maximize(cost, allowed) is not None:
        logger.debug("[LP] unbounded after %d pivots", tableau.pivots)
        return LPResult(status='unbounded', sense=sense)

    w = tableau.values()
    primal = {v: w[j] - w[n + j] for j, v in enumerate(sys.variables)}
    reduced = tableau.reduced_costs(cost)
    dual = {row.label: -reduced[2 * n + i] for i, row in enumerate(sys.rows)}
    value = tableau.objective(cost)
    if sense == 'min':
        value = -value
    result = LPResult(status='optimal', sense=sense, value=value, primal=primal, dual=dual)
    verify_lp_certificate(sys, objective, result)
    logger.debug("[LP] optimal value %s after %d pivots", value, tableau.pivots)
    return result


def verify_lp_certificate(sys: LinearSystem, objective: Mapping, result: LPResult) -> None:
    """
    Re-check primal feasibility, dual feasibility and equal objective values.

    Raises:
        CertificateError: If any check fails
    """
    if not result.is_optimal:
        return
    violated = sys.violated(result.primal)
    if violated:
        raise CertificateError(f"Primal solution violates {violated[:3]}")
    flip = -1 if result.sense == 'min' else 1
    c = {v: as_fraction(objective.get(v, 0)) for v in sys.variables}
    combined = {v: ZERO for v in sys.variables}
    bound = ZERO
    for row in sys.rows:
        y = result.dual.get(row.label, ZERO)
        if y < 0:
            raise CertificateError(f"Negative dual multiplier on {row.label}")
        if y == 0:
            continue
        coeffs, rhs = row.as_le()
        for v, a in coeffs.items():
            combined[v] += flip * y * a
        bound += flip * y * rhs
    if combined != c:
        raise CertificateError("Dual multipliers do not reproduce the objective")
    primal_value = sum((c[v] * result.primal.get(v, ZERO) for v in sys.variables), ZERO)
    if not (primal_value == bound == result.value):
        raise CertificateError(f"Objective values differ: primal {primal_value}, dual {bound}")
