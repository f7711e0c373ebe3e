"""
Exact-rational linear systems, fractional points and LP results.

Rows are stored with their own relation; `as_le()` gives the <=-form used by
the solvers. A fractional point is a plain dict from variable id to Fraction;
missing keys read as 0.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd, lcm
from typing import Dict, Mapping, Optional

from kernelkit.exceptions import InvalidInput, UnknownVariable

FractionalPoint = Dict[str, Fraction]

RELATIONS = ('>=', '<=')


def as_fraction(value) -> Fraction:
    """Exact conversion; floats are refused."""
    if isinstance(value, float):
        raise InvalidInput(f"Floating point value {value!r} is not allowed; use 'p/q'")
    try:
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise InvalidInput(f"Not a rational number: {value!r}") from None


def format_fraction(value: Fraction) -> str:
    """'3', '-1', '1/2'."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def is_multiple_of(value: Fraction, k: int) -> bool:
    """True when value lies in (1/k)Z."""
    return (Fraction(value) * k).denominator == 1


def point_is_integral(point: Mapping, k: int = 1) -> bool:
    return all(is_multiple_of(v, k) for v in point.values())


@dataclass(frozen=True)
class Row:
    """One constraint: sum(coeffs[v] * x[v]) rel rhs."""
    label: str
    coeffs: Mapping
    rel: str
    rhs: Fraction
    family: str = ''

    def __post_init__(self):
        if self.rel not in RELATIONS:
            raise InvalidInput(f"Row {self.label}: relation must be '>=' or '<=', got {self.rel!r}")
        clean = {v: as_fraction(c) for v, c in self.coeffs.items()}
        object.__setattr__(self, 'coeffs', {v: c for v, c in clean.items() if c != 0})
        object.__setattr__(self, 'rhs', as_fraction(self.rhs))

    def __hash__(self) -> int:
        return hash((self.label, tuple(sorted(self.coeffs.items())), self.rel, self.rhs))

    def value(self, point: Mapping) -> Fraction:
        return sum((c * point.get(v, 0) for v, c in self.coeffs.items()), Fraction(0))

    def slack(self, point: Mapping) -> Fraction:
        """Nonnegative exactly when the row holds."""
        lhs = self.value(point)
        return lhs - self.rhs if self.rel == '>=' else self.rhs - lhs

    def satisfied(self, point: Mapping) -> bool:
        return self.slack(point) >= 0

    def is_tight(self, point: Mapping) -> bool:
        return self.slack(point) == 0

    def as_le(self) -> tuple:
        """(coeffs, rhs) with the row written as a.x <= b."""
        if self.rel == '<=':
            return dict(self.coeffs), self.rhs
        return {v: -c for v, c in self.coeffs.items()}, -self.rhs

    def renamed(self, mapping: Mapping) -> 'Row':
        coeffs = {}
        for v, c in self.coeffs.items():
            key = mapping.get(v, v)
            coeffs[key] = coeffs.get(key, Fraction(0)) + c
        return Row(self.label, coeffs, self.rel, self.rhs, self.family)

    def describe(self) -> str:
        terms = []
        for v, c in sorted(self.coeffs.items()):
            if c == 1:
                terms.append(f"+ {v}")
            elif c == -1:
                terms.append(f"- {v}")
            elif c > 0:
                terms.append(f"+ {format_fraction(c)}*{v}")
            else:
                terms.append(f"- {format_fraction(-c)}*{v}")
        lhs = ' '.join(terms).lstrip('+ ') or '0'
        return f"{lhs} {self.rel} {format_fraction(self.rhs)}"


def primitive_le(coeffs: Mapping, rhs: Fraction) -> tuple:
    """
    Scale a <=-form row to primitive integer coefficients.

    Returns:
        (coeffs with int values and gcd 1, Fraction rhs); a row with no
        variables comes back unscaled.
    """
    if not coeffs:
        return {}, Fraction(rhs)
    denominators = lcm(*(Fraction(c).denominator for c in coeffs.values()))
    scaled = {v: int(Fraction(c) * denominators) for v, c in coeffs.items()}
    divisor = 0
    for c in scaled.values():
        divisor = gcd(divisor, c)
    return {v: c // divisor for v, c in scaled.items()}, Fraction(rhs) * denominators / divisor


@dataclass(frozen=True, eq=False)
class LinearSystem:
    """Ordered variables and labeled rows."""
    variables: tuple
    rows: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, 'variables', tuple(self.variables))
        object.__setattr__(self, 'rows', tuple(self.rows))
        if len(set(self.variables)) != len(self.variables):
            raise InvalidInput("Duplicate variable names")
        declared = set(self.variables)
        labels = set()
        for row in self.rows:
            if row.label in labels:
                raise InvalidInput(f"Duplicate row label: {row.label}")
            labels.add(row.label)
            for v in row.coeffs:
                if v not in declared:
                    raise UnknownVariable(v)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinearSystem):
            return NotImplemented
        return self.variables == other.variables and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.variables, self.rows))

    def __len__(self) -> int:
        return len(self.rows)

    @cached_property
    def row_index(self) -> dict:
        return {row.label: row for row in self.rows}

    def row(self, label: str) -> Row:
        return self.row_index[label]

    def violated(self, point: Mapping) -> list:
        """Labels of rows the point violates, in row order."""
        return [row.label for row in self.rows if not row.satisfied(point)]

    def tight(self, point: Mapping) -> list:
        return [row.label for row in self.rows if row.is_tight(point)]

    def dense_le(self) -> tuple:
        """(A, b) with every row as a.x <= b, columns in variable order."""
        matrix, rhs = [], []
        for row in self.rows:
            coeffs, bound = row.as_le()
            matrix.append([coeffs.get(v, Fraction(0)) for v in self.variables])
            rhs.append(bound)
        return matrix, rhs

    def to_point(self, values) -> FractionalPoint:
        return {v: Fraction(x) for v, x in zip(self.variables, values)}

    def as_vector(self, point: Mapping) -> tuple:
        return tuple(Fraction(point.get(v, 0)) for v in self.variables)

    def renamed(self, mapping: Mapping) -> 'LinearSystem':
        """Rename variables; variables mapped onto the same name are merged."""
        variables = []
        for v in self.variables:
            name = mapping.get(v, v)
            if name not in variables:
                variables.append(name)
        return LinearSystem(tuple(variables), tuple(row.renamed(mapping) for row in self.rows))


@dataclass
class LPResult:
    """
    Outcome of an exact LP solve.

    On `optimal`, `dual[label]` is the multiplier of that row written in
    <=-form for a max problem (>=-form for a min problem); together with
    `primal` it certifies optimality by strong duality.
    """
    status: str
    sense: str = 'max'
    value: Optional[Fraction] = None
    primal: FractionalPoint = field(default_factory=dict)
    dual: Dict[str, Fraction] = field(default_factory=dict)

    @property
    def is_optimal(self) -> bool:
        return self.status == 'optimal'
