"""
Shared test data: literal instances and expected values.

Values are exact rationals; strings use the "p/q" form of the JSON output.
"""
from fractions import Fraction

HALF = Fraction(1, 2)

# =============================================================================
# Fractional kernel polytope of the superoriented 4-cycle (fixtures/sec5.dg)
# =============================================================================

SEC5_VERTICES = [
    {'1': Fraction(0), '2': Fraction(1), '3': Fraction(1), '4': Fraction(0)},
    {'1': HALF, '2': HALF, '3': Fraction(0), '4': HALF},
    {'1': Fraction(1), '2': Fraction(0), '3': Fraction(0), '4': Fraction(1)},
]

SEC5_VERTICES_JSON = [
    {'1': '0', '2': '1', '3': '1', '4': '0'},
    {'1': '1/2', '2': '1/2', '3': '0', '4': '1/2'},
    {'1': '1', '2': '0', '3': '0', '4': '1'},
]

SEC5_KERNELS = [['1', '4'], ['2', '3']]

# =============================================================================
# Small instances written inline
# =============================================================================

TRIANGLE_ROOT = """\
v p
v q
v r
e pq p q
e qr q r
e rp r p
"""

PATH_PREFS = """\
# path x - y - z
v x
v y
v z
e a x y
e b y z
p x : a
p y : a b
p z : b
"""

BIDIRECTED_TRIANGLE = """\
v a
v b
v c
a ab a b
a ba b a
a bc b c
a cb c b
a ca c a
a ac a c
"""

SINGLE_VERTEX = "v s\n"

BOX_SYSTEM = {
    'variables': ['x', 'y'],
    'rows': [
        {'label': 'cap', 'coeffs': {'x': '1', 'y': '1'}, 'rel': '<=', 'rhs': '1'},
        {'label': 'nnx', 'coeffs': {'x': '1'}, 'rel': '>=', 'rhs': '0'},
        {'label': 'nny', 'coeffs': {'y': '1'}, 'rel': '>=', 'rhs': '0'},
    ],
}

# =============================================================================
# Gadget lift values for the parallel pair (gadget of e1, u = u, v = v)
# =============================================================================

PARPAIR_HALF = {'e1': HALF, 'e2': HALF}
PARPAIR_E1 = {'e1': Fraction(1), 'e2': Fraction(0)}
PARPAIR_E2 = {'e1': Fraction(0), 'e2': Fraction(1)}

LIFT_E1_HALF = {
    'u-u0': HALF, 'v-v0': HALF,
    'u0-u1': HALF, 'v0-v2': HALF,
    'u0-u2': Fraction(0), 'v0-v1': Fraction(0),
    'u1-v2': HALF, 'u2-v1': Fraction(1),
}
LIFT_E1_ONE = {
    'u-u0': Fraction(1), 'v-v0': Fraction(1),
    'u0-u1': Fraction(0), 'v0-v2': Fraction(0),
    'u0-u2': Fraction(0), 'v0-v1': Fraction(0),
    'u1-v2': Fraction(1), 'u2-v1': Fraction(1),
}
LIFT_E1_ZERO = {
    'u-u0': Fraction(0), 'v-v0': Fraction(0),
    'u0-u1': Fraction(1), 'v0-v2': Fraction(1),
    'u0-u2': Fraction(0), 'v0-v1': Fraction(0),
    'u1-v2': Fraction(0), 'u2-v1': Fraction(1),
}
