"""
Tests for the parallel-edge gadget: expansion, lift, projection and the
internal order search.
"""
from fractions import Fraction

import pytest

from kernelkit.exceptions import InvalidInput, InvalidTable, NotInFSM, ProjectionMismatch, UnknownEdge
from kernelkit.services.bridge import find_cyclic_preference_cycles
from kernelkit.services.gadget import (
    ELIMINATION_ORDER,
    ROLES,
    InternalOrderTable,
    candidate_tables,
    check_projection,
    derive_internal_orders,
    eliminate_gadgets,
    elimination_steps,
    expand,
    lift_point,
    project_point,
)
from kernelkit.services.polyhedra import build_pi, fm_eliminate, systems_match
from kernelkit.services.stable import fsm_check
from tests.fixtures.test_data import (
    LIFT_E1_HALF,
    LIFT_E1_ONE,
    LIFT_E1_ZERO,
    PARPAIR_E1,
    PARPAIR_E2,
    PARPAIR_HALF,
)


def gadget_slice(point, edge):
    return {role: point[f"{edge}:{role}"] for role in ROLES}


@pytest.mark.unit
class TestInternalOrderTable:
    """Test table validation and the candidate space."""

    def test_candidates(self):
        """Test that there are 576 distinct candidate tables."""
        tables = candidate_tables()

        assert len(tables) == 576
        assert len({table.key() for table in tables}) == 576

    def test_missing_vertex(self, gadget_table):
        orders = dict(gadget_table.orders)
        del orders['u1']

        with pytest.raises(InvalidTable, match='internal vertices'):
            InternalOrderTable(orders)

    def test_wrong_edges(self, gadget_table):
        """Test that an order must list exactly the incident roles."""
        orders = {**gadget_table.orders, 'u1': ('u1-v2', 'u0-u2')}

        with pytest.raises(InvalidTable, match='u1'):
            InternalOrderTable(orders)

    def test_text_form(self, gadget_table, fixture_text):
        """Test that the shipped file is read back unchanged."""
        assert InternalOrderTable.from_text(gadget_table.to_text()) == gadget_table
        assert InternalOrderTable.from_text(fixture_text('gadget_table.pref')) == gadget_table

    def test_unreadable_text(self):
        with pytest.raises(InvalidTable):
            InternalOrderTable.from_text("p u0 : nonsense\n")


@pytest.mark.unit
class TestExpand:
    """Test gadget expansion."""

    def test_parallel_pair(self, parpair, gadget_table):
        """Test that both parallel edges get gadgets and hanging edges take their places."""
        exp = expand(parpair, gadget_table)
        H = exp.expanded.graph

        assert exp.replaced == ('e1', 'e2')
        assert exp.expanded.is_simple
        assert len(H.vertices) == 2 + 12
        assert len(H.edges) == 16
        assert exp.expanded.orders['u'] == ('e1:u-u0', 'e2:u-u0')
        assert exp.expanded.orders['v'] == ('e2:v-v0', 'e1:v-v0')

    def test_internal_orders(self, parpair, gadget_table):
        """Test that internal vertices follow the table."""
        exp = expand(parpair, gadget_table)

        assert exp.expanded.orders['e1:u0'] == tuple(f"e1:{role}" for role in gadget_table.orders['u0'])

    def test_simple_system_untouched(self, k13_prefs, gadget_table):
        """Test that a simple root needs no gadget."""
        exp = expand(k13_prefs, gadget_table)

        assert exp.replaced == ()
        assert exp.expanded == k13_prefs

    def test_only(self, parpair, gadget_table):
        """Test restricting replacement to one edge."""
        assert expand(parpair, gadget_table, only=['e1']).replaced == ('e1',)

        with pytest.raises(UnknownEdge):
            expand(parpair, gadget_table, only=['zz'])

    def test_partial_class(self, partri, gadget_table):
        """Test that only the doubled side is replaced."""
        exp = expand(partri, gadget_table)

        assert exp.replaced == ('e1', 'e2')
        assert exp.expanded.is_simple

    def test_origin(self, parpair, gadget_table):
        exp = expand(parpair, gadget_table)

        assert exp.origin('e1:u1-v2') == 'e1'
        assert exp.origin('e2:v-v0') == 'e2'
        with pytest.raises(UnknownEdge):
            exp.origin('zz')

    def test_elimination_order(self, parpair, gadget_table):
        """Test that the v-v0 edge is the one left over."""
        exp = expand(parpair, gadget_table)

        assert exp.elimination_order()[:7] == [f"e1:{role}" for role in ELIMINATION_ORDER]
        assert exp.elimination_order('e2') == [f"e2:{role}" for role in ELIMINATION_ORDER]
        assert exp.projection_renaming() == {'e1:v-v0': 'e1', 'e2:v-v0': 'e2'}

    def test_not_a_table(self, parpair):
        with pytest.raises(InvalidTable):
            expand(parpair, {'u0': ()})


@pytest.mark.unit
class TestLiftAndProject:
    """Test lift_point and project_point."""

    @pytest.mark.parametrize('point, expected', [
        (PARPAIR_HALF, LIFT_E1_HALF),
        (PARPAIR_E1, LIFT_E1_ONE),
        (PARPAIR_E2, LIFT_E1_ZERO),
    ])
    def test_lift_values(self, parpair, gadget_table, point, expected):
        """Test the gadget values of e1 and that the lift stays in FSM."""
        exp = expand(parpair, gadget_table)
        lifted = lift_point(point, exp)

        assert gadget_slice(lifted, 'e1') == expected
        assert fsm_check(exp.expanded, lifted)[0]

    def test_round_trip(self, parpair, gadget_table):
        """Test that projection undoes the lift."""
        exp = expand(parpair, gadget_table)

        assert project_point(lift_point(PARPAIR_HALF, exp), exp) == PARPAIR_HALF

    def test_partial_class_lift(self, partri, gadget_table):
        """Test lifting the half-integral point of the triangle with a doubled side."""
        exp = expand(partri, gadget_table)
        half = Fraction(1, 2)
        x = {'e1': half, 'e2': Fraction(0), 'f': half, 'g': half}

        assert fsm_check(partri, x)[0]
        assert project_point(lift_point(x, exp), exp) == x

    def test_lift_outside_fsm(self, parpair, gadget_table):
        with pytest.raises(NotInFSM):
            lift_point({}, expand(parpair, gadget_table))

    def test_hanging_edges_disagree(self, parpair, gadget_table):
        """Test that unequal hanging edges are reported before FSM membership."""
        exp = expand(parpair, gadget_table)
        lifted = lift_point(PARPAIR_HALF, exp)
        lifted['e1:u-u0'] = Fraction(0)

        with pytest.raises(ProjectionMismatch) as excinfo:
            project_point(lifted, exp)

        assert excinfo.value.details['edge'] == 'e1'

    def test_odd_cycle_survives_expansion(self, partri, gadget_table):
        """Test that the odd cycle through e1 becomes one odd cycle through its gadget."""
        cycles = find_cyclic_preference_cycles(expand(partri, gadget_table).expanded, 'odd')

        assert len(cycles) == 1
        assert len(cycles[0]) == 7


@pytest.mark.slow
class TestElimination:
    """Test projecting pi of the expansion back by elimination."""

    def test_first_step_equates_opposite_edges(self, parpair, gadget_table):
        """Test that eliminating u1-v2 ties u0-u1 to v0-v2 by a pair of opposite rows."""
        sys = fm_eliminate(build_pi(expand(parpair, gadget_table).expanded), 'e1:u1-v2')
        rows = set()
        for row in sys.rows:
            coeffs, rhs = row.as_le()
            rows.add((tuple(sorted(coeffs.items())), rhs))

        assert ((('e1:u0-u1', 1), ('e1:v0-v2', -1)), 0) in rows
        assert ((('e1:u0-u1', -1), ('e1:v0-v2', 1)), 0) in rows

    def test_parallel_pair_projection(self, parpair, gadget_table):
        """Test that eliminating the gadget variables gives back pi(parpair) row for row."""
        exp = expand(parpair, gadget_table)
        reduced = eliminate_gadgets(exp)

        assert reduced.variables == ('e1:v-v0', 'e2:v-v0')
        assert len(reduced) == 4
        assert systems_match(reduced, build_pi(parpair), exp.projection_renaming()).matched
        assert check_projection(exp).matched

    def test_each_gadget_leaves_pi(self, parpair, gadget_table):
        """Test that every gadget step ends on pi of the expansion still holding the later gadgets."""
        steps = list(elimination_steps(expand(parpair, gadget_table)))

        assert [step.edge for step in steps] == ['e1', 'e2']
        for step in steps:
            assert step.match().matched
            assert all(abs(c) == 1 for row in step.reduced.rows for c in row.coeffs.values())

    def test_parallel_class_of_three(self, parclass3, gadget_table):
        assert check_projection(expand(parclass3, gadget_table)).matched

    def test_feasible_sets(self, partri, gadget_table):
        """Test the feasible-set comparison used by the table search."""
        assert check_projection(expand(partri, gadget_table), exact=False).matched


@pytest.mark.slow
class TestDeriveInternalOrders:
    """Test the search over internal order tables."""

    def test_lift_only(self, parpair, gadget_table):
        """Test that the shipped table passes the lift test."""
        tables = derive_internal_orders([parpair], check_elimination=False, max_workers=2)

        assert gadget_table in tables

    def test_full_corpus(self, parpair, parclass3, partri, gadget_table):
        """Test that the shipped table is among the fully checked tables."""
        tables = derive_internal_orders([parpair, parclass3, partri])

        assert gadget_table in tables
        assert all(check_projection(expand(parpair, table), exact=False).matched for table in tables)

    def test_empty_corpus(self):
        with pytest.raises(InvalidInput):
            derive_internal_orders([])
