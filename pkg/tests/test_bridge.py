"""
Tests for the digraph / preference system correspondence.
"""
import pytest

from kernelkit.exceptions import AmbiguousAttribution, IncompleteTournament, NotCliqueAcyclic, UnknownId
from kernelkit.models.graph import Arc, Digraph
from kernelkit.models.preference import PreferenceCycle, PreferenceSystem
from kernelkit.services import formats
from kernelkit.services.bridge import (
    attribute_arc,
    enumerate_cliques,
    find_cyclic_preference_cycles,
    has_chord_or_pseudo_chord,
    is_cyclic_preference_cycle,
    is_good,
    kernel_matching_translate,
    orientation_from_prefs,
    prefs_from_orientation,
    replay_goodness_certificate,
)
from kernelkit.services.oracles import preference_systems, small_roots
from tests.fixtures.test_data import TRIANGLE_ROOT


@pytest.mark.unit
class TestOrientation:
    """Test orientation_from_prefs and prefs_from_orientation."""

    def test_star_orientation(self, k13_prefs):
        """Test that arcs point from the worse edge to the preferred one."""
        D = orientation_from_prefs(k13_prefs)

        assert D.vertices == ('a', 'b', 'd')
        assert D.pairs == {('b', 'a'), ('d', 'a'), ('d', 'b')}
        assert {arc.provenance for arc in D.arcs} == {'c'}

    def test_round_trip(self, k13, k13_prefs):
        """Test that the preference system is recovered from its orientation."""
        assert prefs_from_orientation(k13, orientation_from_prefs(k13_prefs)) == k13_prefs

    def test_parallel_pair_round_trip(self, parpair):
        """Test recovery when arcs carry provenance labels."""
        D = orientation_from_prefs(parpair)

        assert D.pairs == {('e2', 'e1'), ('e1', 'e2')}
        assert prefs_from_orientation(parpair.graph, D) == parpair

    def test_superorientation_has_no_preferences(self, c4root, sec5):
        """Test that the digon of the superoriented 4-cycle is refused."""
        with pytest.raises(NotCliqueAcyclic) as excinfo:
            prefs_from_orientation(c4root, sec5)

        assert excinfo.value.details['vertex'] == 'q'

    def test_incomplete_tournament(self, k13):
        """Test that a missing pair at a vertex is reported."""
        D = Digraph(('a', 'b', 'd'), (Arc('x', 'b', 'a'),))

        with pytest.raises(IncompleteTournament):
            prefs_from_orientation(k13, D)

    def test_ambiguous_attribution(self, parpair):
        """Test that an unlabeled arc between parallel edges is ambiguous."""
        with pytest.raises(AmbiguousAttribution):
            attribute_arc(parpair.graph, Arc('x', 'e1', 'e2'))

    def test_kernel_matching_translate(self, k13):
        """Test the kernel / matching identification."""
        assert kernel_matching_translate(k13, ['a']) == frozenset({'a'})

        with pytest.raises(UnknownId):
            kernel_matching_translate(k13, ['zz'])


@pytest.mark.slow
class TestOrientationSweep:
    """Test the round trip over every preference system on small roots."""

    def test_every_system_round_trips(self):
        """Test recovery on every root with at most four edges, parallel classes included."""
        roots = small_roots(4)
        assert any(not root.is_simple for root in roots)

        for root in roots:
            for PS in preference_systems(root):
                assert prefs_from_orientation(root, orientation_from_prefs(PS)) == PS


@pytest.mark.unit
class TestCliques:
    """Test enumerate_cliques and classification."""

    def test_star_cliques(self, k13, k13_prefs):
        """Test that every nonempty subset of the triangle L(K_{1,3}) is a clique."""
        cliques = enumerate_cliques(orientation_from_prefs(k13_prefs), 'all', root=k13)

        assert len(cliques) == 7
        assert cliques[-1].members == ('a', 'b', 'd')
        assert cliques[-1].kind == 'a'
        assert cliques[-1].at == ('c',)
        assert cliques[3].kind == 'b'

    def test_leaf_singleton_is_full_star(self, k13, k13_prefs):
        """Test that {a} is all of delta(x) for the leaf x."""
        cliques = enumerate_cliques(orientation_from_prefs(k13_prefs), 'all', root=k13)

        assert cliques[0].members == ('a',)
        assert cliques[0].kind == 'a'
        assert cliques[0].at == ('x',)

    def test_triangle_clique(self):
        """Test the triangle type for L(K_3)."""
        H = formats.parse_multigraph(TRIANGLE_ROOT)
        PS = PreferenceSystem(H, {'p': ('pq', 'rp'), 'q': ('pq', 'qr'), 'r': ('qr', 'rp')})
        D = orientation_from_prefs(PS)

        for root in (H, None):
            maximal = enumerate_cliques(D, 'maximal', root=root)
            assert len(maximal) == 1
            assert maximal[0].kind == 'c'
            assert maximal[0].at == ('p', 'q', 'r')


@pytest.mark.unit
class TestGoodness:
    """Test is_good and its certificates."""

    def test_transitive_tournament_is_good(self, k13_prefs):
        """Test a preference orientation."""
        assert is_good(orientation_from_prefs(k13_prefs)).is_good

    def test_superorientation_is_good(self, sec5):
        """Test that the digon 4-cycle has no odd cycle and no one-way cycle in a clique."""
        assert is_good(sec5).verdict == 'good'

    def test_three_cycle(self, c3):
        """Test that a one-way triangle is not clique-acyclic."""
        report = is_good(c3)

        assert report.verdict == 'not_clique_acyclic'
        assert report.certificate['kind'] == 'clique_cycle'
        assert sorted(report.certificate['cycle']) == ['a', 'b', 'c']
        assert replay_goodness_certificate(c3, report.certificate)

    def test_five_cycle(self, c5):
        """Test that a chordless odd cycle is found."""
        report = is_good(c5)

        assert report.verdict == 'chordless_odd_cycle'
        assert report.certificate['cycle'] == ['a', 'b', 'c', 'd', 'e']
        assert replay_goodness_certificate(c5, report.certificate)

    def test_tampered_certificate(self, c5, sec5):
        """Test that certificates do not replay on the wrong digraph or kind."""
        report = is_good(c5)

        assert not replay_goodness_certificate(sec5, report.certificate)
        assert not replay_goodness_certificate(c5, {**report.certificate, 'kind': 'clique_cycle'})

    def test_pseudo_chord(self):
        """Test that a reversed step counts as a pseudo-chord."""
        D = formats.parse_digraph("v a\nv b\nv c\na ab a b\na bc b c\na ca c a\na ba b a\n")

        assert has_chord_or_pseudo_chord(D, ['a', 'b', 'c'])


@pytest.mark.unit
class TestCyclicPreferenceCycles:
    """Test find_cyclic_preference_cycles."""

    def test_even_cycle(self, c4cyclic):
        """Test the 4-cycle with cyclic preferences."""
        cycles = find_cyclic_preference_cycles(c4cyclic)

        assert cycles == [PreferenceCycle(('v1', 'v2', 'v3', 'v4'), ('e12', 'e23', 'e34', 'e41'))]
        assert find_cyclic_preference_cycles(c4cyclic, 'odd') == []

    def test_odd_cycle(self, k3cyclic):
        """Test the cyclic triangle."""
        cycles = find_cyclic_preference_cycles(k3cyclic, 'odd')

        assert cycles == [PreferenceCycle(('a', 'b', 'c'), ('ab', 'bc', 'ca'))]
        assert cycles[0].parity == 'odd'

    def test_odd_cycle_through_parallel_edge(self, partri):
        """Test that only e1 f g has cyclic preferences."""
        assert find_cyclic_preference_cycles(partri) == [PreferenceCycle(('a', 'b', 'c'), ('e1', 'f', 'g'))]

    def test_acyclic_preferences(self, k13_prefs):
        """Test that a star has no cycles at all."""
        assert find_cyclic_preference_cycles(k13_prefs) == []

    def test_direction_matters(self, k3cyclic):
        """Test that the reversed labeling is rejected."""
        forward = PreferenceCycle(('a', 'b', 'c'), ('ab', 'bc', 'ca'))
        backward = PreferenceCycle(('a', 'c', 'b'), ('ca', 'bc', 'ab'))

        assert is_cyclic_preference_cycle(k3cyclic, forward)
        assert not is_cyclic_preference_cycle(k3cyclic, backward)
