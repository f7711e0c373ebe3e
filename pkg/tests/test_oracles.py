"""
Tests for the brute-force oracles and the equivalence sweep.
"""
import pytest

from kernelkit.exceptions import InstanceTooLarge, InvalidInput
from kernelkit.models.graph import Arc, Digraph
from kernelkit.services import formats
from kernelkit.services.bridge import is_good, orientation_from_prefs
from kernelkit.services.graphcore import induced_subdigraph
from kernelkit.services.oracles import (
    TheoremVerifier,
    canonical_key,
    compare_oracles,
    count_preference_systems,
    enumerate_kernels,
    goodness_witness_subset,
    has_kernel,
    is_kernel_perfect,
    preference_systems,
    raw_orientations,
    sample_preference_systems,
    small_roots,
    verify_half_tdi,
    verify_main_theorem,
)
from kernelkit.services.polyhedra import build_sigma, check_tdi_objective
from tests.fixtures.test_data import SEC5_KERNELS, TRIANGLE_ROOT


@pytest.mark.unit
class TestKernels:
    """Test kernel enumeration and kernel perfection."""

    def test_superorientation_kernels(self, sec5):
        assert enumerate_kernels(sec5) == SEC5_KERNELS

    def test_star_kernel(self, k13_prefs):
        """Test that the favorite edge is the only kernel."""
        assert enumerate_kernels(orientation_from_prefs(k13_prefs)) == [['a']]

    def test_odd_cycles_have_no_kernel(self, c3, c5):
        assert not has_kernel(c3)
        assert not has_kernel(c5)

    def test_empty_digraph(self):
        """Test that the empty digraph has the empty kernel."""
        assert enumerate_kernels(Digraph(())) == [[]]

    def test_kernel_perfect(self, sec5, c3):
        """Test the smallest kernel-free subset."""
        assert is_kernel_perfect(sec5) == (True, None)
        assert is_kernel_perfect(c3) == (False, ['a', 'b', 'c'])

    def test_budget(self, c5):
        with pytest.raises(InstanceTooLarge):
            has_kernel(c5, budget=8)

    def test_goodness_witness(self, c5, sec5):
        """Test that the goodness certificate names a kernel-free subset."""
        witness = goodness_witness_subset(c5, is_good(c5))

        assert witness == ['a', 'b', 'c', 'd', 'e']
        assert goodness_witness_subset(sec5, is_good(sec5)) is None


@pytest.mark.unit
class TestCorpus:
    """Test orientation and preference system generators."""

    def test_raw_orientations(self, k13):
        """Test that a triangle line graph has 2^3 orientations."""
        orientations = list(raw_orientations(k13))

        assert len(orientations) == 8
        assert len({D.encoding() for D in orientations}) == 8
        assert all(arc.provenance == 'c' for D in orientations for arc in D.arcs)

    def test_preference_systems(self, k13, parpair):
        assert len(list(preference_systems(k13))) == count_preference_systems(k13) == 6
        assert count_preference_systems(parpair.graph) == 4

    def test_sampling_is_seeded(self, k13):
        """Test that a seed fixes the sample."""
        first = sample_preference_systems(k13, 5, seed=3)

        assert len(first) == 5
        assert first == sample_preference_systems(k13, 5, seed=3)

    def test_small_roots(self):
        """Test the isomorphism classes with up to three edges."""
        assert len(small_roots(2)) == 4
        assert len(small_roots(2, simple_only=True)) == 3
        assert len(small_roots(3)) == 12
        assert len(small_roots(3, simple_only=True)) == 8

    def test_small_roots_names(self):
        first = small_roots(1)[0]

        assert first.vertices == ('r1', 'r2')
        assert [(e.id, e.u, e.v) for e in first.edges] == [('e1', 'r1', 'r2')]

    def test_small_roots_bad_size(self):
        with pytest.raises(InvalidInput):
            small_roots(0)

    def test_canonical_key(self, c3):
        """Test that relabeled copies share a key."""
        relabeled = Digraph(('x', 'y', 'z'), (Arc('1', 'y', 'x'), Arc('2', 'x', 'z'), Arc('3', 'z', 'y')))
        path = Digraph(('x', 'y', 'z'), (Arc('1', 'x', 'y'), Arc('2', 'y', 'z')))

        assert canonical_key(relabeled) == canonical_key(c3)
        assert canonical_key(path) != canonical_key(c3)


@pytest.mark.unit
class TestCompareOracles:
    """Test that the three stable matching oracles agree."""

    def test_even_cycle(self, c4cyclic):
        result = compare_oracles(c4cyclic)

        assert result['agree']
        assert result['stable_matchings'] == {frozenset({'e12', 'e34'}), frozenset({'e23', 'e41'})}

    def test_no_stable_matching(self, k3cyclic):
        """Test that all three come back empty on the cyclic triangle."""
        result = compare_oracles(k3cyclic)

        assert result['agree']
        assert result['kernels'] == set()

    def test_parallel_edges(self, partri):
        assert compare_oracles(partri)['agree']


@pytest.mark.slow
class TestEquivalenceSweep:
    """Test verify_main_theorem on small roots."""

    def test_star(self, k13):
        """Test the six transitive and two cyclic orientations of a triangle."""
        report = verify_main_theorem(k13, tdi_c_bound=1)

        assert report.violations == []
        assert len(report.orientations) == 8
        assert report.summary() == {
            'bad/not-kp/not-ki/implied_fail': 2,
            'good/kp/ki/pass': 6,
        }

    def test_refutation_recorded(self, sec5):
        """Test that a non-integral subdigraph gets a TDI objective that replays."""
        verdict = TheoremVerifier(tdi_c_bound=1).orientation_verdict(sec5)

        assert not verdict.kernel_ideal
        assert verdict.tdi == 'fail'
        assert verdict.tdi_subset == ['1', '2', '3', '4']
        sigma = build_sigma(induced_subdigraph(sec5, verdict.tdi_subset))
        assert check_tdi_objective(sigma, 1, verdict.tdi_objective) is not None

    def test_empty_system_stays_implied(self, c3):
        """Test that a kernel-free cycle, whose system is empty, has no objective to show."""
        verdict = TheoremVerifier(tdi_c_bound=1).orientation_verdict(c3)

        assert verdict.tdi == 'implied_fail'
        assert verdict.tdi_objective is None

    def test_sources(self, k13):
        """Test that preference orientations are tagged with their preferences."""
        report = verify_main_theorem(k13, tdi_c_bound=1)
        from_prefs = [v for v in report.orientations if v.source == 'prefs']

        assert len(from_prefs) == 6
        assert all(v.preferences is not None for v in from_prefs)

    def test_shared_cache(self):
        """Test reusing one verifier across roots."""
        verifier = TheoremVerifier(tdi_c_bound=1)
        for root in small_roots(2):
            assert verify_main_theorem(root, verifier=verifier).violations == []

    def test_triangle_root(self):
        H = formats.parse_multigraph(TRIANGLE_ROOT)

        assert verify_main_theorem(H, tdi_c_bound=1).violations == []

    def test_bad_bound(self):
        with pytest.raises(InvalidInput):
            TheoremVerifier(tdi_c_bound=-1)


@pytest.mark.slow
class TestHalfIntegrality:
    """Test verify_half_tdi."""

    def test_bipartite(self, c4cyclic):
        """Test an even cycle: integral FSM and TDI pi."""
        report = verify_half_tdi(c4cyclic, c_bound=1)

        assert report.bipartite
        assert report.fsm_integral
        assert report.pi_tdi
        assert report.rothblum_holds
        assert report.holds

    def test_odd_cycle(self, k3cyclic):
        """Test the cyclic triangle: half-integral, not integral, empty kernel system."""
        report = verify_half_tdi(k3cyclic, c_bound=1)

        assert report.fsm_half_integral
        assert not report.fsm_integral
        assert not report.pi_tdi
        assert report.pi_tdi_half
        assert report.rothblum_holds is None
        assert report.sigma_empty
        assert report.holds

    def test_without_sigma(self, partri):
        report = verify_half_tdi(partri, c_bound=1, include_sigma=False)

        assert not report.sigma_checked
        assert report.fsm_half_integral
