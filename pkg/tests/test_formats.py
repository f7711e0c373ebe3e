"""
Tests for the text formats and JSON codecs.
"""
import json
from fractions import Fraction

import pytest

from kernelkit.exceptions import InvalidInput, UnknownVertex
from kernelkit.models.linear import LPResult
from kernelkit.services import formats
from tests.fixtures.test_data import BOX_SYSTEM, PATH_PREFS


@pytest.mark.unit
class TestParsers:
    """Test the line-oriented parsers."""

    def test_parse_preferences(self):
        """Test comments, vertices, edges and orders."""
        PS = formats.parse_preferences(PATH_PREFS)

        assert PS.graph.vertices == ('x', 'y', 'z')
        assert PS.edge_ids == ('a', 'b')
        assert PS.orders['y'] == ('a', 'b')

    def test_parse_digraph_provenance(self):
        D = formats.parse_digraph("v e\nv f\na x e f w\na y f e\n")

        assert D.arcs[0].provenance == 'w'
        assert D.arcs[1].provenance is None

    def test_unexpected_record(self):
        """Test that arcs are refused in a multigraph file."""
        with pytest.raises(InvalidInput, match='line 2'):
            formats.parse_multigraph("v a\na x a a\n")

    def test_malformed_edge(self):
        with pytest.raises(InvalidInput, match="expected 'e"):
            formats.parse_multigraph("v a\nv b\ne x a\n")

    def test_unknown_endpoint(self):
        with pytest.raises(UnknownVertex):
            formats.parse_multigraph("v a\ne x a b\n")

    def test_incomplete_order(self):
        """Test that an order must list all of delta(v)."""
        with pytest.raises(InvalidInput, match='exactly once'):
            formats.parse_preferences("v x\nv y\nv z\ne a x y\ne b y z\np y : a\np x : a\np z : b\n")

    def test_second_order(self):
        with pytest.raises(InvalidInput, match='second order'):
            formats.parse_preferences("v x\nv y\ne a x y\np x : a\np x : a\np y : a\n")


@pytest.mark.unit
class TestRenderers:
    """Test rendering back to text."""

    def test_render_preferences(self):
        """Test that rendering and parsing agree."""
        PS = formats.parse_preferences(PATH_PREFS)

        assert formats.parse_preferences(formats.render_preferences(PS)) == PS

    def test_render_digraph(self, sec5):
        text = formats.render_digraph(sec5)

        assert text.splitlines()[4] == 'a a12 1 2'
        assert formats.parse_digraph(text) == sec5


@pytest.mark.unit
class TestDetectKind:
    """Test input kind detection."""

    @pytest.mark.parametrize('name, kind', [
        ('x.json', 'system'),
        ('x.dg', 'digraph'),
        ('x.pref', 'prefs'),
        ('x.mg', 'multigraph'),
    ])
    def test_by_suffix(self, name, kind):
        assert formats.detect_kind('', name) == kind

    def test_by_content(self):
        """Test sniffing when the name has no known suffix."""
        assert formats.detect_kind('{"variables": []}') == 'system'
        assert formats.detect_kind(PATH_PREFS) == 'prefs'
        assert formats.detect_kind("v a\nv b\na x a b\n", 'stdin') == 'digraph'
        assert formats.detect_kind("v a\n") == 'multigraph'


@pytest.mark.unit
class TestJson:
    """Test the JSON codecs."""

    def test_point(self):
        """Test that rationals are written as p/q strings in variable order."""
        point = {'y': Fraction(1, 2), 'x': Fraction(3)}

        assert formats.point_to_json(point, ['x', 'y']) == {'x': '3', 'y': '1/2'}
        assert formats.parse_point('{"x": "1/2", "y": 1}') == {'x': Fraction(1, 2), 'y': Fraction(1)}

    def test_point_refuses_floats(self):
        with pytest.raises(InvalidInput, match='Floating'):
            formats.parse_point('{"x": 0.5}')

    def test_point_must_be_object(self):
        with pytest.raises(InvalidInput):
            formats.parse_point('[1, 2]')

    def test_system(self):
        """Test that the system JSON is read and written losslessly."""
        sys = formats.system_from_json(BOX_SYSTEM)

        assert formats.system_to_json(sys) == BOX_SYSTEM
        assert formats.system_from_json(json.dumps(BOX_SYSTEM)) == sys

    def test_malformed_system(self):
        with pytest.raises(InvalidInput, match='Malformed'):
            formats.system_from_json({'rows': []})

    def test_lp_result(self):
        sys = formats.system_from_json(BOX_SYSTEM)
        result = LPResult(status='infeasible')

        assert formats.lp_result_to_json(result, sys) == {'status': 'infeasible', 'sense': 'max'}

    def test_dumps(self):
        assert formats.dumps({'b': 1, 'a': 2}) == '{\n  "b": 1,\n  "a": 2\n}\n'

    def test_digraph_encoding(self, sec5):
        """Test that the canonical encoding is invertible up to arc ids."""
        D = formats.digraph_from_encoding(sec5.encoding())

        assert D.vertices == sec5.vertices
        assert D.pairs == sec5.pairs

    def test_bad_encoding(self):
        with pytest.raises(InvalidInput):
            formats.digraph_from_encoding('a,b|a-b')
