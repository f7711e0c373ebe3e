"""
Tests for the toolkit endpoints.
"""
import pytest

from tests.fixtures.test_data import BOX_SYSTEM, SEC5_KERNELS, SEC5_VERTICES_JSON

URL = '/api/v1/toolkit'


@pytest.mark.api
class TestListCommands:
    """Test GET /api/v1/toolkit."""

    def test_list(self, client):
        response = client.get(URL)

        assert response.status_code == 200
        commands = response.get_json()['commands']
        assert commands['to-prefs']['inputs'] == ['multigraph', 'digraph']
        assert 'check-certificate' in commands


@pytest.mark.api
class TestRunCommand:
    """Test POST /api/v1/toolkit/<command>."""

    def test_kernels(self, client, fixture_text):
        """Test that a true verdict comes back with its payload."""
        response = client.post(f"{URL}/kernels", json={'digraph': fixture_text('sec5.dg')})

        assert response.status_code == 200
        data = response.get_json()
        assert data['verdict'] is True
        assert data['exit_code'] == 0
        assert data['result']['kernels'] == SEC5_KERNELS

    def test_false_verdict_is_ok(self, client, fixture_text):
        """Test that a refutation is a 200 with verdict false and a certificate."""
        response = client.post(f"{URL}/good", json={'digraph': fixture_text('c5.dg')})

        assert response.status_code == 200
        data = response.get_json()
        assert data['verdict'] is False
        assert data['exit_code'] == 1
        assert data['result']['certificate']['kind'] == 'chordless_odd_cycle'

    def test_preferences_as_digraph(self, client, fixture_text):
        """Test that a prefs field feeds a digraph slot."""
        response = client.post(f"{URL}/kernel", json={'prefs': fixture_text('k13.pref')})

        assert response.status_code == 200
        assert response.get_json()['result']['kernel'] == ['a']

    def test_vertices(self, client, fixture_text):
        response = client.post(f"{URL}/fk-vertices", json={'digraph': fixture_text('sec5.dg')})

        assert response.get_json()['result']['vertices'] == SEC5_VERTICES_JSON

    def test_system_object(self, client):
        """Test that a system may be sent as a JSON object."""
        response = client.post(f"{URL}/integral", json={'system': BOX_SYSTEM})

        assert response.status_code == 200
        assert response.get_json()['verdict'] is True

    def test_options(self, client, fixture_text):
        """Test that k is passed through."""
        response = client.post(f"{URL}/integral", json={'digraph': fixture_text('sec5.dg'), 'k': 2})

        assert response.get_json()['verdict'] is True

    def test_point_and_certificate(self, client, fixture_text):
        """Test a rounding refutation replayed through check-certificate."""
        prefs = fixture_text('k3cyclic.pref')
        response = client.post(f"{URL}/round", json={'prefs': prefs, 'point': {'ab': '1/2', 'bc': '1/2', 'ca': '1/2'}})
        certificate = response.get_json()['result']['certificate']

        replay = client.post(f"{URL}/check-certificate", json={'certificate': certificate, 'inputs': [prefs]})

        assert replay.get_json()['verdict'] is True

    def test_input_error(self, client, fixture_text):
        """Test that a structural refusal is a 400."""
        response = client.post(f"{URL}/to-prefs", json={
            'multigraph': fixture_text('c4root.mg'),
            'digraph': fixture_text('sec5.dg'),
        })

        assert response.status_code == 400
        data = response.get_json()
        assert data['error'] == 'NotCliqueAcyclic'
        assert data['details']['vertex'] == 'q'

    def test_missing_input(self, client):
        response = client.post(f"{URL}/good", json={})

        assert response.status_code == 400

    def test_missing_body(self, client):
        response = client.post(f"{URL}/good", data='not json', content_type='text/plain')

        assert response.status_code == 400
        assert response.get_json()['error'] == 'Request body is required'

    def test_budget(self, client, fixture_text):
        """Test that a budget excess is a 413."""
        response = client.post(f"{URL}/kernel", json={'digraph': fixture_text('c3.dg'), 'budget': 4})

        assert response.status_code == 413
        assert response.get_json()['error'] == 'InstanceTooLarge'

    def test_budget_is_per_request(self, client, fixture_text):
        """Test that a budgeted request does not lower the budgets of the next one."""
        c5 = fixture_text('c5.dg')

        assert client.post(f"{URL}/kernel", json={'digraph': c5, 'budget': 4}).status_code == 413
        assert client.post(f"{URL}/kernel", json={'digraph': c5}).get_json()['verdict'] is False

    def test_lp(self, client, fixture_text):
        response = client.post(f"{URL}/lp", json={
            'digraph': fixture_text('sec5.dg'),
            'objective': {'1': 1, '4': 1},
            'sense': 'min',
        })

        assert response.status_code == 200
        result = response.get_json()['result']
        assert result['value'] == '0'
        assert result['primal'] == SEC5_VERTICES_JSON[0]

    def test_unknown_command(self, client):
        response = client.post(f"{URL}/nope", json={})

        assert response.status_code == 404
