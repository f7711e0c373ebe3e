"""
Test configuration and shared fixtures.

This module provides pytest fixtures used across all test modules.
"""
import os
from pathlib import Path

import pytest

# Set test environment variables before importing the package
os.environ['APP_ENV'] = 'testing'
os.environ['LOG_LEVEL'] = 'WARNING'

from kernelkit import create_app
from kernelkit.services import formats

FIXTURES = Path(__file__).resolve().parent.parent / 'fixtures'


@pytest.fixture(scope='session')
def app():
    """
    Create Flask app for testing.

    Yields:
        Flask app configured for testing
    """
    app = create_app({
        'TESTING': True,
        'DEBUG': False
    })

    yield app


@pytest.fixture(scope='function')
def client(app):
    """
    Provide Flask test client.

    Args:
        app: Flask app fixture

    Yields:
        Flask test client
    """
    return app.test_client()


@pytest.fixture(scope='session')
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope='session')
def fixture_text():
    """Read a shipped fixture file by name."""
    def read(name: str) -> str:
        return (FIXTURES / name).read_text(encoding='utf-8')
    return read


@pytest.fixture(scope='session')
def sec5(fixture_text):
    return formats.parse_digraph(fixture_text('sec5.dg'))


@pytest.fixture(scope='session')
def c3(fixture_text):
    return formats.parse_digraph(fixture_text('c3.dg'))


@pytest.fixture(scope='session')
def c5(fixture_text):
    return formats.parse_digraph(fixture_text('c5.dg'))


@pytest.fixture(scope='session')
def k13(fixture_text):
    return formats.parse_multigraph(fixture_text('k13.mg'))


@pytest.fixture(scope='session')
def k13_prefs(fixture_text):
    return formats.parse_preferences(fixture_text('k13.pref'))


@pytest.fixture(scope='session')
def c4root(fixture_text):
    return formats.parse_multigraph(fixture_text('c4root.mg'))


@pytest.fixture(scope='session')
def parpair(fixture_text):
    return formats.parse_preferences(fixture_text('parpair.pref'))


@pytest.fixture(scope='session')
def parclass3(fixture_text):
    return formats.parse_preferences(fixture_text('parclass3.pref'))


@pytest.fixture(scope='session')
def partri(fixture_text):
    return formats.parse_preferences(fixture_text('partri.pref'))


@pytest.fixture(scope='session')
def c4cyclic(fixture_text):
    return formats.parse_preferences(fixture_text('c4cyclic.pref'))


@pytest.fixture(scope='session')
def k3cyclic(fixture_text):
    return formats.parse_preferences(fixture_text('k3cyclic.pref'))


@pytest.fixture(scope='session')
def gadget_table():
    from kernelkit.services.gadget import load_default_table
    return load_default_table()
