"""Test fixtures and shared test data."""
from .test_data import *
