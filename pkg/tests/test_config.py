"""
Tests for configuration and logging setup.
"""
import logging
import threading

import pytest
from pydantic import ValidationError

from kernelkit.config import BUDGET_FIELDS, Settings, budget_cap, configure_logging, current_budget_cap, settings


@pytest.mark.unit
class TestSettings:
    """Test Settings validation and budget helpers."""

    def test_defaults(self, monkeypatch):
        """Test that environment variables override defaults."""
        monkeypatch.setenv('TDI_C_BOUND', '3')
        monkeypatch.setenv('CYCLE_BUDGET', '50')

        loaded = Settings()

        assert loaded.tdi_c_bound == 3
        assert loaded.cycle_budget == 50

    def test_invalid_env(self, monkeypatch):
        monkeypatch.setenv('APP_ENV', 'staging')

        with pytest.raises(ValidationError, match='app_env'):
            Settings()

    def test_non_positive_budget(self, monkeypatch):
        monkeypatch.setenv('SUBSET_BUDGET', '0')

        with pytest.raises(ValidationError, match='positive'):
            Settings()

    def test_log_level_normalized(self, monkeypatch):
        monkeypatch.setenv('LOG_LEVEL', 'info')

        assert Settings().log_level == 'INFO'

    def test_default_gadget_table(self, fixtures_dir):
        assert settings.default_gadget_table == fixtures_dir / 'gadget_table.pref'


@pytest.mark.unit
class TestLogging:
    """Test configure_logging."""

    def test_single_handler(self):
        """Test that repeated setup does not stack handlers."""
        configure_logging('DEBUG')
        configure_logging('WARNING')
        logger = logging.getLogger('kernelkit')

        assert len(logger.handlers) == 1
        assert logger.level == logging.WARNING


@pytest.mark.unit
class TestBudgets:
    """Test budget resolution and per-call caps."""

    def test_limit_defaults_to_settings(self):
        assert settings.limit('cycle_budget') == settings.cycle_budget

    def test_explicit_budget_wins(self):
        with budget_cap(5):
            assert settings.limit('cycle_budget', 50) == 50

    def test_explicit_zero_is_kept(self):
        """Test that a zero budget is not replaced by the default."""
        assert settings.limit('subset_budget', 0) == 0

    def test_negative_budget(self):
        with pytest.raises(ValueError):
            settings.limit('subset_budget', -1)
        with pytest.raises(ValueError):
            with budget_cap(-1):
                pass

    def test_cap_applies_to_every_budget(self):
        with budget_cap(7):
            assert all(settings.limit(name) == 7 for name in BUDGET_FIELDS)

    def test_cap_keeps_smaller(self, monkeypatch):
        monkeypatch.setattr(settings, 'fm_row_budget', 3)

        with budget_cap(7):
            assert settings.limit('fm_row_budget') == 3

    def test_cap_leaves_settings_untouched(self):
        before = {name: getattr(settings, name) for name in BUDGET_FIELDS}

        with budget_cap(1):
            assert current_budget_cap() == 1

        assert current_budget_cap() is None
        assert {name: getattr(settings, name) for name in BUDGET_FIELDS} == before

    def test_overlapping_caps_stay_separate(self):
        """Test that a cap set in one thread is invisible to another running at the same time."""
        configured = settings.cycle_budget
        barrier = threading.Barrier(2)
        seen = {}

        def capped():
            with budget_cap(10):
                barrier.wait()
                seen['capped'] = settings.limit('cycle_budget')
                barrier.wait()

        def uncapped():
            barrier.wait()
            seen['uncapped'] = settings.limit('cycle_budget')
            barrier.wait()

        threads = [threading.Thread(target=capped), threading.Thread(target=uncapped)]
        for thread in threads:
            thread.start()
        for thread in threads:
            thread.join(timeout=10)

        assert seen == {'capped': 10, 'uncapped': configured}
        assert settings.cycle_budget == configured
