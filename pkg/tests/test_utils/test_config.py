"""
Tests for tolerances and environment-driven settings.
"""

import pytest

from momentbc.config import DEFAULT_TOLERANCES, RuntimeSettings, Tolerances


class TestTolerances:
    """Tests for Tolerances validation and overrides."""

    def test_defaults(self):
        assert DEFAULT_TOLERANCES.eigen == 1e-14
        assert DEFAULT_TOLERANCES.max_sweeps == 100

    def test_rejects_non_positive(self):
        with pytest.raises(ValueError, match="pivot"):
            Tolerances(pivot=0.0)

    def test_rejects_zero_sweeps(self):
        with pytest.raises(ValueError, match="max_sweeps"):
            Tolerances(max_sweeps=0)

    def test_rejects_low_precision(self):
        with pytest.raises(ValueError, match="extended_dps"):
            Tolerances(extended_dps=10)

    def test_override(self):
        tolerances = DEFAULT_TOLERANCES.with_overrides(1e-8)
        assert tolerances.eigen == 1e-8
        assert tolerances.pivot == 1e-8
        assert tolerances.condition_limit == DEFAULT_TOLERANCES.condition_limit

    def test_override_keeps_larger_pivot(self):
        assert DEFAULT_TOLERANCES.with_overrides(1e-12).pivot == DEFAULT_TOLERANCES.pivot

    def test_no_override(self):
        assert DEFAULT_TOLERANCES.with_overrides(None) is DEFAULT_TOLERANCES


class TestRuntimeSettings:
    """Tests for MOMENTBC_* environment variables."""

    @pytest.fixture(autouse=True)
    def clean_env(self, monkeypatch):
        for name in ("MOMENTBC_THREADS", "MOMENTBC_EXTENDED_PRECISION", "MOMENTBC_LOG_LEVEL"):
            monkeypatch.delenv(name, raising=False)

    def test_defaults(self):
        settings = RuntimeSettings.from_env()
        assert settings.threads >= 1
        assert settings.extended_precision is True
        assert settings.log_level == "WARNING"

    def test_reads_environment(self, monkeypatch):
        monkeypatch.setenv("MOMENTBC_THREADS", "3")
        monkeypatch.setenv("MOMENTBC_EXTENDED_PRECISION", "off")
        monkeypatch.setenv("MOMENTBC_LOG_LEVEL", "debug")
        settings = RuntimeSettings.from_env()
        assert settings.threads == 3
        assert settings.extended_precision is False
        assert settings.log_level == "DEBUG"

    def test_non_integer_threads(self, monkeypatch):
        monkeypatch.setenv("MOMENTBC_THREADS", "many")
        with pytest.raises(ValueError, match="integer"):
            RuntimeSettings.from_env()

    def test_zero_threads(self, monkeypatch):
        monkeypatch.setenv("MOMENTBC_THREADS", "0")
        with pytest.raises(ValueError, match="at least 1"):
            RuntimeSettings.from_env()

    def test_unknown_log_level(self):
        with pytest.raises(ValueError, match="unknown level"):
            RuntimeSettings(log_level="LOUD")
