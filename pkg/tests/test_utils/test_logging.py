"""
Tests for structured logging and diagnostics collection.
"""

import logging

from momentbc.logging import (
    DiagnosticsCollector,
    StructuredFormatter,
    get_logger,
    log_event,
    log_warning,
)


class TestStructuredFormatter:
    def test_extras_appended(self):
        record = logging.LogRecord("momentbc.pencil", logging.WARNING, "", 0, "switched", (), None)
        record.extras = {"code": "ill-conditioned", "order": 4}
        line = StructuredFormatter().format(record)
        assert "| WARNING  | pencil | switched" in line
        assert line.endswith("| code=ill-conditioned | order=4")

    def test_plain_message(self):
        record = logging.LogRecord("momentbc", logging.INFO, "", 0, "done", (), None)
        assert StructuredFormatter().format(record).endswith("| momentbc | done")


class TestGetLogger:
    def test_namespaced(self):
        assert get_logger("recovery").name == "momentbc.recovery"
        assert get_logger("momentbc.pencil").name == "momentbc.pencil"


class TestDiagnosticsCollector:
    """Tests for warning capture."""

    def test_collects_warnings_with_details(self):
        logger = get_logger("pencil")
        with DiagnosticsCollector() as diagnostics:
            log_warning(logger, "ill-conditioned", "condition estimate high", condition=1e13)
        assert diagnostics.entries == [
            {
                "code": "ill-conditioned",
                "level": "warning",
                "module": "pencil",
                "message": "condition estimate high",
                "details": {"condition": 1e13},
            }
        ]

    def test_ignores_info(self):
        logger = get_logger("recovery")
        with DiagnosticsCollector() as diagnostics:
            log_event(logger, "moments dropped", count=2)
        assert diagnostics.entries == []

    def test_detaches_on_exit(self):
        logger = get_logger("recovery")
        with DiagnosticsCollector() as diagnostics:
            pass
        log_warning(logger, "late", "after exit")
        assert diagnostics.entries == []
