"""
Structured logging for momentbc.

Log lines go to stderr so stdout stays reserved for CLI artifacts. Warnings
carry a machine-readable ``code`` in their extras; the CLI collects them into
the ``diagnostics`` array of every output document.
"""

import logging
import sys
from datetime import datetime
from typing import Any

PACKAGE_LOGGER = "momentbc"


class StructuredFormatter(logging.Formatter):
    """Formatter with readable timestamps and ``key=value`` extras."""

    def format(self, record: logging.LogRecord) -> str:
        timestamp = datetime.now().strftime("%Y-%m-%d %H:%M:%S.%f")[:-3]
        level = record.levelname.ljust(8)
        module = record.name.split(".")[-1] if record.name else "root"

        base = f"{timestamp} | {level} | {module} | {record.getMessage()}"

        extras = getattr(record, "extras", None)
        if extras:
            extra_str = " | ".join(f"{k}={v}" for k, v in extras.items())
            base = f"{base} | {extra_str}"

        return base


def configure(level: str | int = logging.WARNING) -> logging.Logger:
    """Attach the stderr handler to the package logger (idempotent)."""
    logger = logging.getLogger(PACKAGE_LOGGER)

    if not any(isinstance(h, logging.StreamHandler) for h in logger.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(StructuredFormatter())
        logger.addHandler(handler)
        logger.propagate = False

    logger.setLevel(level)
    for handler in logger.handlers:
        if isinstance(handler, logging.StreamHandler):
            handler.setLevel(level)
    return logger


def get_logger(name: str) -> logging.Logger:
    """Get a logger under the package logger, configuring it on first use."""
    parent = logging.getLogger(PACKAGE_LOGGER)
    if not parent.handlers:
        configure()

    if name == PACKAGE_LOGGER or name.startswith(PACKAGE_LOGGER + "."):
        return logging.getLogger(name)
    return logging.getLogger(f"{PACKAGE_LOGGER}.{name}")


def log_event(
    logger: logging.Logger,
    event: str,
    level: int = logging.INFO,
    **kwargs: Any,
) -> None:
    """Log an event with structured extras."""
    # Warnings always reach handlers: the diagnostics collector needs them.
    if level < logging.WARNING and not logger.isEnabledFor(level):
        return
    record = logger.makeRecord(logger.name, level, "", 0, event, (), None)
    record.extras = kwargs
    logger.handle(record)


def log_warning(logger: logging.Logger, code: str, message: str, **kwargs: Any) -> None:
    """Log a diagnostic warning identified by ``code``."""
    log_event(logger, message, logging.WARNING, code=code, **kwargs)


def log_error(
    logger: logging.Logger,
    action: str,
    error: Exception,
    **kwargs: Any,
) -> None:
    """Log an error with structured extras."""
    record = logger.makeRecord(
        logger.name,
        logging.ERROR,
        "",
        0,
        f"{action}: {type(error).__name__}: {error}",
        (),
        None,
    )
    record.extras = kwargs
    logger.handle(record)


class DiagnosticsCollector(logging.Handler):
    """Captures package warnings as structured diagnostics.

    Usage:
        with DiagnosticsCollector() as diagnostics:
            run_pipeline()
        document["diagnostics"] = diagnostics.entries
    """

    def __init__(self) -> None:
        super().__init__(level=logging.WARNING)
        self.entries: list[dict[str, Any]] = []

    def emit(self, record: logging.LogRecord) -> None:
        extras = dict(getattr(record, "extras", None) or {})
        entry: dict[str, Any] = {
            "code": extras.pop("code", "warning"),
            "level": record.levelname.lower(),
            "module": record.name.split(".")[-1],
            "message": record.getMessage(),
        }
        if extras:
            entry["details"] = extras
        self.entries.append(entry)

    def __enter__(self) -> "DiagnosticsCollector":
        logging.getLogger(PACKAGE_LOGGER).addHandler(self)
        return self

    def __exit__(self, *exc_info: object) -> None:
        logging.getLogger(PACKAGE_LOGGER).removeHandler(self)
