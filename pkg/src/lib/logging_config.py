"""
Logging configuration for symdyn.

Provides a centralized logger with configurable verbosity. Diagnostics go to
stderr; stdout carries reports only.
"""

import logging
import os
import sys

# Log level from environment, defaulting to WARNING
LOG_LEVEL = os.environ.get("SYMDYN_LOG_LEVEL", "WARNING").upper()

# Create the main logger
logger = logging.getLogger("symdyn")
logger.setLevel(getattr(logging, LOG_LEVEL, logging.WARNING))

# Console handler with formatting
_handler = logging.StreamHandler(sys.stderr)
_handler.setLevel(getattr(logging, LOG_LEVEL, logging.WARNING))
_formatter = logging.Formatter(
    "[%(levelname)s] %(name)s: %(message)s"
)
_handler.setFormatter(_formatter)
logger.addHandler(_handler)

# Prevent propagation to root logger
logger.propagate = False


def get_logger(name: str) -> logging.Logger:
    """Get a child logger for a specific module."""
    return logger.getChild(name)


def set_level(level: str) -> None:
    """Change the package log level at runtime (used by the --log-level flag)."""
    resolved = getattr(logging, level.upper(), logging.WARNING)
    logger.setLevel(resolved)
    _handler.setLevel(resolved)
