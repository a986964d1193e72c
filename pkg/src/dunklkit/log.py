"""Package logger. Everything goes to stderr; stdout is reserved for JSON results."""

import logging
import os
import sys

LOGGER_NAME = "dunklkit"

_logger = logging.getLogger(LOGGER_NAME)


def _truthy(value):
    return str(value).strip().lower() in ("1", "true", "yes", "on")


def setup_logging(debug=None):
    """Attach the stderr handler once. DEBUG=true in the environment turns on debug output."""
    if debug is None:
        debug = _truthy(os.environ.get("DEBUG", ""))
    if not _logger.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(message)s"))
        _logger.addHandler(handler)
        _logger.propagate = False
    _logger.setLevel(logging.DEBUG if debug else logging.INFO)
    return _logger


def log(tag, msg):
    _logger.info(f"[{tag}] {msg}")


def debug(tag, msg):
    _logger.debug(f"[{tag}] {msg}")


def warn(tag, msg):
    _logger.warning(f"[{tag}] Warning: {msg}")
