"""Logging utilities for the polyval solver suite."""

import logging
import sys
from typing import Dict, Optional


# Every logger handed out by setup_logger, so the CLI can re-level them after config load
_registry: Dict[str, logging.Logger] = {}

_FILE_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
_CONSOLE_FORMAT = '%(levelname)s - %(name)s - %(message)s'


def setup_logger(name: str, log_file: Optional[str] = None, level: str = "WARNING",
                 console: bool = True) -> logging.Logger:
    """
    Set up a logger for the polyval system.

    Console output goes to stderr; stdout carries only JSON/CSV results.
    """
    logger = logging.getLogger(name)
    logger.setLevel(getattr(logging, level.upper()))
    logger.propagate = False

    # Clear existing handlers
    logger.handlers.clear()

    if log_file:
        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        file_handler.setLevel(getattr(logging, level.upper()))
        file_handler.setFormatter(logging.Formatter(_FILE_FORMAT, datefmt='%Y-%m-%d %H:%M:%S'))
        logger.addHandler(file_handler)

    if console:
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(getattr(logging, level.upper()))
        console_handler.setFormatter(logging.Formatter(_CONSOLE_FORMAT))
        logger.addHandler(console_handler)

    _registry[name] = logger
    return logger


def configure_logging(level: str = "WARNING", log_file: Optional[str] = None,
                      console: bool = True) -> None:
    """Re-apply level and handlers to every logger created so far."""
    for name in list(_registry):
        setup_logger(name, log_file=log_file, level=level, console=console)
