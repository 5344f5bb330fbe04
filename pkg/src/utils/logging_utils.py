#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""Shared logging helpers.

Every module logs through ``get_logger(__name__)``. Records go to a UTF-8 file under the
repo ``logs/`` folder (or ``$STRATSCOPE_LOG_DIR``); the CLI additionally attaches a stderr
handler so warnings reach the error stream while results stay on stdout.

Global logging configuration is left untouched (no logging.basicConfig()).
"""

from __future__ import annotations

import logging
import os
import sys
from pathlib import Path


ROOT_LOGGER_NAME = "stratscope"
LOG_DIR_ENV = "STRATSCOPE_LOG_DIR"


class _StderrHandler(logging.StreamHandler):
    """Marker subclass so the stderr handler is attached at most once."""

    def __init__(self) -> None:
        super().__init__(stream=None)

    @property  # type: ignore[override]
    def stream(self):
        # Resolve lazily so redirected sys.stderr (tests, capture) is honoured.
        return sys.stderr

    @stream.setter
    def stream(self, _value) -> None:
        return


def _get_repo_root() -> Path:
    # This file is located at: <repo>/src/utils/logging_utils.py
    return Path(__file__).resolve().parents[2]


def get_log_dir() -> Path:
    override = os.environ.get(LOG_DIR_ENV)
    return Path(override) if override else _get_repo_root() / "logs"


def _configure_root(level: int, log_file: str | None) -> logging.Logger:
    root = logging.getLogger(ROOT_LOGGER_NAME)
    if root.level == logging.NOTSET:
        root.setLevel(level)

    log_path = str((get_log_dir() / (log_file or f"{ROOT_LOGGER_NAME}.log")).resolve())
    already_has_same_file_handler = any(
        isinstance(h, logging.FileHandler) and getattr(h, "baseFilename", None) == log_path
        for h in root.handlers
    )
    if not already_has_same_file_handler:
        try:
            os.makedirs(os.path.dirname(log_path), exist_ok=True)
            # delay=True: the file only appears once something is logged.
            handler = logging.FileHandler(log_path, encoding="utf-8", delay=True)
        except OSError:
            handler = None
        if handler is not None:
            handler.setFormatter(
                logging.Formatter(
                    fmt="%(asctime)s %(levelname)s %(name)s: %(message)s",
                    datefmt="%Y-%m-%d %H:%M:%S",
                )
            )
            root.addHandler(handler)

    # Avoid double-logging if root logging is configured elsewhere.
    root.propagate = False
    return root


def get_logger(name: str, *, level: int = logging.INFO, log_file: str | None = None) -> logging.Logger:
    """Return a ``stratscope.*`` logger backed by the shared file handler.

    Handlers live on the ``stratscope`` root logger and are added only once per log file.
    """

    _configure_root(level, log_file)
    if name == ROOT_LOGGER_NAME or name.startswith(ROOT_LOGGER_NAME + "."):
        return logging.getLogger(name)
    return logging.getLogger(f"{ROOT_LOGGER_NAME}.{name}")


def set_log_level(level: str | int) -> None:
    """Apply ``log_level`` from the run configuration to every stratscope logger."""
    numeric = logging.getLevelName(level) if isinstance(level, str) else level
    if not isinstance(numeric, int):
        raise ValueError(f"unknown log level: {level!r}")
    logging.getLogger(ROOT_LOGGER_NAME).setLevel(numeric)


def attach_stderr_handler(level: int = logging.WARNING) -> logging.Handler:
    """Route warnings and errors to stderr (once)."""
    root = logging.getLogger(ROOT_LOGGER_NAME)
    for handler in root.handlers:
        if isinstance(handler, _StderrHandler):
            handler.setLevel(level)
            return handler
    handler = _StderrHandler()
    handler.setLevel(level)
    handler.setFormatter(logging.Formatter(fmt="%(levelname)s: %(message)s"))
    root.addHandler(handler)
    return handler
