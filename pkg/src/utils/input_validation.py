#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""Input validation helpers for stage entrypoints and run configuration."""

from __future__ import annotations

from typing import Union


class ValidationError(ValueError):
    """Raised when a scalar input fails validation."""


class CodeFormatError(ValidationError):
    """Raised for a malformed indicator code; ``position`` is the offending offset."""

    def __init__(self, raw: str, position: int, reason: str) -> None:
        self.raw = raw
        self.position = position
        self.reason = reason
        super().__init__(f"malformed indicator code {raw!r} at position {position}: {reason}")


class AnalysisError(ValueError):
    """Raised by an analysis operation whose preconditions do not hold."""


STD_MODES = ("population", "sample")
AUTO = "auto"

_BOOL_TEXT = {"true": True, "false": False}


def validate_partial_weight(value: object, param_name: str = "partial_weight") -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise ValidationError(f"{param_name} must be a number in [0, 1]")
    try:
        weight = float(value)
    except ValueError as exc:
        raise ValidationError(f"{param_name} must be a number in [0, 1]") from exc
    if not 0.0 <= weight <= 1.0:
        raise ValidationError(f"{param_name} must be within [0, 1], got {weight}")
    return weight


def validate_std_mode(value: object, param_name: str = "std_mode") -> str:
    if not isinstance(value, str) or value not in STD_MODES:
        raise ValidationError(f"{param_name} must be one of {', '.join(STD_MODES)}")
    return value


def validate_standout_threshold(
    value: object, param_name: str = "standout_threshold"
) -> Union[int, str]:
    """Accept a non-negative integer (or its text form) or the literal ``auto``."""
    if isinstance(value, str):
        text = value.strip().lower()
        if text == AUTO:
            return AUTO
        if text.lstrip("-").isdigit():
            value = int(text)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(f"{param_name} must be an integer or '{AUTO}'")
    if value < 0:
        raise ValidationError(f"{param_name} must not be negative")
    return value


def validate_positive_int(value: object, param_name: str) -> int:
    if isinstance(value, str) and value.strip().isdigit():
        value = int(value.strip())
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(f"{param_name} must be an integer")
    if value <= 0:
        raise ValidationError(f"{param_name} must be greater than 0")
    return value


def parse_bool(value: str, param_name: str) -> bool:
    """Parse the dataset boolean spelling (``true`` / ``false``, case-insensitive)."""
    text = (value or "").strip().lower()
    if text not in _BOOL_TEXT:
        raise ValidationError(f"{param_name} must be 'true' or 'false', got {value!r}")
    return _BOOL_TEXT[text]

