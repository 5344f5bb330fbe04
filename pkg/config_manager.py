#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
配置管理模块 / Configuration Management Module
处理配置文件的加载、验证和优先级合并 / Load, validate and layer run configuration

Precedence: command-line flags > ``config.json`` in the data directory > defaults.
"""

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

from opentelemetry_integration import get_default_opentelemetry_config
from src.utils.ingest import CONFIG_FILE, DatasetError, read_config_file
from src.utils.input_validation import (
    ValidationError,
    validate_partial_weight,
    validate_positive_int,
    validate_standout_threshold,
    validate_std_mode,
)
from src.utils.language_resources import get_available_languages, get_text
from src.utils.logging_utils import get_logger

logger = get_logger(__name__)

DATA_DIR_ENV = "STRATSCOPE_DATA_DIR"
DEFAULT_OUT_DIR = "out"
VALID_LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
ANALYSIS_KEYS = ("partial_weight", "std_mode", "standout_threshold", "min_axis_coverage")
KNOWN_KEYS = ANALYSIS_KEYS + ("log_level", "language", "opentelemetry")


@dataclass(frozen=True)
class RunConfig:
    data_dir: Path
    out_dir: Path = Path(DEFAULT_OUT_DIR)
    partial_weight: float = 1.0
    std_mode: str = "population"
    standout_threshold: Union[int, str] = "auto"
    min_axis_coverage: int = 3
    log_level: str = "INFO"
    language: str = "en"
    opentelemetry: Mapping[str, Any] = field(default_factory=get_default_opentelemetry_config)

    def analysis_settings(self) -> Dict[str, Any]:
        """The four settings that change analysis results."""
        return {key: getattr(self, key) for key in ANALYSIS_KEYS}


def get_default_config() -> Dict[str, Any]:
    """获取默认配置 / Get default configuration"""
    return {
        "partial_weight": 1.0,
        "std_mode": "population",
        "standout_threshold": "auto",
        "min_axis_coverage": 3,
        "log_level": "INFO",
        "language": "en",
        "opentelemetry": get_default_opentelemetry_config(),
    }


def validate_and_complete_config(config: Dict[str, Any]) -> Dict[str, Any]:
    """验证和补充配置 / Fill missing keys with defaults; unknown keys are dropped with a warning"""
    completed = get_default_config()
    for key, value in config.items():
        if key not in KNOWN_KEYS:
            logger.warning(get_text("config_unknown_key", key))
            continue
        if key == "opentelemetry" and isinstance(value, dict):
            completed[key] = {**completed[key], **value}
        else:
            completed[key] = value
    return completed


def load_config(config_path: Union[str, Path]) -> Dict[str, Any]:
    """
    加载配置文件 / Load configuration file

    A missing file yields the defaults. Raises DatasetError when the file is not valid
    JSON or an analysis key has an invalid value.
    """
    config, diagnostics = read_config_file(config_path)
    if diagnostics:
        raise DatasetError(diagnostics)
    return validate_and_complete_config(config)


def validate_config(config: Dict[str, Any]) -> Dict[str, Any]:
    """验证配置的有效性 / Validate configuration validity"""
    errors = []
    checks = {
        "partial_weight": validate_partial_weight,
        "std_mode": validate_std_mode,
        "standout_threshold": validate_standout_threshold,
        "min_axis_coverage": lambda v: validate_positive_int(v, "min_axis_coverage"),
    }
    for key, check in checks.items():
        if key in config:
            try:
                check(config[key])
            except ValidationError as exc:
                errors.append(str(exc))

    if config.get("log_level", "INFO") not in VALID_LOG_LEVELS:
        errors.append(f"log_level must be one of {VALID_LOG_LEVELS}")

    if config.get("language", "en") not in get_available_languages():
        errors.append(f"language must be one of {get_available_languages()}")

    otel_config = config.get("opentelemetry", {})
    if otel_config.get("enabled", False):
        if otel_config.get("exporter") not in ["console", "otlp"]:
            errors.append("opentelemetry.exporter must be 'console' or 'otlp'")

    return {"valid": len(errors) == 0, "errors": errors}


def resolve_data_dir(flag_value: Optional[str], environ: Mapping[str, str]) -> Path:
    """``--data-dir`` > ``STRATSCOPE_DATA_DIR`` > error"""
    value = flag_value or environ.get(DATA_DIR_ENV)
    if not value:
        raise ValidationError(get_text("data_dir_missing"))
    return Path(value)


def build_run_config(args: Any, environ: Optional[Mapping[str, str]] = None) -> RunConfig:
    """
    合并命令行参数、配置文件与默认值 / Layer flags over ``config.json`` over defaults

    ``args`` is an argparse namespace (absent flags are ``None``). Raises ValidationError
    for invalid values and DatasetError for an unreadable ``config.json``.
    """
    env = os.environ if environ is None else environ
    data_dir = resolve_data_dir(getattr(args, "data_dir", None), env)
    config = load_config(data_dir / CONFIG_FILE)

    for key in KNOWN_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            config[key] = value

    result = validate_config(config)
    if not result["valid"]:
        raise ValidationError(get_text("config_invalid", "; ".join(result["errors"])))

    return RunConfig(
        data_dir=data_dir,
        out_dir=Path(getattr(args, "out_dir", None) or DEFAULT_OUT_DIR),
        partial_weight=validate_partial_weight(config["partial_weight"]),
        std_mode=validate_std_mode(config["std_mode"]),
        standout_threshold=validate_standout_threshold(config["standout_threshold"]),
        min_axis_coverage=validate_positive_int(config["min_axis_coverage"], "min_axis_coverage"),
        log_level=config["log_level"],
        language=config["language"],
        opentelemetry=config["opentelemetry"],
    )
