#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Common utility functions for the project
通用工具函数
"""

from __future__ import annotations

import hashlib
import json
from decimal import ROUND_HALF_EVEN, Decimal
from pathlib import Path
from typing import Any, List, Mapping, Sequence, Union

DECIMALS = 4
_QUANTUM = Decimal(1).scaleb(-DECIMALS)


def round_half_even(value: float) -> float:
    """
    Round to the fixed report precision with banker's rounding
    按固定精度（四位小数）进行银行家舍入

    The float's shortest repr is rounded, so results do not depend on the platform.
    """
    return float(Decimal(repr(float(value))).quantize(_QUANTUM, rounding=ROUND_HALF_EVEN))


def format_number(value: Union[int, float]) -> str:
    """
    Format a number for reports: integers verbatim, reals with exactly four decimals
    报告数值格式：整数原样输出，实数固定四位小数
    """
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return str(Decimal(repr(float(value))).quantize(_QUANTUM, rounding=ROUND_HALF_EVEN))


def round_floats(obj: Any) -> Any:
    """Recursively apply ``round_half_even`` to every float in a JSON-like structure."""
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, float):
        return round_half_even(obj)
    if isinstance(obj, Mapping):
        return {str(k): round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v) for v in obj]
    return obj


def dumps_json(obj: Any) -> str:
    """Deterministic JSON text: rounded floats, sorted keys, two-space indent, trailing newline."""
    return json.dumps(round_floats(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_text(path: Union[str, Path], text: str) -> Path:
    """Write UTF-8 text with ``\\n`` line endings on every platform."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with open(target, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)
    return target


def sha256_file(path: Union[str, Path]) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def format_table(headers: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    """
    Render rows as a left-aligned plain-text table for terminal output
    将行数据渲染为左对齐的纯文本表格
    """
    cells: List[List[str]] = [[str(h) for h in headers]]
    for row in rows:
        cells.append([format_number(v) if isinstance(v, (int, float)) else str(v) for v in row])
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = []
    for index, row in enumerate(cells):
        lines.append("  ".join(value.ljust(widths[i]) for i, value in enumerate(row)).rstrip())
        if index == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)

