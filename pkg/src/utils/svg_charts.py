#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Deterministic SVG emitters for bar charts and the matrix heatmap.
确定性的 SVG 输出：柱状图与矩阵热力图

Output is a pure function of the inputs: fixed fonts, fixed two-decimal coordinates,
no timestamps, no external references. Each data mark carries ``data-*`` attributes so
the numbers can be read back from the file.
"""

from __future__ import annotations

from typing import Mapping, Sequence, Tuple
from xml.sax.saxutils import escape, quoteattr

SVG_NS = "http://www.w3.org/2000/svg"
FONT = "DejaVu Sans, Arial, sans-serif"

# heatmap ramp endpoints (lightest, darkest)
_LIGHT = (247, 251, 255)
_DARK = (8, 48, 107)

HEATMAP_WIDTH = 760
HEATMAP_HEIGHT = 360


def _nice_max(vmax: float) -> float:
    if vmax <= 0:
        return 1.0
    magnitude = 10 ** max(0, len(str(int(vmax))) - 1)
    for candidate in (1, 2, 5, 10):
        if vmax / magnitude <= candidate:
            return candidate * magnitude
    return 10 * magnitude


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def _header(width: int, height: int, title: str) -> list:
    return [
        f'<svg xmlns="{SVG_NS}" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" role="img" aria-label={quoteattr(title)}>',
        f'  <rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
        f'  <text x="{width // 2}" y="24" font-family="{FONT}" font-size="16" '
        f'font-weight="bold" text-anchor="middle">{escape(title)}</text>',
    ]


def bar_chart_svg(
    title: str,
    categories: Sequence[str],
    values: Sequence[int],
    *,
    y_label: str = "",
    bar_width: int = 28,
    height: int = 360,
    tick_count: int = 5,
) -> str:
    """
    Vertical bar chart, bars in the given order.
    竖向柱状图，按给定顺序绘制

    An empty series yields the axes and a "no data" placeholder.
    """
    if len(categories) != len(values):
        raise ValueError("categories and values must have the same length")
    mt, mr, mb, ml = 48, 24, 96, 56
    slot = bar_width + 12
    width = max(360, ml + mr + slot * len(categories))
    cw, ch = width - ml - mr, height - mt - mb
    x0, y0 = ml, mt + ch

    y_max = _nice_max(max(values, default=0))
    out = _header(width, height, title)
    out.append(f'  <line x1="{x0}" y1="{y0}" x2="{x0 + cw}" y2="{y0}" stroke="#333333" stroke-width="1"/>')
    out.append(f'  <line x1="{x0}" y1="{mt}" x2="{x0}" y2="{y0}" stroke="#333333" stroke-width="1"/>')
    for i in range(tick_count + 1):
        y = y0 - ch * i / tick_count
        tick = y_max * i / tick_count
        label = str(int(tick)) if float(tick).is_integer() else _fmt(tick)
        out.append(
            f'  <line x1="{x0}" y1="{_fmt(y)}" x2="{x0 + cw}" y2="{_fmt(y)}" stroke="#cccccc" stroke-width="0.5"/>'
        )
        out.append(
            f'  <text x="{x0 - 6}" y="{_fmt(y + 4)}" font-family="{FONT}" font-size="11" '
            f'text-anchor="end">{label}</text>'
        )
    if y_label:
        out.append(
            f'  <text x="14" y="{_fmt(mt + ch / 2)}" font-family="{FONT}" font-size="12" text-anchor="middle" '
            f'transform="rotate(-90 14 {_fmt(mt + ch / 2)})">{escape(y_label)}</text>'
        )

    if not categories:
        out.append(
            f'  <text x="{_fmt(x0 + cw / 2)}" y="{_fmt(mt + ch / 2)}" font-family="{FONT}" font-size="14" '
            f'text-anchor="middle" class="placeholder">no data</text>'
        )
    for index, (category, value) in enumerate(zip(categories, values)):
        bh = ch * value / y_max
        x = x0 + 6 + index * slot
        label_x = x + bar_width / 2
        out.append(
            f'  <rect class="bar" x="{_fmt(x)}" y="{_fmt(y0 - bh)}" width="{bar_width}" height="{_fmt(bh)}" '
            f'fill="#3b6ea5" data-category={quoteattr(str(category))} data-value="{value}"/>'
        )
        out.append(
            f'  <text x="{_fmt(label_x)}" y="{_fmt(y0 - bh - 4)}" font-family="{FONT}" font-size="11" '
            f'text-anchor="middle">{value}</text>'
        )
        out.append(
            f'  <text x="{_fmt(label_x)}" y="{y0 + 12}" font-family="{FONT}" font-size="11" text-anchor="end" '
            f'transform="rotate(-60 {_fmt(label_x)} {y0 + 12})">{escape(str(category))}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def shade(count: int, max_count: int) -> str:
    """Fill colour proportional to ``count / max_count``; lightest when max is 0."""
    ratio = 0.0 if max_count <= 0 else count / max_count
    channels = [round(light + (dark - light) * ratio) for light, dark in zip(_LIGHT, _DARK)]
    return "#{:02x}{:02x}{:02x}".format(*channels)


def _text_colour(count: int, max_count: int) -> str:
    return "#ffffff" if max_count > 0 and count / max_count > 0.5 else "#000000"


def heatmap_svg(
    title: str,
    rows: Sequence[str],
    columns: Sequence[str],
    counts: Mapping[Tuple[str, str], int],
) -> str:
    """
    Grid heatmap on a fixed canvas, count printed in every cell.
    固定画布尺寸的网格热力图，每个单元格标注计数
    """
    width, height = HEATMAP_WIDTH, HEATMAP_HEIGHT
    mt, ml, mr, mb = 64, 80, 16, 16
    n_rows, n_cols = max(1, len(rows)), max(1, len(columns))
    cw, ch = (width - ml - mr) / n_cols, (height - mt - mb) / n_rows
    max_count = max((counts.get((r, c), 0) for r in rows for c in columns), default=0)

    out = _header(width, height, title)
    for c, column in enumerate(columns):
        out.append(
            f'  <text x="{_fmt(ml + c * cw + cw / 2)}" y="{mt - 8}" font-family="{FONT}" font-size="12" '
            f'text-anchor="middle">{escape(column)}</text>'
        )
    for r, row in enumerate(rows):
        y = mt + r * ch
        out.append(
            f'  <text x="{ml - 8}" y="{_fmt(y + ch / 2 + 4)}" font-family="{FONT}" font-size="12" '
            f'text-anchor="end">{escape(row)}</text>'
        )
        for c, column in enumerate(columns):
            count = counts.get((row, column), 0)
            x = ml + c * cw
            out.append(
                f'  <rect class="cell" x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(cw)}" height="{_fmt(ch)}" '
                f'fill="{shade(count, max_count)}" stroke="#ffffff" stroke-width="1" '
                f'data-row={quoteattr(row)} data-column={quoteattr(column)} data-count="{count}"/>'
            )
            out.append(
                f'  <text x="{_fmt(x + cw / 2)}" y="{_fmt(y + ch / 2 + 5)}" font-family="{FONT}" font-size="14" '
                f'text-anchor="middle" fill="{_text_colour(count, max_count)}">{count}</text>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"
