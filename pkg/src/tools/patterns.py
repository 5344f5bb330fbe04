#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Coverage patterns of the extended matrix
扩展矩阵的覆盖模式

Blind spot, inside/outside overflow ratios, coverage-gap flags, and the comparison of
derived figures against values printed in a publication.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from src.tools.alignment import FrequencyTable, coverage_per_axis
from src.utils.input_validation import AnalysisError
from src.utils.logging_utils import get_logger
from src.utils.model import OTA, OVA, ExtendedMatrix, Indicator

logger = get_logger(__name__)

SHARE_TOLERANCE = 5e-5

Pair = Tuple[int, int]


@dataclass(frozen=True)
class OverflowRatios:
    """Integer (outside, inside) pairs; never reduced."""

    vertical_overflow: Pair
    transversal_overflow: Pair
    per_axis_overflow: Mapping[str, Pair]
    per_transversal_overflow: Mapping[str, Pair]
    outside_dominant_verticals: Tuple[str, ...]


@dataclass(frozen=True)
class PatternReport:
    blind_spot: Tuple[str, ...]
    blind_spot_share: float
    vertical_overflow: Pair
    transversal_overflow: Pair
    per_axis_overflow: Mapping[str, Pair]
    per_transversal_overflow: Mapping[str, Pair]
    outside_dominant_verticals: Tuple[str, ...]
    coverage: Mapping[str, int]
    min_axis_coverage: int
    low_coverage_axes: Tuple[str, ...]
    uncovered_axes: Tuple[str, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "blind_spot": list(self.blind_spot),
            "blind_spot_share": self.blind_spot_share,
            "vertical_overflow": list(self.vertical_overflow),
            "transversal_overflow": list(self.transversal_overflow),
            "per_axis_overflow": {k: list(v) for k, v in self.per_axis_overflow.items()},
            "per_transversal_overflow": {k: list(v) for k, v in self.per_transversal_overflow.items()},
            "outside_dominant_verticals": list(self.outside_dominant_verticals),
            "coverage": dict(self.coverage),
            "min_axis_coverage": self.min_axis_coverage,
            "low_coverage_axes": list(self.low_coverage_axes),
            "uncovered_axes": list(self.uncovered_axes),
        }


@dataclass(frozen=True)
class ErratumCheck:
    quantity: str
    published: Any
    derived: Any
    agrees: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "quantity": self.quantity,
            "published": self.published,
            "derived": self.derived,
            "agrees": self.agrees,
        }


def detect_blind_spot(
    matrix: ExtendedMatrix, consolidated: Sequence[Union[Indicator, str]]
) -> Tuple[Tuple[str, ...], float]:
    """
    Indicators in the (OTA, OVA) corner and their share of the consolidated set.
    位于 (OTA, OVA) 角落单元格的指标及其占比
    """
    if not consolidated:
        raise AnalysisError("blind-spot share is undefined for an empty consolidated set")
    codes = tuple(matrix.cell(OTA, OVA))
    return codes, len(codes) / len(consolidated)


def overflow_ratios(matrix: ExtendedMatrix) -> OverflowRatios:
    """
    Entry counts (with multiplicity) inside and outside the ideal axis grid.
    理想轴网格内外的条目计数

    vertical: OVA column vs everything else; transversal: OTA row without the corner vs
    the interior block; per vertical axis: (OTA, v) vs interior column v; per transversal
    axis: (t, OVA) vs interior row t.
    """
    def entries(row: str, column: str) -> int:
        return len(matrix.cell(row, column))

    rows, columns = matrix.interior_rows, matrix.interior_columns
    total = sum(entries(r, c) for r in matrix.rows for c in matrix.columns)
    ova_column = sum(entries(r, OVA) for r in matrix.rows)
    interior = sum(entries(r, c) for r in rows for c in columns)
    ota_row = sum(entries(OTA, c) for c in columns)

    per_axis = {c: (entries(OTA, c), sum(entries(r, c) for r in rows)) for c in columns}
    per_transversal = {r: (entries(r, OVA), sum(entries(r, c) for c in columns)) for r in rows}
    dominant = tuple(c for c in columns if per_axis[c][0] > per_axis[c][1])
    return OverflowRatios(
        vertical_overflow=(ova_column, total - ova_column),
        transversal_overflow=(ota_row, interior),
        per_axis_overflow=per_axis,
        per_transversal_overflow=per_transversal,
        outside_dominant_verticals=dominant,
    )


def flag_coverage(
    coverage: Mapping[str, int], min_axis_coverage: int
) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
    """Axes below ``min_axis_coverage`` and axes with no indicator, in axis order."""
    if isinstance(min_axis_coverage, bool) or not isinstance(min_axis_coverage, int) or min_axis_coverage < 1:
        raise AnalysisError(f"min_axis_coverage must be an integer >= 1, got {min_axis_coverage!r}")
    low = tuple(axis for axis, count in coverage.items() if count < min_axis_coverage)
    uncovered = tuple(axis for axis, count in coverage.items() if count == 0)
    return low, uncovered


def build_pattern_report(
    matrix: ExtendedMatrix,
    consolidated: Sequence[Union[Indicator, str]],
    min_axis_coverage: int,
) -> PatternReport:
    blind_spot, share = detect_blind_spot(matrix, consolidated)
    ratios = overflow_ratios(matrix)
    coverage = coverage_per_axis(matrix)
    low, uncovered = flag_coverage(coverage, min_axis_coverage)
    return PatternReport(
        blind_spot=blind_spot,
        blind_spot_share=share,
        vertical_overflow=ratios.vertical_overflow,
        transversal_overflow=ratios.transversal_overflow,
        per_axis_overflow=ratios.per_axis_overflow,
        per_transversal_overflow=ratios.per_transversal_overflow,
        outside_dominant_verticals=ratios.outside_dominant_verticals,
        coverage=coverage,
        min_axis_coverage=min_axis_coverage,
        low_coverage_axes=low,
        uncovered_axes=uncovered,
    )


def derived_quantities(table: FrequencyTable, report: PatternReport) -> Dict[str, Any]:
    """Derived figures keyed like ``published.json``."""
    return {
        "row_totals": dict(table.row_totals_distinct),
        "column_totals": dict(table.column_totals),
        "vertical_overflow": list(report.vertical_overflow),
        "transversal_overflow": list(report.transversal_overflow),
        "blind_spot": list(report.blind_spot),
        "blind_spot_share": report.blind_spot_share,
    }


def _agrees(published: Any, derived: Any) -> bool:
    if derived is None:
        return False
    if isinstance(published, (int, float)) and not isinstance(published, bool) and isinstance(derived, (int, float)):
        if isinstance(published, float) or isinstance(derived, float):
            return math.isclose(float(published), float(derived), rel_tol=0.0, abs_tol=SHARE_TOLERANCE)
        return published == derived
    if isinstance(published, (list, tuple)) and isinstance(derived, (list, tuple)):
        if all(isinstance(v, str) for v in published):
            return sorted(published) == sorted(derived)
        return list(published) == list(derived)
    return published == derived


def compare_published(derived: Mapping[str, Any], published: Optional[Mapping[str, Any]]) -> List[ErratumCheck]:
    """
    One check per published quantity; mappings expand to one check per key.
    对每个已发表数值进行核对；映射类型按键逐一核对

    Disagreements are logged at INFO; the CLI reports them on stderr. Unknown published
    keys are skipped with a warning.
    """
    if not published:
        return []
    checks: List[ErratumCheck] = []
    for key in sorted(published):
        value = published[key]
        if key not in derived:
            logger.warning("published.json: ignoring unknown quantity %r", key)
            continue
        mine = derived[key]
        if isinstance(value, Mapping):
            for sub in sorted(value):
                got = mine.get(sub) if isinstance(mine, Mapping) else None
                checks.append(ErratumCheck(f"{key}.{sub}", value[sub], got, _agrees(value[sub], got)))
        else:
            checks.append(ErratumCheck(key, value, mine, _agrees(value, mine)))
    for check in checks:
        if not check.agrees:
            logger.info(
                "erratum check: %s is published as %s but derives to %s",
                check.quantity, check.published, check.derived,
            )
    return checks


def disagreements(checks: Iterable[ErratumCheck]) -> List[ErratumCheck]:
    return [c for c in checks if not c.agrees]

