#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Alignment of the consolidated set with a strategy's axis structure
整合指标集与战略主题轴结构的对齐

Builds the extended matrix (transversal axes + OTA as rows, vertical axes + OVA as
columns) from binary correspondences and derives its frequency table.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Mapping, Sequence, Tuple, Union

import numpy as np

from src.utils.input_validation import AnalysisError
from src.utils.logging_utils import get_logger
from src.utils.model import (
    OTA,
    OVA,
    AxisScheme,
    CorrespondenceEntry,
    ExtendedMatrix,
    Indicator,
)

logger = get_logger(__name__)

CELL_KEY_SEPARATOR = "|"


@dataclass(frozen=True)
class FrequencyTable:
    rows: Tuple[str, ...]
    columns: Tuple[str, ...]
    cell_counts: Mapping[Tuple[str, str], int]
    column_totals: Mapping[str, int]
    row_totals_distinct: Mapping[str, int]
    column_entries: Mapping[str, int]
    row_entries: Mapping[str, int]
    total_entries: int

    def count(self, row: str, column: str) -> int:
        return self.cell_counts[(row, column)]

    @property
    def max_count(self) -> int:
        return max(self.cell_counts.values(), default=0)


@dataclass(frozen=True)
class ActionWorkload:
    actions_per_axis: Mapping[str, int]
    total_actions: int
    min_actions: int
    max_actions: int
    per_action_checks: int
    per_cell_checks: int


def _codes(consolidated: Iterable[Union[Indicator, str]]) -> set:
    return {item.code if isinstance(item, Indicator) else str(item) for item in consolidated}


def build_matrix(
    correspondences: Sequence[CorrespondenceEntry],
    axis_scheme: AxisScheme,
    consolidated: Iterable[Union[Indicator, str]],
) -> ExtendedMatrix:
    """
    Place every correspondence into its cell of the extended matrix.
    将每条对应关系放入扩展矩阵的单元格

    Cells are sorted sets; a repeated (indicator, cell) row collapses with a warning.
    Raises AnalysisError for an indicator outside the consolidated set or an unknown axis.
    """
    rows = axis_scheme.transversal_ids + (OTA,)
    columns = axis_scheme.vertical_ids + (OVA,)
    allowed = _codes(consolidated)

    cells: Dict[Tuple[str, str], set] = {}
    for entry in correspondences:
        if entry.indicator not in allowed:
            raise AnalysisError(f"correspondence references non-consolidated indicator {entry.indicator}")
        if entry.transversal not in rows:
            raise AnalysisError(f"correspondence for {entry.indicator} references unknown row {entry.transversal!r}")
        if entry.vertical not in columns:
            raise AnalysisError(f"correspondence for {entry.indicator} references unknown column {entry.vertical!r}")
        members = cells.setdefault((entry.transversal, entry.vertical), set())
        if entry.indicator in members:
            logger.warning(
                "duplicate placement of %s in (%s, %s) collapsed",
                entry.indicator, entry.transversal, entry.vertical,
            )
        members.add(entry.indicator)

    return ExtendedMatrix(
        rows=rows,
        columns=columns,
        cells={key: tuple(sorted(codes)) for key, codes in sorted(cells.items())},
    )


def frequency_table(matrix: ExtendedMatrix) -> FrequencyTable:
    """
    Cell counts plus margins: entry counts and distinct-indicator counts per row and column.
    单元格计数及行列边际（条目数与去重指标数）
    """
    grid = np.zeros((len(matrix.rows), len(matrix.columns)), dtype=int)
    for r, row in enumerate(matrix.rows):
        for c, column in enumerate(matrix.columns):
            grid[r, c] = len(matrix.cell(row, column))

    column_sums = grid.sum(axis=0)
    row_sums = grid.sum(axis=1)
    return FrequencyTable(
        rows=matrix.rows,
        columns=matrix.columns,
        cell_counts={
            (row, column): int(grid[r, c])
            for r, row in enumerate(matrix.rows)
            for c, column in enumerate(matrix.columns)
        },
        column_totals={column: len(set(matrix.column_codes(column))) for column in matrix.columns},
        row_totals_distinct={row: len(set(matrix.row_codes(row))) for row in matrix.rows},
        column_entries={column: int(column_sums[c]) for c, column in enumerate(matrix.columns)},
        row_entries={row: int(row_sums[r]) for r, row in enumerate(matrix.rows)},
        total_entries=int(grid.sum()),
    )


def coverage_per_axis(matrix: ExtendedMatrix) -> Dict[str, int]:
    """Distinct indicators per axis: columns for vertical axes, rows for transversal axes."""
    coverage: Dict[str, int] = {}
    for column in matrix.interior_columns:
        coverage[column] = len(set(matrix.column_codes(column)))
    for row in matrix.interior_rows:
        coverage[row] = len(set(matrix.row_codes(row)))
    return coverage


def action_workload(
    axis_scheme: AxisScheme, consolidated: Iterable[Union[Indicator, str]]
) -> ActionWorkload:
    """
    Size of a per-action correspondence compared with the per-cell one.
    按战略行动逐一对应与按单元格对应的工作量对比
    """
    indicator_count = len(_codes(consolidated))
    per_axis = {axis_id: 0 for axis_id in axis_scheme.vertical_ids + axis_scheme.transversal_ids}
    for action in axis_scheme.actions:
        per_axis[action.axis_id] = per_axis.get(action.axis_id, 0) + 1
    total = len(axis_scheme.actions)
    counts = list(per_axis.values())
    cell_count = len(axis_scheme.vertical_ids) * len(axis_scheme.transversal_ids)
    return ActionWorkload(
        actions_per_axis=per_axis,
        total_actions=total,
        min_actions=min(counts) if total else 0,
        max_actions=max(counts) if total else 0,
        per_action_checks=indicator_count * total,
        per_cell_checks=indicator_count * cell_count,
    )


def matrix_to_json(matrix: ExtendedMatrix) -> Dict[str, Any]:
    return {
        "rows": list(matrix.rows),
        "columns": list(matrix.columns),
        "cells": {
            f"{row}{CELL_KEY_SEPARATOR}{column}": list(matrix.cell(row, column))
            for row in matrix.rows
            for column in matrix.columns
        },
    }


def matrix_from_json(data: Mapping[str, Any]) -> ExtendedMatrix:
    cells = {}
    for key, codes in data.get("cells", {}).items():
        row, _, column = key.partition(CELL_KEY_SEPARATOR)
        if codes:
            cells[(row, column)] = tuple(sorted(codes))
    return ExtendedMatrix(rows=tuple(data["rows"]), columns=tuple(data["columns"]), cells=cells)


def table_to_json(table: FrequencyTable) -> Dict[str, Any]:
    return {
        "rows": list(table.rows),
        "columns": list(table.columns),
        "cell_counts": {
            f"{row}{CELL_KEY_SEPARATOR}{column}": table.cell_counts[(row, column)]
            for row in table.rows
            for column in table.columns
        },
        "column_totals": dict(table.column_totals),
        "row_totals_distinct": dict(table.row_totals_distinct),
        "column_entries": dict(table.column_entries),
        "row_entries": dict(table.row_entries),
        "total_entries": table.total_entries,
    }


def memberships(matrix: ExtendedMatrix) -> List[Tuple[str, str, str]]:
    """(row, column, code) triples for every membership in the matrix, rows then columns."""
    return [
        (row, column, code)
        for row in matrix.rows
        for column in matrix.columns
        for code in matrix.cell(row, column)
    ]
