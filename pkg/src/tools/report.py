#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Report rendering
报告生成

Markdown and CSV tables, SVG figures, the full report document with its JSON mirror, and
the output manifest. Every renderer is a pure function of analysis outputs; reports are
always English so that bytes do not depend on the CLI language.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Any, Dict, List, Mapping, Sequence, Tuple, Union

from src.tools.alignment import FrequencyTable, coverage_per_axis, matrix_to_json, table_to_json
from src.tools.prevalence import MatchCounts, Prevalence
from src.utils.common_tools import dumps_json, format_number, round_floats, sha256_file, write_text
from src.utils.input_validation import AnalysisError
from src.utils.logging_utils import get_logger
from src.utils.model import ExtendedMatrix
from src.utils.svg_charts import bar_chart_svg, heatmap_svg

if TYPE_CHECKING:
    from src.tools.pipeline import AnalysisResults

logger = get_logger(__name__)

REPORT_FILES = (
    "report.md",
    "report.json",
    "matrix.csv",
    "heatmap.svg",
    "countries.svg",
    "indicators.svg",
)
MANIFEST_FILE = "manifest.json"

FILE_ROLES: Dict[str, Tuple[str, ...]] = {
    "report.md": ("full_report", "prevalence_table", "pattern_summary"),
    "report.json": ("full_report", "prevalence_table", "frequency_table", "pattern_summary"),
    "matrix.csv": ("matrix_table", "frequency_table"),
    "heatmap.svg": ("matrix_heatmap",),
    "countries.svg": ("standout_chart",),
    "indicators.svg": ("indicator_chart",),
}

REQUIRED_STAGES = (
    "frequencies",
    "stats",
    "labels",
    "standouts",
    "strata",
    "consolidation",
    "matrix",
    "table",
    "patterns",
)


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    roles: Tuple[str, ...]
    sha256: str


@dataclass(frozen=True)
class ReportManifest:
    files: Tuple[ManifestEntry, ...]
    manifest_path: str = MANIFEST_FILE

    def to_dict(self) -> Dict[str, Any]:
        return {
            "files": [
                {"path": entry.path, "roles": list(entry.roles), "sha256": entry.sha256}
                for entry in self.files
            ]
        }

    @property
    def paths(self) -> Tuple[str, ...]:
        return tuple(entry.path for entry in self.files) + (self.manifest_path,)


def _cell_text(value: Any) -> str:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return format_number(value)
    return str(value).replace("|", "\\|")


def _md_table(headers: Sequence[str], rows: Sequence[Sequence[Any]]) -> List[str]:
    lines = ["| " + " | ".join(_cell_text(h) for h in headers) + " |"]
    lines.append("|" + "|".join(" --- " for _ in headers) + "|")
    for row in rows:
        lines.append("| " + " | ".join(_cell_text(v) for v in row) + " |")
    return lines


def _codes(codes: Sequence[str]) -> str:
    return ", ".join(codes) if codes else "-"


def _pair(pair: Sequence[int]) -> str:
    return f"{pair[0]}:{pair[1]}"


def render_matrix(matrix: ExtendedMatrix, table: FrequencyTable) -> Tuple[str, str]:
    """
    The extended matrix as a markdown grid and a CSV cross-tab of counts.
    扩展矩阵的 Markdown 网格与计数交叉表 CSV

    Rows end with the distinct-indicator total; the last row holds the column totals and
    the total number of entries.
    """
    headers = ["Axis", *matrix.columns, "#Ind."]
    rows = [
        [row, *(_codes(matrix.cell(row, column)) for column in matrix.columns), table.row_totals_distinct[row]]
        for row in matrix.rows
    ]
    rows.append(["#Ind.", *(table.column_totals[c] for c in matrix.columns), table.total_entries])
    markdown = "\n".join(_md_table(headers, rows)) + "\n"

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["axis", *matrix.columns, "distinct_total"])
    for row in matrix.rows:
        writer.writerow([row, *(table.count(row, c) for c in matrix.columns), table.row_totals_distinct[row]])
    writer.writerow(["distinct_total", *(table.column_totals[c] for c in matrix.columns), table.total_entries])
    return markdown, buffer.getvalue()


def render_heatmap(table: FrequencyTable) -> str:
    """Heatmap of cell counts, darkest at the largest count."""
    return heatmap_svg("Relevant indicators per axis intersection", table.rows, table.columns, table.cell_counts)


def _sorted_bars(counts: Mapping[str, int]) -> Tuple[List[str], List[int]]:
    ordered = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return [key for key, _ in ordered], [value for _, value in ordered]


def render_bar_charts(match_counts: MatchCounts) -> Tuple[str, str]:
    """
    Per-country indicator counts and per-indicator country counts.
    各国匹配指标数与各指标匹配国家数

    Bars sort by descending count, then by id. Indicators without a match are not drawn.
    """
    countries, country_values = _sorted_bars(match_counts.per_country)
    indicators, indicator_values = _sorted_bars(
        {code: count for code, count in match_counts.per_indicator.items() if count > 0}
    )
    countries_svg = bar_chart_svg(
        "Indicators found per strategy", countries, country_values, y_label="indicators"
    )
    indicators_svg = bar_chart_svg(
        "Strategies using each indicator", indicators, indicator_values, y_label="countries"
    )
    return countries_svg, indicators_svg


def _require(results: "AnalysisResults", stages: Sequence[str] = REQUIRED_STAGES) -> None:
    missing = [name for name in stages if getattr(results, name, None) is None]
    if missing:
        raise AnalysisError(f"missing upstream stage output(s): {', '.join(missing)}")


def prevalence_json(results: "AnalysisResults") -> Dict[str, Any]:
    _require(results, ("frequencies", "stats", "labels"))
    stats = results.stats
    return {
        "frequencies": {r.indicator: r.frequency for r in results.frequencies},
        "stats": {
            "mean": stats.mean,
            "std_dev": stats.std_dev,
            "hp_threshold": stats.hp_threshold,
            "irrelevant_threshold": stats.irrelevant_threshold,
        },
        "labels": {label.indicator: label.label.value for label in results.labels},
        "label_counts": {p.value: sum(1 for label in results.labels if label.label == p) for p in Prevalence},
        "dimension_summary": [
            {
                "dimension": d.dimension,
                "name": d.name,
                "HighlyPrevalent": list(d.highly_prevalent),
                "Prevalent": list(d.prevalent),
                "Irrelevant": list(d.irrelevant),
            }
            for d in results.dimension_summary
        ],
        "match_counts": {
            "per_country": dict(results.match_counts.per_country) if results.match_counts else {},
            "per_indicator": dict(results.match_counts.per_indicator) if results.match_counts else {},
        },
    }


def standout_json(results: "AnalysisResults") -> Dict[str, Any]:
    _require(results, ("standouts",))
    return {
        "counts": dict(results.standouts.counts),
        "threshold": results.standouts.threshold,
        "auto": results.standouts.auto,
        "standouts": list(results.standouts.standouts),
    }


def strata_json(results: "AnalysisResults") -> Dict[str, Any]:
    _require(results, ("strata",))
    return {cid: stratum.value for cid, stratum in results.strata.items()}


def consolidation_json(results: "AnalysisResults") -> Dict[str, Any]:
    _require(results, ("consolidation",))
    consolidation = results.consolidation
    return {
        "count": len(consolidation.indicators),
        "codes": list(consolidation.codes),
        "highly_prevalent": list(consolidation.highly_prevalent),
        "proposed": list(consolidation.proposed),
        "new_dimensions": {d.code: d.name for d in consolidation.new_dimensions},
        "missing_from_recorded": list(consolidation.missing_from_recorded),
        "unexpected_in_recorded": list(consolidation.unexpected_in_recorded),
    }


def alignment_json(results: "AnalysisResults") -> Dict[str, Any]:
    _require(results, ("matrix", "table"))
    workload = results.workload
    return {
        "matrix": matrix_to_json(results.matrix),
        "frequency_table": table_to_json(results.table),
        "coverage": coverage_per_axis(results.matrix),
        "action_workload": None
        if workload is None
        else {
            "actions_per_axis": dict(workload.actions_per_axis),
            "total_actions": workload.total_actions,
            "min_actions": workload.min_actions,
            "max_actions": workload.max_actions,
            "per_action_checks": workload.per_action_checks,
            "per_cell_checks": workload.per_cell_checks,
        },
    }


def patterns_json(results: "AnalysisResults") -> Dict[str, Any]:
    _require(results, ("patterns", "consolidation"))
    patterns = results.patterns
    return {
        **patterns.to_dict(),
        "blind_spot_size": len(patterns.blind_spot),
        "consolidated_size": len(results.consolidation.indicators),
        "erratum_checks": [check.to_dict() for check in results.erratum_checks],
    }


def results_to_json(results: "AnalysisResults") -> Dict[str, Any]:
    """JSON mirror of every number and list in the report."""
    _require(results)
    bundle = results.bundle
    data: Dict[str, Any] = {
        "settings": dict(results.settings),
        "dataset": {
            "indicators": len(bundle.indicators),
            "countries": len(bundle.countries),
            "document_countries": len(bundle.document_countries),
            "matches": len(bundle.matches),
            "axes": len(bundle.axis_scheme.axes),
            "correspondences": len(bundle.correspondences),
        },
        "stage1": {
            **prevalence_json(results),
            "standouts": standout_json(results),
            "strata": strata_json(results),
            "consolidation": consolidation_json(results),
        },
        "stage2": alignment_json(results),
        "stage3": patterns_json(results),
    }
    return round_floats(data)


def _stage1_lines(results: "AnalysisResults") -> List[str]:
    bundle = results.bundle
    stats = results.stats
    names = {i.code: i.name for i in bundle.indicators}
    country_names = {c.id: c.name for c in bundle.countries}
    lines = ["## Stage 1: Indicator prevalence", "", "### Settings", ""]
    lines += _md_table(["Setting", "Value"], [[k, v] for k, v in sorted(results.settings.items())])
    lines += ["", "### Frequency statistics", ""]
    lines += _md_table(
        ["Statistic", "Value"],
        [
            ["mean", stats.mean],
            ["std_dev", stats.std_dev],
            ["hp_threshold", stats.hp_threshold],
            ["irrelevant_threshold", stats.irrelevant_threshold],
        ],
    )
    lines += ["", "### Prevalence by dimension", ""]
    lines += _md_table(
        ["Dimension", "Name", "HighlyPrevalent", "Prevalent", "Irrelevant"],
        [
            [d.dimension, d.name, _codes(d.highly_prevalent), _codes(d.prevalent), _codes(d.irrelevant)]
            for d in results.dimension_summary
        ],
    )
    lines += ["", "### Frequencies and labels", ""]
    lines += _md_table(
        ["Code", "Name", "Frequency", "Label"],
        [[label.indicator, names.get(label.indicator, ""), label.frequency, label.label.value] for label in results.labels],
    )
    standouts = results.standouts
    lines += ["", "### Standout strategies", ""]
    mode = "auto" if standouts.auto else "configured"
    lines.append(f"Threshold ({mode}): {format_number(standouts.threshold)}")
    lines.append("")
    lines += _md_table(
        ["Country", "Name", "Matched indicators", "Standout"],
        [
            [cid, country_names.get(cid, ""), count, "yes" if cid in standouts.standouts else "no"]
            for cid, count in sorted(standouts.counts.items())
        ],
    )
    lines += ["", "### Country strata", ""]
    by_stratum: Dict[str, List[str]] = {}
    for cid, stratum in results.strata.items():
        by_stratum.setdefault(stratum.value, []).append(cid)
    lines += _md_table(
        ["Stratum", "Countries"],
        [[name, _codes(sorted(by_stratum.get(name, [])))] for name in ("Systematic", "Planned", "Neither", "NoNais")],
    )
    consolidation = results.consolidation
    origin = {code: "highly prevalent" for code in consolidation.highly_prevalent}
    origin.update({code: "proposal" for code in consolidation.proposed})
    lines += ["", "### Consolidated set", ""]
    lines.append(f"Consolidated indicators: {len(consolidation.indicators)}")
    if consolidation.new_dimensions:
        lines.append(
            "New dimensions: "
            + ", ".join(f"{d.code} ({d.name})" for d in consolidation.new_dimensions)
        )
    lines.append("")
    lines += _md_table(
        ["Code", "Dimension", "Name", "Origin"],
        [[i.code, i.dimension, i.name, origin.get(i.code, "")] for i in consolidation.indicators],
    )
    if consolidation.missing_from_recorded or consolidation.unexpected_in_recorded:
        lines += [
            "",
            "> **Dataset check:** derived codes not recorded as consolidated: "
            f"{_codes(consolidation.missing_from_recorded)}; recorded but not derived: "
            f"{_codes(consolidation.unexpected_in_recorded)}.",
        ]
    return lines


def _stage2_lines(results: "AnalysisResults") -> List[str]:
    scheme = results.bundle.axis_scheme
    table = results.table
    matrix_md, _ = render_matrix(results.matrix, table)
    lines = ["## Stage 2: Alignment", "", "### Correspondence matrix", "", matrix_md.rstrip("\n")]
    lines += ["", "### Frequency table", ""]
    rows = [[row, *(table.count(row, c) for c in table.columns), table.row_totals_distinct[row]] for row in table.rows]
    rows.append(["#Ind.", *(table.column_totals[c] for c in table.columns), table.total_entries])
    lines += _md_table(["Axis", *table.columns, "#Ind."], rows)
    lines += ["", "### Axis coverage", ""]
    lines += _md_table(
        ["Axis", "Name", "Kind", "Indicators"],
        [
            [axis_id, scheme.axis(axis_id).name if scheme.axis(axis_id) else axis_id,
             scheme.axis(axis_id).kind.value if scheme.axis(axis_id) else "", count]
            for axis_id, count in results.patterns.coverage.items()
        ],
    )
    workload = results.workload
    if workload is not None and workload.total_actions:
        lines += ["", "### Strategic actions", ""]
        lines += _md_table(["Axis", "Actions"], [[k, v] for k, v in workload.actions_per_axis.items()])
        lines += [
            "",
            f"Total actions: {workload.total_actions} (per axis {workload.min_actions} to {workload.max_actions}). "
            f"Per-action correspondence would need {workload.per_action_checks} checks; "
            f"per-cell correspondence needs {workload.per_cell_checks}.",
        ]
    return lines


def _stage3_lines(results: "AnalysisResults") -> List[str]:
    patterns = results.patterns
    lines = ["## Stage 3: Patterns", ""]
    lines.append(
        f"- Blind spot: {_codes(patterns.blind_spot)} ({len(patterns.blind_spot)} of "
        f"{len(results.consolidation.indicators)}, share {format_number(patterns.blind_spot_share)})"
    )
    lines.append(f"- Vertical overflow (outside:inside): {_pair(patterns.vertical_overflow)}")
    lines.append(f"- Transversal overflow (outside:inside): {_pair(patterns.transversal_overflow)}")
    lines.append(f"- Outside-dominant vertical axes: {_codes(patterns.outside_dominant_verticals)}")
    low = [f"{axis} ({patterns.coverage[axis]})" for axis in patterns.low_coverage_axes]
    lines.append(f"- Axes below {patterns.min_axis_coverage} indicators: {_codes(low)}")
    lines.append(f"- Uncovered axes: {_codes(patterns.uncovered_axes)}")
    lines += ["", "### Overflow per vertical axis", ""]
    lines += _md_table(
        ["Axis", "Outside (OTA)", "Inside"],
        [[axis, pair[0], pair[1]] for axis, pair in patterns.per_axis_overflow.items()],
    )
    lines += ["", "### Overflow per transversal axis", ""]
    lines += _md_table(
        ["Axis", "Outside (OVA)", "Inside"],
        [[axis, pair[0], pair[1]] for axis, pair in patterns.per_transversal_overflow.items()],
    )
    if results.erratum_checks:
        lines += ["", "### Erratum checks", ""]
        for check in results.erratum_checks:
            if not check.agrees:
                lines.append(
                    f"> **Erratum check:** `{check.quantity}` is published as {_value(check.published)} "
                    f"but derives to {_value(check.derived)}."
                )
                lines.append("")
        lines += _md_table(
            ["Quantity", "Published", "Derived", "Agrees"],
            [[c.quantity, _value(c.published), _value(c.derived), "yes" if c.agrees else "no"]
             for c in results.erratum_checks],
        )
    return lines


def _value(value: Any) -> str:
    if value is None:
        return "n/a"
    if isinstance(value, (list, tuple)):
        if len(value) == 2 and all(isinstance(v, int) and not isinstance(v, bool) for v in value):
            return _pair(value)
        return _codes([str(v) for v in value])
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return format_number(value)
    return str(value)


def render_full_report(results: "AnalysisResults") -> Tuple[str, str]:
    """
    The complete markdown report and its JSON mirror.
    完整的 Markdown 报告及其 JSON 镜像

    Raises AnalysisError when an upstream stage output is missing.
    """
    data = results_to_json(results)
    dataset = data["dataset"]
    lines = [
        "# Strategy indicator monitoring report",
        "",
        f"Dataset: {dataset['indicators']} indicators, {dataset['countries']} countries "
        f"({dataset['document_countries']} with a strategy document), {dataset['matches']} matches, "
        f"{dataset['axes']} axes, {dataset['correspondences']} correspondences.",
        "",
    ]
    lines += _stage1_lines(results) + [""] + _stage2_lines(results) + [""] + _stage3_lines(results)
    return "\n".join(lines).rstrip("\n") + "\n", dumps_json(data)


def write_outputs(results: "AnalysisResults", out_dir: Union[str, Path]) -> ReportManifest:
    """
    Write the seven report files to ``out_dir``.
    将七个报告文件写入输出目录

    The manifest lists the other six with role tags and SHA-256 digests.
    """
    target = Path(out_dir)
    markdown, report_json = render_full_report(results)
    _, matrix_csv = render_matrix(results.matrix, results.table)
    countries_svg, indicators_svg = render_bar_charts(results.match_counts or MatchCounts({}, {}))
    contents = {
        "report.md": markdown,
        "report.json": report_json,
        "matrix.csv": matrix_csv,
        "heatmap.svg": render_heatmap(results.table),
        "countries.svg": countries_svg,
        "indicators.svg": indicators_svg,
    }
    entries = []
    for name in REPORT_FILES:
        path = write_text(target / name, contents[name])
        entries.append(ManifestEntry(path=name, roles=FILE_ROLES[name], sha256=sha256_file(path)))
    manifest = ReportManifest(files=tuple(entries))
    write_text(target / MANIFEST_FILE, dumps_json(manifest.to_dict()))
    logger.info("wrote %d report files to %s", len(manifest.paths), target)
    return manifest

