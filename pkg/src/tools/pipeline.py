#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Analysis pipeline
分析流水线

Stage functions fill an AnalysisResults in order; ``run_stage`` is the dict-returning
entry point behind each CLI subcommand. Each analysis stage also writes its JSON to
``<out_dir>/stages/<stage>.json``; those files are never read back as inputs.
"""

from __future__ import annotations

from contextlib import nullcontext
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from src.tools.alignment import (
    ActionWorkload,
    FrequencyTable,
    action_workload,
    build_matrix,
    frequency_table,
    matrix_to_json,
)
from src.tools.consolidate import (
    ConsolidationResult,
    Taxonomy,
    consolidate_set,
    diff_recorded,
    extend_taxonomy,
    merge_aliases,
)
from src.tools.patterns import (
    ErratumCheck,
    PatternReport,
    build_pattern_report,
    compare_published,
    derived_quantities,
)
from src.tools.prevalence import (
    DimensionPrevalence,
    MatchCounts,
    Prevalence,
    PrevalenceLabel,
    StandoutResult,
    Stratum,
    classify,
    compute_frequencies,
    compute_stats,
    count_matches,
    detect_standouts,
    prevalence_universe,
    stratify_countries,
    summarize_by_dimension,
)
from src.tools.report import (
    ReportManifest,
    alignment_json,
    consolidation_json,
    patterns_json,
    prevalence_json,
    standout_json,
    strata_json,
    write_outputs,
)
from src.utils.common_tools import dumps_json, format_table, write_text
from src.utils.ingest import DatasetBundle, DatasetError, MissingFileError, load_bundle
from src.utils.input_validation import AnalysisError, ValidationError
from src.utils.logging_utils import get_logger
from src.utils.model import ExtendedMatrix, FrequencyRecord, PrevalenceStats

logger = get_logger(__name__)

STAGES_DIR = "stages"
STAGE_ORDER = ("prevalence", "standout", "stratify", "consolidate", "align", "patterns")
# stage -> the stages whose results it reads
STAGE_DEPENDENCIES: Dict[str, Tuple[str, ...]] = {
    "prevalence": (),
    "standout": (),
    "stratify": ("standout",),
    "consolidate": ("prevalence",),
    "align": ("consolidate",),
    "patterns": ("align",),
}
SUBCOMMANDS = ("validate",) + STAGE_ORDER + ("report", "all")


@dataclass
class AnalysisResults:
    bundle: DatasetBundle
    settings: Mapping[str, Any] = field(default_factory=dict)
    frequencies: Optional[List[FrequencyRecord]] = None
    stats: Optional[PrevalenceStats] = None
    labels: Optional[List[PrevalenceLabel]] = None
    dimension_summary: List[DimensionPrevalence] = field(default_factory=list)
    match_counts: Optional[MatchCounts] = None
    standouts: Optional[StandoutResult] = None
    strata: Optional[Dict[str, Stratum]] = None
    consolidation: Optional[ConsolidationResult] = None
    matrix: Optional[ExtendedMatrix] = None
    table: Optional[FrequencyTable] = None
    workload: Optional[ActionWorkload] = None
    patterns: Optional[PatternReport] = None
    erratum_checks: List[ErratumCheck] = field(default_factory=list)
    completed: List[str] = field(default_factory=list)


def _setting(results: AnalysisResults, key: str, default: Any) -> Any:
    return results.settings.get(key, default)


def stage_prevalence(results: AnalysisResults) -> None:
    bundle = results.bundle
    universe = prevalence_universe(bundle.indicators, bundle.dimensions, bundle.proposals)
    codes = [i.code for i in universe]
    results.frequencies = compute_frequencies(
        bundle.matches, bundle.countries, _setting(results, "partial_weight", 1.0), codes
    )
    results.stats = compute_stats(results.frequencies, _setting(results, "std_mode", "population"))
    results.labels = classify(results.frequencies, results.stats)
    results.dimension_summary = summarize_by_dimension(results.labels, bundle.indicators, bundle.dimensions)
    results.match_counts = count_matches(bundle.matches, bundle.countries, codes)


def stage_standout(results: AnalysisResults) -> None:
    bundle = results.bundle
    results.standouts = detect_standouts(
        bundle.matches, bundle.countries, _setting(results, "standout_threshold", "auto")
    )


def stage_stratify(results: AnalysisResults) -> None:
    results.strata = stratify_countries(results.bundle.countries, results.standouts)


def stage_consolidate(results: AnalysisResults) -> None:
    bundle = results.bundle
    merged = merge_aliases(bundle.proposals)
    taxonomy = Taxonomy.preliminary(bundle.dimensions, bundle.indicators, bundle.proposals)
    coded, created = extend_taxonomy(merged, taxonomy)
    indicators = consolidate_set(results.labels, coded, bundle.indicators)
    missing, unexpected = diff_recorded(indicators, bundle.consolidated)
    if missing or unexpected:
        logger.warning(
            "consolidated set differs from the dataset: not recorded %s; not derived %s",
            ", ".join(missing) or "-", ", ".join(unexpected) or "-",
        )
    results.consolidation = ConsolidationResult(
        indicators=tuple(indicators),
        new_dimensions=tuple(created),
        highly_prevalent=tuple(
            label.indicator for label in results.labels if label.label == Prevalence.HIGHLY_PREVALENT
        ),
        proposed=tuple(i.code for i in coded),
        merged_proposals=tuple(merged),
        missing_from_recorded=missing,
        unexpected_in_recorded=unexpected,
    )


def stage_align(results: AnalysisResults) -> None:
    bundle = results.bundle
    consolidated = results.consolidation.indicators
    results.matrix = build_matrix(bundle.correspondences, bundle.axis_scheme, consolidated)
    results.table = frequency_table(results.matrix)
    results.workload = action_workload(bundle.axis_scheme, consolidated)


def stage_patterns(results: AnalysisResults) -> None:
    results.patterns = build_pattern_report(
        results.matrix, results.consolidation.indicators, _setting(results, "min_axis_coverage", 3)
    )
    derived = derived_quantities(results.table, results.patterns)
    results.erratum_checks = compare_published(derived, results.bundle.published)


STAGE_FUNCTIONS: Dict[str, Callable[[AnalysisResults], None]] = {
    "prevalence": stage_prevalence,
    "standout": stage_standout,
    "stratify": stage_stratify,
    "consolidate": stage_consolidate,
    "align": stage_align,
    "patterns": stage_patterns,
}

STAGE_PAYLOADS: Dict[str, Callable[[AnalysisResults], Dict[str, Any]]] = {
    "prevalence": prevalence_json,
    "standout": standout_json,
    "stratify": strata_json,
    "consolidate": consolidation_json,
    "align": alignment_json,
    "patterns": patterns_json,
}


def required_stages(stage: str) -> List[str]:
    """``stage`` and everything it transitively depends on, in STAGE_ORDER."""
    if stage not in STAGE_DEPENDENCIES:
        raise AnalysisError(f"unknown stage {stage!r}")
    needed = set()
    pending = [stage]
    while pending:
        name = pending.pop()
        if name not in needed:
            needed.add(name)
            pending.extend(STAGE_DEPENDENCIES[name])
    return [name for name in STAGE_ORDER if name in needed]


def run_through(
    results: AnalysisResults, stage: str, tracer: Any = None
) -> List[str]:
    """Run ``stage`` and the stages it depends on that have not run yet; returns the stages run."""
    ran = []
    for name in required_stages(stage):
        if name in results.completed:
            continue
        scope = tracer.stage(name) if tracer is not None else nullcontext()
        with scope:
            logger.info("running stage %s", name)
            STAGE_FUNCTIONS[name](results)
        results.completed.append(name)
        ran.append(name)
    return ran


def stage_payload(results: AnalysisResults, stage: str) -> Dict[str, Any]:
    return STAGE_PAYLOADS[stage](results)


def write_stage_cache(results: AnalysisResults, stages: Sequence[str], out_dir: Path) -> List[Path]:
    written = []
    for name in stages:
        written.append(write_text(out_dir / STAGES_DIR / f"{name}.json", dumps_json(stage_payload(results, name))))
        if name == "align":
            written.append(write_text(out_dir / STAGES_DIR / "matrix.json", dumps_json(matrix_to_json(results.matrix))))
    return written


def analyse(bundle: DatasetBundle, settings: Mapping[str, Any], tracer: Any = None) -> AnalysisResults:
    """Run every analysis stage over ``bundle``."""
    results = AnalysisResults(bundle=bundle, settings=dict(settings))
    for stage in STAGE_ORDER:
        run_through(results, stage, tracer)
    return results


def stage_text(stage: str, results: AnalysisResults) -> str:
    """
    阶段结果的终端表格 / Plain-text table of one stage's results for standard output
    """
    bundle = results.bundle
    if stage == "prevalence":
        stats = results.stats
        names = {i.code: i.name for i in bundle.indicators}
        header = (
            f"mean={stats.mean:.4f} std_dev={stats.std_dev:.4f} "
            f"hp_threshold={stats.hp_threshold:.4f} irrelevant_threshold={stats.irrelevant_threshold:.4f}"
        )
        rows = [
            [label.indicator, label.frequency, label.label.value, names.get(label.indicator, "")]
            for label in results.labels
        ]
        return header + "\n" + format_table(["code", "frequency", "label", "name"], rows)
    if stage == "standout":
        standouts = results.standouts
        rows = [[cid, count, "yes" if cid in standouts.standouts else "no"] for cid, count in standouts.counts.items()]
        return f"threshold={standouts.threshold:.4f}\n" + format_table(["country", "indicators", "standout"], rows)
    if stage == "stratify":
        names = {c.id: c.name for c in bundle.countries}
        rows = [[cid, names.get(cid, ""), stratum.value] for cid, stratum in results.strata.items()]
        return format_table(["country", "name", "stratum"], rows)
    if stage == "consolidate":
        consolidation = results.consolidation
        origin = {code: "highly prevalent" for code in consolidation.highly_prevalent}
        origin.update({code: "proposal" for code in consolidation.proposed})
        rows = [[i.code, i.dimension, origin.get(i.code, ""), i.name] for i in consolidation.indicators]
        return f"consolidated={len(rows)}\n" + format_table(["code", "dimension", "origin", "name"], rows)
    if stage == "align":
        table = results.table
        rows = [[r, *(table.count(r, c) for c in table.columns), table.row_totals_distinct[r]] for r in table.rows]
        rows.append(["#Ind.", *(table.column_totals[c] for c in table.columns), table.total_entries])
        return format_table(["axis", *table.columns, "#Ind."], rows)
    if stage == "patterns":
        p = results.patterns
        rows = [
            ["blind_spot", ", ".join(p.blind_spot) or "-"],
            ["blind_spot_share", p.blind_spot_share],
            ["vertical_overflow", f"{p.vertical_overflow[0]}:{p.vertical_overflow[1]}"],
            ["transversal_overflow", f"{p.transversal_overflow[0]}:{p.transversal_overflow[1]}"],
            ["outside_dominant_verticals", ", ".join(p.outside_dominant_verticals) or "-"],
            ["low_coverage_axes", ", ".join(f"{a}({p.coverage[a]})" for a in p.low_coverage_axes) or "-"],
            ["uncovered_axes", ", ".join(p.uncovered_axes) or "-"],
        ]
        return format_table(["pattern", "value"], rows)
    raise AnalysisError(f"unknown stage {stage!r}")


def _error(error_type: str, message: str, **extra: Any) -> Dict[str, Any]:
    return {"status": "error", "error_type": error_type, "error": message, **extra}


def _dataset_summary(bundle: DatasetBundle) -> Dict[str, int]:
    return {
        "indicators": len(bundle.indicators),
        "countries": len(bundle.countries),
        "matches": len(bundle.matches),
        "axes": len(bundle.axis_scheme.axes),
        "correspondences": len(bundle.correspondences),
    }


def run_stage(
    subcommand: str,
    data_dir: Path,
    out_dir: Path,
    settings: Mapping[str, Any],
    tracer: Any = None,
) -> Dict[str, Any]:
    """
    执行一个子命令 / Execute one subcommand

    Returns ``{"status": "success", ...}`` or ``{"status": "error", "error_type": ...}``
    with error_type one of ``dataset``, ``missing_file``, ``io``, ``usage``, ``analysis``.
    Expected failures never raise.
    """
    if subcommand not in SUBCOMMANDS:
        return _error("usage", f"unknown subcommand {subcommand!r}")
    try:
        bundle = load_bundle(data_dir)
    except MissingFileError as exc:
        return _error("missing_file", str(exc), diagnostics=[d.to_dict() for d in exc.diagnostics])
    except DatasetError as exc:
        return _error("dataset", str(exc), diagnostics=[d.to_dict() for d in exc.diagnostics])
    except OSError as exc:
        return _error("io", str(exc))

    if subcommand == "validate":
        return {"status": "success", "subcommand": subcommand, "summary": _dataset_summary(bundle)}

    results = AnalysisResults(bundle=bundle, settings=dict(settings))
    targets = STAGE_ORDER if subcommand in ("report", "all") else (subcommand,)
    try:
        for target in targets:
            run_through(results, target, tracer)
        if subcommand == "all":
            stages = list(STAGE_ORDER)
        elif subcommand == "report":
            stages = []
        else:
            stages = [subcommand]
        write_stage_cache(results, stages, Path(out_dir))
        manifest: Optional[ReportManifest] = None
        if subcommand in ("report", "all"):
            manifest = write_outputs(results, out_dir)
    except (AnalysisError, ValidationError) as exc:
        logger.error("%s failed: %s", subcommand, exc)
        return _error("analysis", str(exc))
    except OSError as exc:
        logger.error("%s failed: %s", subcommand, exc)
        return _error("io", str(exc))

    response: Dict[str, Any] = {"status": "success", "subcommand": subcommand, "results": results}
    if subcommand in STAGE_ORDER:
        response["stage"] = subcommand
        response["payload"] = stage_payload(results, subcommand)
    else:
        response["payload"] = {name: stage_payload(results, name) for name in STAGE_ORDER}
        response["manifest"] = manifest
    return response


def pending_errata(results: AnalysisResults) -> List[Tuple[str, Any, Any]]:
    return [(c.quantity, c.published, c.derived) for c in results.erratum_checks if not c.agrees]
