#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Dataset ingestion and export.
数据集的读取与导出。

A dataset directory holds six required CSV files plus an optional ``config.json``;
``proposals.csv``, ``actions.csv`` and ``published.json`` are optional extras. Every
problem found while reading is reported with (file, line) provenance, and all problems
are raised together in one DatasetError.
"""

from __future__ import annotations

import codecs
import csv
import io
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from src.utils.common_tools import dumps_json, write_text
from src.utils.input_validation import (
    CodeFormatError,
    ValidationError,
    parse_bool,
    validate_partial_weight,
    validate_positive_int,
    validate_standout_threshold,
    validate_std_mode,
)
from src.utils.logging_utils import get_logger
from src.utils.model import (
    OTA,
    OVA,
    Axis,
    AxisKind,
    AxisScheme,
    CorrespondenceEntry,
    CountryRecord,
    Dimension,
    DimensionOrigin,
    Indicator,
    IndicatorStatus,
    MatchQuality,
    MatchRecord,
    ProposedIndicator,
    StrategicAction,
    Violation,
    normalize_code,
    validate_dataset,
    validate_proposals,
)

logger = get_logger(__name__)

CONFIG_FILE = "config.json"
PUBLISHED_FILE = "published.json"

# file name -> (required columns, optional columns), in export column order
REQUIRED_FILES: Dict[str, Tuple[Tuple[str, ...], Tuple[str, ...]]] = {
    "dimensions.csv": (("code", "name", "origin"), ()),
    "indicators.csv": (("code", "dimension", "name", "status"), ("area", "feasibility_notes")),
    "countries.csv": (("id", "name", "has_document", "uses_indicators", "plans_indicators"), ("notes",)),
    "matches.csv": (("indicator", "country", "quality"), ()),
    "axes.csv": (("id", "kind", "name"), ("abbrev",)),
    "correspondences.csv": (("indicator", "vertical", "transversal"), ()),
}
OPTIONAL_FILES: Dict[str, Tuple[Tuple[str, ...], Tuple[str, ...]]] = {
    "proposals.csv": (("name", "target_dimension", "source_countries"), ("alias_group", "accepted")),
    "actions.csv": (("action_id", "axis_id", "text"), ()),
}
EXPORT_COLUMNS: Dict[str, Tuple[str, ...]] = {
    "dimensions.csv": ("code", "name", "origin"),
    "indicators.csv": ("code", "dimension", "area", "name", "status", "feasibility_notes"),
    "countries.csv": ("id", "name", "has_document", "uses_indicators", "plans_indicators", "notes"),
    "matches.csv": ("indicator", "country", "quality"),
    "axes.csv": ("id", "kind", "name", "abbrev"),
    "correspondences.csv": ("indicator", "vertical", "transversal"),
    "proposals.csv": ("name", "target_dimension", "source_countries", "alias_group", "accepted"),
    "actions.csv": ("action_id", "axis_id", "text"),
}
CONFIG_KEYS = ("partial_weight", "std_mode", "standout_threshold", "min_axis_coverage")


@dataclass(frozen=True)
class Diagnostic:
    file: str
    line: Optional[int]
    column: Optional[str]
    message: str

    def __str__(self) -> str:
        where = self.file
        if self.line is not None:
            where += f":{self.line}"
        if self.column:
            where += f" [{self.column}]"
        return f"{where}: {self.message}"

    def to_dict(self) -> Dict[str, Any]:
        return {"file": self.file, "line": self.line, "column": self.column, "message": self.message}


class DatasetError(Exception):
    """Aggregated ingestion problems; ``diagnostics`` is ordered by file then line."""

    def __init__(self, diagnostics: Sequence[Diagnostic]) -> None:
        self.diagnostics = tuple(diagnostics)
        lines = "\n".join(f"  {d}" for d in self.diagnostics)
        super().__init__(f"{len(self.diagnostics)} dataset problem(s):\n{lines}")


class MissingFileError(DatasetError):
    """A required dataset file is absent."""


class BundleExportError(OSError):
    """The export directory could not be written."""


@dataclass(frozen=True)
class DatasetBundle:
    indicators: Tuple[Indicator, ...] = ()
    dimensions: Tuple[Dimension, ...] = ()
    countries: Tuple[CountryRecord, ...] = ()
    matches: Tuple[MatchRecord, ...] = ()
    axis_scheme: AxisScheme = field(default_factory=AxisScheme)
    correspondences: Tuple[CorrespondenceEntry, ...] = ()
    config: Mapping[str, Any] = field(default_factory=dict)
    proposals: Tuple[ProposedIndicator, ...] = ()
    published: Optional[Mapping[str, Any]] = None

    @property
    def consolidated(self) -> Tuple[Indicator, ...]:
        return tuple(i for i in self.indicators if i.status == IndicatorStatus.CONSOLIDATED)

    @property
    def document_countries(self) -> Tuple[CountryRecord, ...]:
        return tuple(c for c in self.countries if c.has_document)

    def indicator(self, code: str) -> Optional[Indicator]:
        for candidate in self.indicators:
            if candidate.code == code:
                return candidate
        return None

    def canonical(self) -> "DatasetBundle":
        """
        Same content in canonical form: indicator codes normalised (``"a1"`` -> ``"A01"``)
        and every collection sorted lexicographically by code.
        """
        indicators = [replace(i, code=_canonical_code(i.code)) for i in self.indicators]
        matches = [replace(m, indicator=_canonical_code(m.indicator)) for m in self.matches]
        correspondences = [replace(c, indicator=_canonical_code(c.indicator)) for c in self.correspondences]
        return DatasetBundle(
            indicators=tuple(sorted(indicators, key=lambda i: i.code)),
            dimensions=tuple(sorted(self.dimensions, key=lambda d: d.code)),
            countries=tuple(sorted(self.countries, key=lambda c: c.id)),
            matches=tuple(sorted(matches, key=lambda m: (m.indicator, m.country))),
            axis_scheme=self.axis_scheme,
            correspondences=tuple(
                sorted(correspondences, key=lambda c: (c.indicator, c.vertical, c.transversal))
            ),
            config=dict(self.config),
            proposals=self.proposals,
            published=self.published,
        )


def _canonical_code(code: str) -> str:
    # malformed codes are left for validate_dataset to report
    try:
        return normalize_code(code)
    except CodeFormatError:
        return code


class _RowError(Exception):
    def __init__(self, column: Optional[str], message: str) -> None:
        super().__init__(message)
        self.column = column
        self.message = message


def _text(row: Mapping[str, Optional[str]], column: str, *, required: bool = True) -> Optional[str]:
    value = (row.get(column) or "").strip()
    if not value:
        if required:
            raise _RowError(column, "value is required")
        return None
    return value


def _code(row: Mapping[str, Optional[str]], column: str) -> str:
    raw = _text(row, column)
    try:
        return normalize_code(raw)
    except CodeFormatError as exc:
        raise _RowError(column, str(exc)) from exc


def _enum(row: Mapping[str, Optional[str]], column: str, enum_type, default=None):
    raw = _text(row, column, required=default is None)
    if raw is None:
        return default
    try:
        return enum_type(raw.lower())
    except ValueError as exc:
        allowed = "|".join(member.value for member in enum_type)
        raise _RowError(column, f"{raw!r} is not one of {allowed}") from exc


def _bool(row: Mapping[str, Optional[str]], column: str, *, default: Optional[bool] = None) -> bool:
    raw = row.get(column)
    if (raw is None or not raw.strip()) and default is not None:
        return default
    try:
        return parse_bool(raw or "", column)
    except ValidationError as exc:
        raise _RowError(column, str(exc)) from exc


def _sentinel_aware(value: str) -> str:
    return value.upper() if value.upper() in (OVA, OTA) else value


def _parse_dimension(row) -> Dimension:
    code = _text(row, "code").upper()
    if len(code) != 1 or not ("A" <= code <= "Z"):
        raise _RowError("code", f"dimension code {code!r} must be a single letter")
    return Dimension(code=code, name=_text(row, "name"), origin=_enum(row, "origin", DimensionOrigin))


def _parse_indicator(row) -> Indicator:
    code = _code(row, "code")
    dimension = (_text(row, "dimension", required=False) or code[0]).upper()
    return Indicator(
        code=code,
        dimension=dimension,
        name=_text(row, "name"),
        status=_enum(row, "status", IndicatorStatus),
        area=_text(row, "area", required=False),
        feasibility_notes=_text(row, "feasibility_notes", required=False),
    )


def _parse_country(row) -> CountryRecord:
    return CountryRecord(
        id=_text(row, "id"),
        name=_text(row, "name"),
        has_document=_bool(row, "has_document"),
        uses_indicators=_bool(row, "uses_indicators"),
        plans_indicators=_bool(row, "plans_indicators"),
        notes=_text(row, "notes", required=False),
    )


def _parse_match(row) -> MatchRecord:
    return MatchRecord(
        indicator=_code(row, "indicator"),
        country=_text(row, "country"),
        quality=_enum(row, "quality", MatchQuality),
    )


def _parse_axis(row) -> Axis:
    axis_id = _text(row, "id")
    return Axis(
        id=axis_id,
        kind=_enum(row, "kind", AxisKind),
        name=_text(row, "name"),
        abbrev=_text(row, "abbrev", required=False) or axis_id,
    )


def _parse_correspondence(row) -> CorrespondenceEntry:
    return CorrespondenceEntry(
        indicator=_code(row, "indicator"),
        vertical=_sentinel_aware(_text(row, "vertical")),
        transversal=_sentinel_aware(_text(row, "transversal")),
    )


def _parse_proposal(row) -> ProposedIndicator:
    sources = tuple(s.strip() for s in (row.get("source_countries") or "").split(";") if s.strip())
    if not sources:
        raise _RowError("source_countries", "at least one source country is required")
    return ProposedIndicator(
        name=_text(row, "name"),
        target_dimension=_text(row, "target_dimension"),
        source_countries=sources,
        alias_group=_text(row, "alias_group", required=False),
        accepted=_bool(row, "accepted", default=True),
    )


def _parse_action(row) -> StrategicAction:
    return StrategicAction(
        action_id=_text(row, "action_id"), axis_id=_text(row, "axis_id"), text=_text(row, "text")
    )


_PARSERS: Dict[str, Callable[[Mapping[str, Optional[str]]], Any]] = {
    "dimensions.csv": _parse_dimension,
    "indicators.csv": _parse_indicator,
    "countries.csv": _parse_country,
    "matches.csv": _parse_match,
    "axes.csv": _parse_axis,
    "correspondences.csv": _parse_correspondence,
    "proposals.csv": _parse_proposal,
    "actions.csv": _parse_action,
}


def _record_key(file_name: str, record: Any) -> str:
    """Key format shared with ``Violation.key`` so violations map back to lines."""
    if file_name == "dimensions.csv":
        return record.code
    if file_name == "indicators.csv":
        return record.code
    if file_name == "countries.csv":
        return record.id
    if file_name == "matches.csv":
        return f"{record.indicator},{record.country}"
    if file_name == "axes.csv":
        return record.id
    if file_name == "correspondences.csv":
        return f"{record.indicator},{record.vertical},{record.transversal}"
    if file_name == "proposals.csv":
        return record.name
    if file_name == "actions.csv":
        return record.action_id
    return ""


@dataclass
class _FileResult:
    records: List[Tuple[int, Any]] = field(default_factory=list)
    diagnostics: List[Diagnostic] = field(default_factory=list)


def _decode_text(path: Path) -> Tuple[Optional[str], Optional[Diagnostic]]:
    """Decode ``path`` as UTF-8 (BOM allowed); a bad byte becomes a diagnostic at its line."""
    data = path.read_bytes()
    if data.startswith(codecs.BOM_UTF8):
        data = data[len(codecs.BOM_UTF8):]
    try:
        return data.decode("utf-8"), None
    except UnicodeDecodeError as exc:
        line = data.count(b"\n", 0, exc.start) + 1
        byte = data[exc.start:exc.start + 1].hex()
        return None, Diagnostic(path.name, line, None, f"invalid UTF-8 byte 0x{byte}: {exc.reason}")


def _read_csv(path: Path, required: Sequence[str], optional: Sequence[str]) -> _FileResult:
    result = _FileResult()
    name = path.name
    parser = _PARSERS[name]
    text, problem = _decode_text(path)
    if problem is not None:
        result.diagnostics.append(problem)
        return result
    with io.StringIO(text, newline="") as handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames
        if header is None:
            result.diagnostics.append(Diagnostic(name, 1, None, "missing header row"))
            return result
        header = [h.strip() for h in header]
        reader.fieldnames = header
        missing = [c for c in required if c not in header]
        if missing:
            for column in missing:
                result.diagnostics.append(Diagnostic(name, 1, column, "required column missing from header"))
            return result
        extra = [c for c in header if c not in required and c not in optional]
        if extra:
            logger.warning("%s: ignoring unknown column(s): %s", name, ", ".join(extra))
        try:
            for row in reader:
                line = reader.line_num
                if None in row:
                    result.diagnostics.append(
                        Diagnostic(name, line, None, f"row has {len(header) + len(row[None])} fields, header has {len(header)}")
                    )
                    continue
                try:
                    result.records.append((line, parser(row)))
                except _RowError as exc:
                    result.diagnostics.append(Diagnostic(name, line, exc.column, exc.message))
        except csv.Error as exc:
            result.diagnostics.append(Diagnostic(name, reader.line_num, None, f"malformed CSV: {exc}"))
    return result


def read_config_file(path: Union[str, Path]) -> Tuple[Dict[str, Any], List[Diagnostic]]:
    """
    Read and check ``config.json``. A missing file yields an empty mapping.
    读取并校验 config.json；文件不存在时返回空映射。

    Unknown keys are kept but logged; the four analysis keys are validated.
    """
    config_path = Path(path)
    name = config_path.name
    if not config_path.exists():
        return {}, []
    text, problem = _decode_text(config_path)
    if problem is not None:
        return {}, [problem]
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        return {}, [Diagnostic(name, exc.lineno, None, f"invalid JSON: {exc.msg} (column {exc.colno})")]
    if not isinstance(raw, dict):
        return {}, [Diagnostic(name, 1, None, "top-level value must be an object")]

    diagnostics: List[Diagnostic] = []
    checks = {
        "partial_weight": validate_partial_weight,
        "std_mode": validate_std_mode,
        "standout_threshold": validate_standout_threshold,
        "min_axis_coverage": lambda v: validate_positive_int(v, "min_axis_coverage"),
    }
    config: Dict[str, Any] = {}
    for key, value in raw.items():
        if key in checks:
            try:
                config[key] = checks[key](value)
            except ValidationError as exc:
                diagnostics.append(Diagnostic(name, None, key, str(exc)))
        else:
            config[key] = value
    return config, diagnostics


def _read_published(path: Path) -> Tuple[Optional[Dict[str, Any]], List[Diagnostic]]:
    if not path.exists():
        return None, []
    text, problem = _decode_text(path)
    if problem is not None:
        return None, [problem]
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        return None, [Diagnostic(path.name, exc.lineno, None, f"invalid JSON: {exc.msg}")]
    if not isinstance(raw, dict):
        return None, [Diagnostic(path.name, 1, None, "top-level value must be an object")]
    return raw, []


def _violation_diagnostics(
    violations: Iterable[Violation], provenance: Mapping[Tuple[str, str], List[int]]
) -> List[Diagnostic]:
    diagnostics = []
    for violation in violations:
        lines = provenance.get((violation.source, violation.key))
        line = None
        if lines:
            line = lines[-1] if violation.kind == "duplicate" else lines[0]
        diagnostics.append(Diagnostic(violation.source, line, None, violation.message))
    return diagnostics


def _sort_diagnostics(diagnostics: Iterable[Diagnostic]) -> List[Diagnostic]:
    return sorted(diagnostics, key=lambda d: (d.file, d.line or 0, d.column or "", d.message))


def load_bundle(data_dir: Union[str, Path]) -> DatasetBundle:
    """
    Parse and validate a dataset directory into a DatasetBundle.
    解析并校验数据目录，返回 DatasetBundle。

    Raises MissingFileError when a required file is absent and DatasetError with every
    row-level diagnostic otherwise. Referential validation runs once all rows parse, and
    its violations are reported together with (file, line) provenance.
    """
    root = Path(data_dir)
    if not root.is_dir():
        raise MissingFileError([Diagnostic(str(root), None, None, "data directory does not exist")])

    missing = [name for name in REQUIRED_FILES if not (root / name).is_file()]
    if missing:
        raise MissingFileError([Diagnostic(name, None, None, "required file is missing") for name in missing])

    parsed: Dict[str, _FileResult] = {}
    for name, (required, optional) in {**REQUIRED_FILES, **OPTIONAL_FILES}.items():
        path = root / name
        if path.is_file():
            parsed[name] = _read_csv(path, required, optional)
        else:
            parsed[name] = _FileResult()

    config, config_diagnostics = read_config_file(root / CONFIG_FILE)
    published, published_diagnostics = _read_published(root / PUBLISHED_FILE)

    row_diagnostics = [d for result in parsed.values() for d in result.diagnostics]
    row_diagnostics += config_diagnostics + published_diagnostics
    if row_diagnostics:
        raise DatasetError(_sort_diagnostics(row_diagnostics))

    provenance: Dict[Tuple[str, str], List[int]] = {}
    for name, result in parsed.items():
        for line, record in result.records:
            provenance.setdefault((name, _record_key(name, record)), []).append(line)

    def records(name: str) -> List[Any]:
        return [record for _, record in parsed[name].records]

    correspondences: List[CorrespondenceEntry] = []
    seen = set()
    for line, entry in parsed["correspondences.csv"].records:
        if entry in seen:
            logger.warning(
                "correspondences.csv:%d: duplicate placement %s in (%s, %s) collapsed",
                line, entry.indicator, entry.transversal, entry.vertical,
            )
            continue
        seen.add(entry)
        correspondences.append(entry)

    axes = records("axes.csv")
    scheme = AxisScheme(
        vertical_axes=tuple(a for a in axes if a.kind == AxisKind.VERTICAL),
        transversal_axes=tuple(a for a in axes if a.kind == AxisKind.TRANSVERSAL),
        actions=tuple(records("actions.csv")),
    )
    bundle = DatasetBundle(
        indicators=tuple(records("indicators.csv")),
        dimensions=tuple(records("dimensions.csv")),
        countries=tuple(records("countries.csv")),
        matches=tuple(records("matches.csv")),
        axis_scheme=scheme,
        correspondences=tuple(correspondences),
        config=config,
        proposals=tuple(records("proposals.csv")),
        published=published,
    )

    report = validate_dataset(
        bundle.indicators,
        bundle.dimensions,
        bundle.countries,
        bundle.matches,
        bundle.axis_scheme,
        bundle.correspondences,
    )
    violations = list(report) + list(validate_proposals(bundle.proposals, bundle.countries))
    if violations:
        raise DatasetError(_sort_diagnostics(_violation_diagnostics(violations, provenance)))

    logger.info(
        "loaded %s: %d indicators, %d countries, %d matches, %d axes, %d correspondences",
        root, len(bundle.indicators), len(bundle.countries), len(bundle.matches),
        len(scheme.axes), len(bundle.correspondences),
    )
    return bundle.canonical()


def _csv_text(columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(["" if value is None else value for value in row])
    return buffer.getvalue()


def _bool_text(value: bool) -> str:
    return "true" if value else "false"


def export_bundle(bundle: DatasetBundle, out_dir: Union[str, Path]) -> List[Path]:
    """
    Write ``bundle`` as a dataset directory in canonical form.
    以规范形式导出数据集目录。

    The six required CSV files and ``config.json`` are always written; proposals, actions
    and published values only when present. Returns the written paths.
    """
    canonical = bundle.canonical()
    target = Path(out_dir)
    tables: Dict[str, List[Sequence[Any]]] = {
        "dimensions.csv": [(d.code, d.name, d.origin.value) for d in canonical.dimensions],
        "indicators.csv": [
            (i.code, i.dimension, i.area, i.name, i.status.value, i.feasibility_notes)
            for i in canonical.indicators
        ],
        "countries.csv": [
            (c.id, c.name, _bool_text(c.has_document), _bool_text(c.uses_indicators),
             _bool_text(c.plans_indicators), c.notes)
            for c in canonical.countries
        ],
        "matches.csv": [(m.indicator, m.country, m.quality.value) for m in canonical.matches],
        "axes.csv": [(a.id, a.kind.value, a.name, a.abbrev) for a in canonical.axis_scheme.axes],
        "correspondences.csv": [(c.indicator, c.vertical, c.transversal) for c in canonical.correspondences],
    }
    if canonical.proposals:
        tables["proposals.csv"] = [
            (p.name, p.target_dimension, ";".join(p.source_countries), p.alias_group, _bool_text(p.accepted))
            for p in canonical.proposals
        ]
    if canonical.axis_scheme.actions:
        tables["actions.csv"] = [(a.action_id, a.axis_id, a.text) for a in canonical.axis_scheme.actions]

    written: List[Path] = []
    try:
        target.mkdir(parents=True, exist_ok=True)
        for name, rows in tables.items():
            written.append(write_text(target / name, _csv_text(EXPORT_COLUMNS[name], rows)))
        config = {k: v for k, v in canonical.config.items()}
        written.append(write_text(target / CONFIG_FILE, dumps_json(config)))
        if canonical.published is not None:
            written.append(write_text(target / PUBLISHED_FILE, dumps_json(canonical.published)))
    except OSError as exc:
        raise BundleExportError(f"cannot write dataset to {target}: {exc}") from exc
    logger.info("exported dataset to %s (%d files)", target, len(written))
    return written

