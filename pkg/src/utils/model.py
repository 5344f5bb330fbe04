#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Domain types shared by every analysis stage, plus whole-dataset validation.
所有分析阶段共享的领域类型，以及数据集整体校验。

All types are frozen dataclasses; operations in this module are pure functions.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from src.utils.input_validation import CodeFormatError

# Reserved overflow identifiers of the extended matrix.
OVA = "OVA"
OTA = "OTA"
SENTINELS = frozenset({OVA, OTA})

_DIMENSION_CODE_RE = re.compile(r"[A-Z]")
_CANONICAL_CODE_RE = re.compile(r"[A-Z]\d{2}")


class DimensionOrigin(str, Enum):
    PRELIMINARY = "preliminary"
    EXTENSION = "extension"


class IndicatorStatus(str, Enum):
    PRELIMINARY = "preliminary"
    PROPOSED = "proposed"
    CONSOLIDATED = "consolidated"


class MatchQuality(str, Enum):
    FULL = "full"
    PARTIAL = "partial"


class AxisKind(str, Enum):
    VERTICAL = "vertical"
    TRANSVERSAL = "transversal"


@dataclass(frozen=True)
class Dimension:
    code: str
    name: str
    origin: DimensionOrigin = DimensionOrigin.PRELIMINARY


@dataclass(frozen=True)
class Indicator:
    code: str
    dimension: str
    name: str
    status: IndicatorStatus = IndicatorStatus.PRELIMINARY
    area: Optional[str] = None
    feasibility_notes: Optional[str] = None

    @property
    def number(self) -> int:
        return int(self.code[1:])


@dataclass(frozen=True)
class CountryRecord:
    id: str
    name: str
    has_document: bool
    uses_indicators: bool = False
    plans_indicators: bool = False
    notes: Optional[str] = None


@dataclass(frozen=True)
class MatchRecord:
    indicator: str
    country: str
    quality: MatchQuality = MatchQuality.FULL


@dataclass(frozen=True)
class FrequencyRecord:
    """Weighted number of document-holding countries matching one indicator (f_i)."""

    indicator: str
    frequency: float


@dataclass(frozen=True)
class PrevalenceStats:
    mean: float
    std_dev: float
    hp_threshold: float
    irrelevant_threshold: float

    @classmethod
    def from_moments(cls, mean: float, std_dev: float) -> "PrevalenceStats":
        # The lower threshold is truncated at zero.
        return cls(
            mean=mean,
            std_dev=std_dev,
            hp_threshold=mean + std_dev,
            irrelevant_threshold=max(mean - std_dev, 0.0),
        )


@dataclass(frozen=True)
class Axis:
    id: str
    name: str
    abbrev: str
    kind: AxisKind


@dataclass(frozen=True)
class StrategicAction:
    action_id: str
    axis_id: str
    text: str


@dataclass(frozen=True)
class AxisScheme:
    vertical_axes: Tuple[Axis, ...] = ()
    transversal_axes: Tuple[Axis, ...] = ()
    actions: Tuple[StrategicAction, ...] = ()

    @property
    def vertical_ids(self) -> Tuple[str, ...]:
        return tuple(a.id for a in self.vertical_axes)

    @property
    def transversal_ids(self) -> Tuple[str, ...]:
        return tuple(a.id for a in self.transversal_axes)

    @property
    def axes(self) -> Tuple[Axis, ...]:
        return self.vertical_axes + self.transversal_axes

    def axis(self, axis_id: str) -> Optional[Axis]:
        for candidate in self.axes:
            if candidate.id == axis_id:
                return candidate
        return None

    @property
    def is_empty(self) -> bool:
        return not self.vertical_axes and not self.transversal_axes


@dataclass(frozen=True)
class CorrespondenceEntry:
    indicator: str
    vertical: str
    transversal: str


@dataclass(frozen=True)
class ExtendedMatrix:
    """Transversal axes + OTA as rows, vertical axes + OVA as columns."""

    rows: Tuple[str, ...]
    columns: Tuple[str, ...]
    cells: Mapping[Tuple[str, str], Tuple[str, ...]] = field(default_factory=dict)

    def cell(self, row: str, column: str) -> Tuple[str, ...]:
        if row not in self.rows or column not in self.columns:
            raise KeyError(f"no cell ({row}, {column}) in matrix")
        return self.cells.get((row, column), ())

    @property
    def interior_rows(self) -> Tuple[str, ...]:
        return tuple(r for r in self.rows if r != OTA)

    @property
    def interior_columns(self) -> Tuple[str, ...]:
        return tuple(c for c in self.columns if c != OVA)

    def column_codes(self, column: str) -> List[str]:
        return [code for row in self.rows for code in self.cell(row, column)]

    def row_codes(self, row: str) -> List[str]:
        return [code for column in self.columns for code in self.cell(row, column)]


@dataclass(frozen=True)
class ProposedIndicator:
    """An indicator found in a standout strategy but absent from the preliminary list.

    ``target_dimension`` is an existing dimension letter or the name of a new dimension.
    Names are stored verbatim, in the source document's language.
    """

    name: str
    target_dimension: str
    source_countries: Tuple[str, ...]
    alias_group: Optional[str] = None
    accepted: bool = True


@dataclass(frozen=True)
class Violation:
    """One dataset inconsistency. ``source`` names the dataset file, ``key`` the record."""

    kind: str
    source: str
    key: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: Tuple[Violation, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.violations

    def __len__(self) -> int:
        return len(self.violations)

    def __iter__(self):
        return iter(self.violations)


def normalize_code(raw: str) -> str:
    """
    Canonicalise an indicator code: ``"a1"`` -> ``"A01"``.
    规范化指标代码：字母大写，数字补齐两位。

    Accepts a letter followed by one or two digits, case-insensitive, surrounding
    whitespace ignored. Raises CodeFormatError naming the offending position.
    """
    if not isinstance(raw, str):
        raise CodeFormatError(str(raw), 0, "expected text")
    text = raw.strip()
    if not text:
        raise CodeFormatError(raw, 0, "empty code")
    letter = text[0]
    if not (letter.isascii() and letter.isalpha()):
        raise CodeFormatError(raw, 0, "expected a dimension letter")
    digits = text[1:]
    if not digits:
        raise CodeFormatError(raw, 1, "expected one or two digits")
    for offset, char in enumerate(digits, start=1):
        if not (char.isascii() and char.isdigit()):
            raise CodeFormatError(raw, offset, f"unexpected character {char!r}")
    if len(digits) > 2:
        raise CodeFormatError(raw, 3, "more than two digits")
    number = int(digits)
    if number < 1:
        raise CodeFormatError(raw, 1, "indicator number must be at least 1")
    return f"{letter.upper()}{number:02d}"


def is_canonical_code(code: str) -> bool:
    return bool(_CANONICAL_CODE_RE.fullmatch(code or "")) and code[1:] != "00"


def _duplicates(values: Iterable[str]) -> List[str]:
    seen: Dict[str, int] = {}
    for value in values:
        seen[value] = seen.get(value, 0) + 1
    return sorted(v for v, count in seen.items() if count > 1)


def _safe_code(raw: str) -> Optional[str]:
    try:
        return normalize_code(raw)
    except CodeFormatError:
        return None


def validate_dataset(
    indicators: Sequence[Indicator] = (),
    dimensions: Sequence[Dimension] = (),
    countries: Sequence[CountryRecord] = (),
    matches: Sequence[MatchRecord] = (),
    axis_scheme: Optional[AxisScheme] = None,
    correspondences: Sequence[CorrespondenceEntry] = (),
) -> ValidationReport:
    """
    Check a dataset for internal consistency.
    检查数据集的内部一致性。

    Violations are data, not failures: the report lists dangling references, duplicate
    codes, pattern failures and sentinel misuse, sorted so that input row order never
    changes the outcome. An empty report means the dataset is valid.
    """
    found: List[Violation] = []

    def add(kind: str, source: str, key: str, message: str) -> None:
        found.append(Violation(kind, source, key, message))

    # dimensions
    for dimension in dimensions:
        if not _DIMENSION_CODE_RE.fullmatch(dimension.code or ""):
            add("pattern", "dimensions.csv", dimension.code,
                f"dimension code {dimension.code!r} is not a single uppercase letter")
    origins: Dict[str, set] = {}
    for dimension in dimensions:
        origins.setdefault(dimension.code, set()).add(dimension.origin)
    for code in _duplicates(d.code for d in dimensions):
        if len(origins[code]) > 1:
            add("extension_collision", "dimensions.csv", code,
                f"extension dimension {code} collides with a preliminary dimension")
        else:
            add("duplicate", "dimensions.csv", code, f"dimension code {code} declared more than once")
    dimension_codes = {d.code for d in dimensions}

    # indicators
    indicator_codes = set()
    normalized_indicator_codes = []
    for indicator in indicators:
        code = _safe_code(indicator.code)
        if code is None:
            add("pattern", "indicators.csv", indicator.code,
                f"indicator code {indicator.code!r} does not match letter + two digits")
            continue
        normalized_indicator_codes.append(code)
        indicator_codes.add(code)
        if indicator.dimension != code[0]:
            add("dimension_mismatch", "indicators.csv", code,
                f"indicator {code} is filed under dimension {indicator.dimension!r}")
        if indicator.dimension not in dimension_codes:
            add("dangling_reference", "indicators.csv", code,
                f"indicator {code} references unknown dimension {indicator.dimension!r}")
    for code in _duplicates(normalized_indicator_codes):
        add("duplicate", "indicators.csv", code, f"indicator code {code} declared more than once")

    # countries
    country_ids = {c.id for c in countries}
    for country_id in _duplicates(c.id for c in countries):
        add("duplicate", "countries.csv", country_id, f"country id {country_id} declared more than once")
    for country in countries:
        if not country.has_document and (country.uses_indicators or country.plans_indicators):
            add("inconsistent_country", "countries.csv", country.id,
                f"country {country.id} has no strategy document but is flagged as using or planning indicators")

    # matches
    pairs = []
    for match in matches:
        code = _safe_code(match.indicator)
        key = f"{match.indicator},{match.country}"
        if code is None:
            add("pattern", "matches.csv", key, f"indicator code {match.indicator!r} does not match letter + two digits")
            continue
        pairs.append(f"{code},{match.country}")
        if code not in indicator_codes:
            add("dangling_reference", "matches.csv", f"{code},{match.country}",
                f"match references unknown indicator {code}")
        if match.country not in country_ids:
            add("dangling_reference", "matches.csv", f"{code},{match.country}",
                f"match references unknown country {match.country}")
    for pair in _duplicates(pairs):
        add("duplicate", "matches.csv", pair, f"match {pair} declared more than once")

    # axes
    scheme = axis_scheme or AxisScheme()
    if not scheme.is_empty:
        if not scheme.vertical_axes:
            add("missing_axes", "axes.csv", "vertical", "axis scheme declares no vertical axis")
        if not scheme.transversal_axes:
            add("missing_axes", "axes.csv", "transversal", "axis scheme declares no transversal axis")
    for axis in scheme.axes:
        if axis.id in SENTINELS:
            add("sentinel_misuse", "axes.csv", axis.id, f"{axis.id} is reserved and cannot be declared as an axis")
    for axis_id in _duplicates(a.id for a in scheme.axes):
        add("duplicate", "axes.csv", axis_id, f"axis id {axis_id} declared more than once")
    vertical_ids = set(scheme.vertical_ids) - SENTINELS
    transversal_ids = set(scheme.transversal_ids) - SENTINELS
    axis_ids = vertical_ids | transversal_ids
    for action in scheme.actions:
        if action.axis_id not in axis_ids:
            add("dangling_reference", "actions.csv", action.action_id,
                f"action {action.action_id} references unknown axis {action.axis_id!r}")

    # correspondences
    triples = []
    for entry in correspondences:
        code = _safe_code(entry.indicator)
        key = f"{entry.indicator},{entry.vertical},{entry.transversal}"
        if code is None:
            add("pattern", "correspondences.csv", key,
                f"indicator code {entry.indicator!r} does not match letter + two digits")
            continue
        key = f"{code},{entry.vertical},{entry.transversal}"
        triples.append(key)
        if code not in indicator_codes:
            add("dangling_reference", "correspondences.csv", key,
                f"correspondence references unknown indicator {code}")
        if entry.vertical == OTA:
            add("sentinel_misuse", "correspondences.csv", key, "OTA used in the vertical position")
        elif entry.vertical != OVA and entry.vertical not in vertical_ids:
            add("dangling_reference", "correspondences.csv", key,
                f"correspondence references unknown vertical axis {entry.vertical!r}")
        if entry.transversal == OVA:
            add("sentinel_misuse", "correspondences.csv", key, "OVA used in the transversal position")
        elif entry.transversal != OTA and entry.transversal not in transversal_ids:
            add("dangling_reference", "correspondences.csv", key,
                f"correspondence references unknown transversal axis {entry.transversal!r}")
    for triple in _duplicates(triples):
        add("duplicate", "correspondences.csv", triple, f"correspondence {triple} declared more than once")

    ordered = sorted(set(found), key=lambda v: (v.source, v.key, v.kind, v.message))
    return ValidationReport(tuple(ordered))


def validate_proposals(
    proposals: Sequence[ProposedIndicator], countries: Sequence[CountryRecord]
) -> ValidationReport:
    """Referential checks for proposals: every source country must exist."""
    country_ids = {c.id for c in countries}
    found = []
    for proposal in proposals:
        if not proposal.source_countries:
            found.append(Violation("missing_source", "proposals.csv", proposal.name,
                                   f"proposal {proposal.name!r} lists no source country"))
        for country_id in proposal.source_countries:
            if country_id not in country_ids:
                found.append(Violation("dangling_reference", "proposals.csv", proposal.name,
                                       f"proposal {proposal.name!r} references unknown country {country_id}"))
    ordered = sorted(set(found), key=lambda v: (v.source, v.key, v.kind, v.message))
    return ValidationReport(tuple(ordered))
