#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Indicator prevalence across national strategies
指标在各国战略中的普及度

Frequencies, descriptive statistics, the three-way prevalence classification,
standout-strategy detection and country stratification.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from src.utils.input_validation import (
    AUTO,
    AnalysisError,
    validate_partial_weight,
    validate_standout_threshold,
    validate_std_mode,
)
from src.utils.logging_utils import get_logger
from src.utils.model import (
    CountryRecord,
    Dimension,
    DimensionOrigin,
    FrequencyRecord,
    Indicator,
    IndicatorStatus,
    MatchQuality,
    MatchRecord,
    PrevalenceStats,
    ProposedIndicator,
)

logger = get_logger(__name__)

# Relative tolerance for threshold comparisons; absorbs float noise in mean ± std.
BOUNDARY_TOLERANCE = 1e-9


class Prevalence(str, Enum):
    IRRELEVANT = "Irrelevant"
    PREVALENT = "Prevalent"
    HIGHLY_PREVALENT = "HighlyPrevalent"

    @property
    def rank(self) -> int:
        return _RANK[self]


_RANK = {Prevalence.IRRELEVANT: 0, Prevalence.PREVALENT: 1, Prevalence.HIGHLY_PREVALENT: 2}


class Stratum(str, Enum):
    NO_NAIS = "NoNais"
    SYSTEMATIC = "Systematic"
    PLANNED = "Planned"
    NEITHER = "Neither"


@dataclass(frozen=True)
class PrevalenceLabel:
    indicator: str
    label: Prevalence
    frequency: float


@dataclass(frozen=True)
class StandoutResult:
    counts: Mapping[str, int]
    threshold: float
    standouts: Tuple[str, ...]
    auto: bool = False


@dataclass(frozen=True)
class DimensionPrevalence:
    dimension: str
    name: str
    irrelevant: Tuple[str, ...]
    prevalent: Tuple[str, ...]
    highly_prevalent: Tuple[str, ...]

    def codes(self, label: Prevalence) -> Tuple[str, ...]:
        return {
            Prevalence.IRRELEVANT: self.irrelevant,
            Prevalence.PREVALENT: self.prevalent,
            Prevalence.HIGHLY_PREVALENT: self.highly_prevalent,
        }[label]


@dataclass(frozen=True)
class MatchCounts:
    per_country: Mapping[str, int]
    per_indicator: Mapping[str, int]


def _document_country_ids(countries: Iterable[CountryRecord]) -> set:
    return {c.id for c in countries if c.has_document}


def prevalence_universe(
    indicators: Sequence[Indicator],
    dimensions: Sequence[Dimension],
    proposals: Sequence[ProposedIndicator] = (),
) -> List[Indicator]:
    """
    Indicators whose frequency series feeds the classification.
    参与普及度分类的指标集合

    Preliminary-origin dimensions only, status other than proposed, and never an indicator
    that was itself registered from a proposal (same dimension and name, case-insensitive).
    """
    preliminary_dims = {d.code for d in dimensions if d.origin == DimensionOrigin.PRELIMINARY}
    claimed = {
        (p.target_dimension.strip().upper(), p.name.strip().casefold())
        for p in proposals
        if len(p.target_dimension.strip()) == 1
    }
    universe = [
        i for i in indicators
        if i.dimension in preliminary_dims
        and i.status != IndicatorStatus.PROPOSED
        and (i.dimension, i.name.strip().casefold()) not in claimed
    ]
    return sorted(universe, key=lambda i: i.code)


def compute_frequencies(
    matches: Sequence[MatchRecord],
    countries: Sequence[CountryRecord],
    partial_weight: float = 1.0,
    indicator_codes: Optional[Iterable[str]] = None,
) -> List[FrequencyRecord]:
    """
    Weighted number of document-holding countries matching each indicator.
    计算每个指标的加权匹配国家数

    ``indicator_codes`` fixes the series (indicators without matches get 0); when omitted
    the series is the set of matched codes. Output is sorted by code.
    """
    weight = validate_partial_weight(partial_weight)
    documented = _document_country_ids(countries)
    if indicator_codes is None:
        codes = {m.indicator for m in matches}
    else:
        codes = set(indicator_codes)

    totals: Dict[str, float] = {code: 0.0 for code in codes}
    for match in matches:
        if match.country not in documented or match.indicator not in totals:
            continue
        totals[match.indicator] += 1.0 if match.quality == MatchQuality.FULL else weight
    return [FrequencyRecord(code, totals[code]) for code in sorted(totals)]


def _values(frequencies: Sequence[Union[FrequencyRecord, float, int]]) -> List[float]:
    return [float(f.frequency) if isinstance(f, FrequencyRecord) else float(f) for f in frequencies]


def compute_stats(
    frequencies: Sequence[Union[FrequencyRecord, float, int]], std_mode: str = "population"
) -> PrevalenceStats:
    """
    Mean, standard deviation and the two classification thresholds of a series.
    计算序列的均值、标准差和两个分类阈值

    ``std_mode`` selects the population (ddof=0) or sample (ddof=1) deviation. An
    all-equal series has std exactly 0; a one-element sample series too.
    """
    mode = validate_std_mode(std_mode)
    values = _values(frequencies)
    if not values:
        raise AnalysisError("cannot compute statistics of an empty frequency series")

    series = np.asarray(values, dtype=float)
    if np.all(series == series[0]):
        return PrevalenceStats.from_moments(float(series[0]), 0.0)
    ddof = 1 if mode == "sample" else 0
    if series.size - ddof <= 0:
        return PrevalenceStats.from_moments(float(series.mean()), 0.0)
    return PrevalenceStats.from_moments(float(series.mean()), float(series.std(ddof=ddof)))


def _at_least(value: float, bound: float) -> bool:
    return value >= bound - BOUNDARY_TOLERANCE * max(1.0, abs(bound))


def _at_most(value: float, bound: float) -> bool:
    return value <= bound + BOUNDARY_TOLERANCE * max(1.0, abs(bound))


def label_for(frequency: float, stats: PrevalenceStats) -> Prevalence:
    if _at_least(frequency, stats.hp_threshold):
        return Prevalence.HIGHLY_PREVALENT
    if _at_most(frequency, stats.irrelevant_threshold):
        return Prevalence.IRRELEVANT
    return Prevalence.PREVALENT


def classify(
    frequencies: Sequence[Union[FrequencyRecord, float, int]], stats: PrevalenceStats
) -> List[PrevalenceLabel]:
    """
    Label each indicator Highly Prevalent, Irrelevant or Prevalent, in that precedence.
    按优先级（高度普及、无关、普及）为每个指标分类

    Bare numbers are labelled with their index as the indicator key.
    """
    labels = []
    for index, item in enumerate(frequencies):
        if isinstance(item, FrequencyRecord):
            code, value = item.indicator, float(item.frequency)
        else:
            code, value = str(index), float(item)
        labels.append(PrevalenceLabel(code, label_for(value, stats), value))
    return labels


def count_matches(
    matches: Sequence[MatchRecord],
    countries: Sequence[CountryRecord],
    indicators: Optional[Iterable[str]] = None,
) -> MatchCounts:
    """Distinct matched indicators per document-holding country and matching countries per indicator."""
    documented = _document_country_ids(countries)
    per_country: Dict[str, set] = {cid: set() for cid in sorted(documented)}
    per_indicator: Dict[str, set] = {}
    if indicators is not None:
        per_indicator = {code: set() for code in indicators}
    for match in matches:
        if match.country not in documented:
            continue
        if indicators is not None and match.indicator not in per_indicator:
            continue
        per_country[match.country].add(match.indicator)
        per_indicator.setdefault(match.indicator, set()).add(match.country)
    return MatchCounts(
        per_country={cid: len(codes) for cid, codes in per_country.items()},
        per_indicator={code: len(per_indicator[code]) for code in sorted(per_indicator)},
    )


def detect_standouts(
    matches: Sequence[MatchRecord],
    countries: Sequence[CountryRecord],
    threshold: Union[int, str] = AUTO,
) -> StandoutResult:
    """
    Countries whose matched-indicator count is strictly greater than ``threshold``.
    检测匹配指标数严格超过阈值的国家

    ``auto`` uses the mean count over document-holding countries.
    """
    checked = validate_standout_threshold(threshold)
    counts = count_matches(matches, countries).per_country
    if checked == AUTO:
        if not counts:
            raise AnalysisError("auto standout threshold needs at least one country with a strategy document")
        value = float(np.mean(list(counts.values())))
    else:
        value = float(checked)
    standouts = tuple(cid for cid, count in counts.items() if count > value)
    logger.info("standout threshold %.4f -> %d standout(s): %s", value, len(standouts), ", ".join(standouts))
    return StandoutResult(counts=dict(counts), threshold=value, standouts=standouts, auto=checked == AUTO)


def stratify_countries(
    countries: Sequence[CountryRecord], standouts: Union[StandoutResult, Iterable[str]]
) -> Dict[str, Stratum]:
    """
    Assign each country to exactly one stratum.
    将每个国家划分到唯一的层级

    First matching rule wins: no document, uses indicators or standout, plans indicators.
    """
    standout_ids = set(standouts.standouts if isinstance(standouts, StandoutResult) else standouts)
    strata: Dict[str, Stratum] = {}
    for country in sorted(countries, key=lambda c: c.id):
        if not country.has_document:
            strata[country.id] = Stratum.NO_NAIS
        elif country.uses_indicators or country.id in standout_ids:
            strata[country.id] = Stratum.SYSTEMATIC
        elif country.plans_indicators:
            strata[country.id] = Stratum.PLANNED
        else:
            strata[country.id] = Stratum.NEITHER
    return strata


def summarize_by_dimension(
    labels: Sequence[PrevalenceLabel],
    indicators: Sequence[Indicator],
    dimensions: Sequence[Dimension],
) -> List[DimensionPrevalence]:
    """Per-dimension code lists for each prevalence label, dimensions in code order."""
    by_code = {i.code: i for i in indicators}
    grouped: Dict[str, Dict[Prevalence, List[str]]] = {}
    for label in labels:
        indicator = by_code.get(label.indicator)
        if indicator is None:
            continue
        grouped.setdefault(indicator.dimension, {p: [] for p in Prevalence})[label.label].append(label.indicator)

    names = {d.code: d.name for d in dimensions}
    summary = []
    for code in sorted(grouped):
        buckets = grouped[code]
        summary.append(
            DimensionPrevalence(
                dimension=code,
                name=names.get(code, code),
                irrelevant=tuple(sorted(buckets[Prevalence.IRRELEVANT])),
                prevalent=tuple(sorted(buckets[Prevalence.PREVALENT])),
                highly_prevalent=tuple(sorted(buckets[Prevalence.HIGHLY_PREVALENT])),
            )
        )
    return summary
