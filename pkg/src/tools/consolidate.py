#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Consolidated indicator set
整合后的可行指标集合

Alias merging of proposed indicators, code assignment with taxonomy extension, and the
union of highly prevalent preliminary indicators with accepted proposals.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

from src.tools.prevalence import Prevalence, PrevalenceLabel
from src.utils.input_validation import AnalysisError
from src.utils.logging_utils import get_logger
from src.utils.model import (
    Dimension,
    DimensionOrigin,
    Indicator,
    IndicatorStatus,
    ProposedIndicator,
)

logger = get_logger(__name__)

MAX_INDICATOR_NUMBER = 99


def _fold(text: str) -> str:
    return " ".join(text.split()).casefold()


@dataclass(frozen=True)
class Taxonomy:
    dimensions: Tuple[Dimension, ...] = ()
    indicators: Tuple[Indicator, ...] = ()

    @classmethod
    def preliminary(
        cls,
        dimensions: Sequence[Dimension],
        indicators: Sequence[Indicator],
        proposals: Sequence[ProposedIndicator] = (),
    ) -> "Taxonomy":
        """
        The taxonomy before any proposal was registered.
        注册任何提议之前的分类体系

        Keeps preliminary-origin dimensions and drops indicators whose (dimension, name)
        belongs to a proposal row.
        """
        kept_dims = tuple(d for d in dimensions if d.origin == DimensionOrigin.PRELIMINARY)
        letters = {d.code for d in kept_dims}
        claimed = {
            (p.target_dimension.strip().upper(), _fold(p.name))
            for p in proposals
            if len(p.target_dimension.strip()) == 1
        }
        kept = tuple(
            i for i in indicators
            if i.dimension in letters
            and i.status != IndicatorStatus.PROPOSED
            and (i.dimension, _fold(i.name)) not in claimed
        )
        return cls(dimensions=kept_dims, indicators=kept)

    def dimension_for(self, target: str) -> Optional[Dimension]:
        """Match a target by letter, then exact name, then case-insensitive name."""
        text = target.strip()
        if len(text) == 1 and text.isalpha():
            for dimension in self.dimensions:
                if dimension.code == text.upper():
                    return dimension
            return None
        for dimension in self.dimensions:
            if dimension.name == text:
                return dimension
        folded = _fold(text)
        for dimension in self.dimensions:
            if _fold(dimension.name) == folded:
                return dimension
        return None

    def existing_code(self, dimension: str, name: str) -> Optional[str]:
        candidates = [i for i in self.indicators if i.dimension == dimension]
        for indicator in candidates:
            if indicator.name == name:
                return indicator.code
        folded = _fold(name)
        for indicator in candidates:
            if _fold(indicator.name) == folded:
                return indicator.code
        return None

    def max_number(self, dimension: str) -> int:
        return max((i.number for i in self.indicators if i.dimension == dimension), default=0)

    def next_letter(self) -> str:
        if not self.dimensions:
            return "A"
        highest = max(d.code for d in self.dimensions)
        if highest == "Z":
            raise AnalysisError("dimension letters exhausted: no letter after Z is available")
        return string.ascii_uppercase[string.ascii_uppercase.index(highest) + 1]

    def with_dimension(self, dimension: Dimension) -> "Taxonomy":
        return Taxonomy(self.dimensions + (dimension,), self.indicators)

    def with_indicator(self, indicator: Indicator) -> "Taxonomy":
        return Taxonomy(self.dimensions, self.indicators + (indicator,))


@dataclass(frozen=True)
class ConsolidationResult:
    indicators: Tuple[Indicator, ...]
    new_dimensions: Tuple[Dimension, ...] = ()
    highly_prevalent: Tuple[str, ...] = ()
    proposed: Tuple[str, ...] = ()
    merged_proposals: Tuple[ProposedIndicator, ...] = ()
    missing_from_recorded: Tuple[str, ...] = field(default_factory=tuple)
    unexpected_in_recorded: Tuple[str, ...] = field(default_factory=tuple)

    @property
    def codes(self) -> Tuple[str, ...]:
        return tuple(i.code for i in self.indicators)


def merge_aliases(proposed: Sequence[ProposedIndicator]) -> List[ProposedIndicator]:
    """
    Collapse proposals that share an alias group into one entry.
    合并同一别名组内的提议指标

    The first member supplies the name and target dimension; source countries are unioned
    in first-seen order; the group is accepted if any member is. Ungrouped entries pass
    through unchanged, and output order follows each group's first appearance.
    """
    merged: List[ProposedIndicator] = []
    group_index: Dict[str, int] = {}
    for proposal in proposed:
        group = (proposal.alias_group or "").strip()
        if not group:
            merged.append(proposal)
            continue
        if group not in group_index:
            group_index[group] = len(merged)
            merged.append(replace(proposal, alias_group=group))
            continue
        head = merged[group_index[group]]
        if _fold(head.target_dimension) != _fold(proposal.target_dimension):
            raise AnalysisError(
                f"alias group {group!r} spans dimensions {head.target_dimension!r} "
                f"and {proposal.target_dimension!r}"
            )
        sources = list(head.source_countries)
        sources.extend(c for c in proposal.source_countries if c not in sources)
        merged[group_index[group]] = replace(
            head, source_countries=tuple(sources), accepted=head.accepted or proposal.accepted
        )
    return merged


def extend_taxonomy(
    proposed: Sequence[ProposedIndicator], taxonomy: Taxonomy
) -> Tuple[List[Indicator], List[Dimension]]:
    """
    Code accepted proposals, creating dimensions as needed.
    为已接受的提议分配代码，必要时新增维度

    Returns the coded indicators (status proposed, input order) and the dimensions created.
    A proposal already registered under the same (dimension, name) keeps its code.
    """
    current = taxonomy
    coded: List[Indicator] = []
    created: List[Dimension] = []
    for proposal in proposed:
        if not proposal.accepted:
            continue
        dimension = current.dimension_for(proposal.target_dimension)
        if dimension is None:
            target = proposal.target_dimension.strip()
            if len(target) == 1:
                raise AnalysisError(f"proposal {proposal.name!r} targets unknown dimension {target!r}")
            dimension = Dimension(code=current.next_letter(), name=target, origin=DimensionOrigin.EXTENSION)
            current = current.with_dimension(dimension)
            created.append(dimension)
            logger.info("new dimension %s: %s", dimension.code, dimension.name)

        code = current.existing_code(dimension.code, proposal.name)
        if code is None:
            number = current.max_number(dimension.code) + 1
            if number > MAX_INDICATOR_NUMBER:
                raise AnalysisError(f"dimension {dimension.code} has no indicator number left")
            code = f"{dimension.code}{number:02d}"
        indicator = Indicator(
            code=code,
            dimension=dimension.code,
            name=proposal.name,
            status=IndicatorStatus.PROPOSED,
        )
        if any(c.code == code for c in coded):
            raise AnalysisError(f"proposal {proposal.name!r} resolves to code {code}, already assigned in this run")
        coded.append(indicator)
        current = current.with_indicator(indicator)
    return coded, created


def assign_codes(proposed: Sequence[ProposedIndicator], taxonomy: Taxonomy) -> List[Indicator]:
    """
    Give every accepted proposal its indicator code.
    为每个已接受的提议分配指标代码

    Existing dimensions continue their numbering; a new dimension takes the next letter
    after the current maximum and numbers from 01. Assignment follows input order.
    """
    coded, _ = extend_taxonomy(proposed, taxonomy)
    return coded


def consolidate_set(
    preliminary_labels: Sequence[PrevalenceLabel],
    accepted_proposed: Sequence[Indicator],
    indicators: Sequence[Indicator] = (),
) -> List[Indicator]:
    """
    Highly prevalent preliminary indicators plus coded accepted proposals, sorted by code.
    高度普及的初始指标加上已接受的提议指标，按代码排序
    """
    by_code = {i.code: i for i in indicators}
    result: Dict[str, Indicator] = {}
    for label in preliminary_labels:
        if label.label != Prevalence.HIGHLY_PREVALENT:
            continue
        source = by_code.get(label.indicator)
        if source is None:
            raise AnalysisError(f"labelled indicator {label.indicator} is not in the dataset")
        result[source.code] = replace(source, status=IndicatorStatus.CONSOLIDATED)
    for indicator in accepted_proposed:
        if indicator.code in result:
            raise AnalysisError(f"code collision in consolidated set: {indicator.code}")
        result[indicator.code] = replace(indicator, status=IndicatorStatus.CONSOLIDATED)
    return [result[code] for code in sorted(result)]


def diff_recorded(
    derived: Sequence[Indicator], recorded: Sequence[Indicator]
) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
    """Codes derived but not recorded as consolidated, and recorded but not derived."""
    derived_codes = {i.code for i in derived}
    recorded_codes = {i.code for i in recorded}
    return tuple(sorted(derived_codes - recorded_codes)), tuple(sorted(recorded_codes - derived_codes))
