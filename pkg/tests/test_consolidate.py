#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
整合指标集与代码分配测试
"""

import os
import sys
import unittest
from pathlib import Path

# 添加项目根目录到Python路径
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.tools.consolidate import (
    Taxonomy,
    assign_codes,
    consolidate_set,
    diff_recorded,
    extend_taxonomy,
    merge_aliases,
)
from src.tools.prevalence import Prevalence, PrevalenceLabel
from src.tools.pipeline import AnalysisResults, run_through
from src.utils.ingest import load_bundle
from src.utils.input_validation import AnalysisError
from src.utils.model import (
    Dimension,
    DimensionOrigin,
    Indicator,
    IndicatorStatus,
    ProposedIndicator,
)

FIXTURE_DIR = Path(__file__).resolve().parents[1] / "fixtures" / "ebia"


def taxonomy(*letters, per_dimension=12):
    dimensions = tuple(Dimension(letter, f"Dimension {letter}") for letter in letters)
    indicators = tuple(
        Indicator(f"{letter}{n:02d}", letter, f"{letter} indicator {n}")
        for letter in letters
        for n in range(1, per_dimension + 1)
    )
    return Taxonomy(dimensions, indicators)


class TestMergeAliases(unittest.TestCase):
    """测试别名合并"""

    def test_first_member_wins_and_sources_union(self):
        merged = merge_aliases(
            [
                ProposedIndicator("Investment in startups", "A", ("CA",), alias_group="startup"),
                ProposedIndicator("Number of hubs", "H", ("DE",)),
                ProposedIndicator("AI startup funding", "A", ("KR", "CA"), alias_group="startup"),
            ]
        )
        self.assertEqual([p.name for p in merged], ["Investment in startups", "Number of hubs"])
        self.assertEqual(merged[0].source_countries, ("CA", "KR"))

    def test_accepted_if_any_member_is(self):
        merged = merge_aliases(
            [
                ProposedIndicator("X", "A", ("CA",), alias_group="g", accepted=False),
                ProposedIndicator("Y", "A", ("KR",), alias_group="g", accepted=True),
            ]
        )
        self.assertTrue(merged[0].accepted)

    def test_group_spanning_dimensions_fails(self):
        with self.assertRaises(AnalysisError):
            merge_aliases(
                [
                    ProposedIndicator("X", "A", ("CA",), alias_group="g"),
                    ProposedIndicator("Y", "B", ("KR",), alias_group="g"),
                ]
            )


class TestAssignCodes(unittest.TestCase):
    """测试代码分配与维度扩展"""

    def test_existing_dimension_continues_numbering(self):
        coded = assign_codes(
            [ProposedIndicator("Startups", "A", ("DE",)), ProposedIndicator("Revenue", "a", ("KR",))],
            taxonomy("A", "B"),
        )
        self.assertEqual([i.code for i in coded], ["A13", "A14"])
        self.assertTrue(all(i.status == IndicatorStatus.PROPOSED for i in coded))

    def test_new_dimension_takes_next_letter(self):
        coded, created = extend_taxonomy(
            [
                ProposedIndicator("HPC centers", "Centers and hubs", ("AR",)),
                ProposedIndicator("Transfer hubs", "centers  AND hubs", ("DE",)),
                ProposedIndicator("Public R&D investment", "Investment", ("DE",)),
            ],
            taxonomy("A", "G"),
        )
        self.assertEqual([i.code for i in coded], ["H01", "H02", "I01"])
        self.assertEqual([(d.code, d.origin) for d in created], [("H", DimensionOrigin.EXTENSION), ("I", DimensionOrigin.EXTENSION)])

    def test_rejected_proposals_are_skipped(self):
        coded = assign_codes([ProposedIndicator("Economic effect", "A", ("KR",), accepted=False)], taxonomy("A"))
        self.assertEqual(coded, [])

    def test_existing_indicator_keeps_code(self):
        coded = assign_codes([ProposedIndicator("a indicator 3", "A", ("DE",))], taxonomy("A"))
        self.assertEqual(coded[0].code, "A03")

    def test_unknown_letter_fails(self):
        with self.assertRaises(AnalysisError):
            assign_codes([ProposedIndicator("X", "Q", ("DE",))], taxonomy("A"))

    def test_letters_exhausted(self):
        with self.assertRaises(AnalysisError):
            assign_codes([ProposedIndicator("X", "Brand new", ("DE",))], taxonomy("A", "Z", per_dimension=1))

    def test_numbers_exhausted(self):
        with self.assertRaises(AnalysisError):
            assign_codes([ProposedIndicator("X", "A", ("DE",))], taxonomy("A", per_dimension=99))

    def test_same_name_twice_in_one_run_fails(self):
        with self.assertRaises(AnalysisError):
            assign_codes(
                [ProposedIndicator("Hubs", "A", ("DE",)), ProposedIndicator("hubs", "A", ("FR",))],
                taxonomy("A"),
            )

    def test_preliminary_taxonomy_drops_registered_proposals(self):
        dimensions = [Dimension("A", "Adoption"), Dimension("H", "Hubs", DimensionOrigin.EXTENSION)]
        indicators = [
            Indicator("A01", "A", "Companies"),
            Indicator("A02", "A", "Startups", IndicatorStatus.CONSOLIDATED),
            Indicator("H01", "H", "Transfer hubs", IndicatorStatus.CONSOLIDATED),
        ]
        proposals = [ProposedIndicator("Startups", "A", ("DE",)), ProposedIndicator("Transfer hubs", "Hubs", ("DE",))]
        base = Taxonomy.preliminary(dimensions, indicators, proposals)
        self.assertEqual([d.code for d in base.dimensions], ["A"])
        self.assertEqual([i.code for i in base.indicators], ["A01"])
        coded, _ = extend_taxonomy(proposals, base)
        self.assertEqual([i.code for i in coded], ["A02", "H01"])


class TestConsolidateSet(unittest.TestCase):
    def test_union_sorted_and_marked_consolidated(self):
        indicators = [Indicator("A07", "A", "Companies"), Indicator("B01", "B", "Networks")]
        labels = [
            PrevalenceLabel("A07", Prevalence.HIGHLY_PREVALENT, 5.0),
            PrevalenceLabel("B01", Prevalence.PREVALENT, 2.0),
        ]
        proposed = [Indicator("A13", "A", "Startups", IndicatorStatus.PROPOSED)]
        result = consolidate_set(labels, proposed, indicators)
        self.assertEqual([i.code for i in result], ["A07", "A13"])
        self.assertTrue(all(i.status == IndicatorStatus.CONSOLIDATED for i in result))

    def test_collision_fails(self):
        indicators = [Indicator("A07", "A", "Companies")]
        labels = [PrevalenceLabel("A07", Prevalence.HIGHLY_PREVALENT, 5.0)]
        with self.assertRaises(AnalysisError):
            consolidate_set(labels, [Indicator("A07", "A", "Other", IndicatorStatus.PROPOSED)], indicators)

    def test_diff_recorded(self):
        derived = [Indicator("A07", "A", "x"), Indicator("A13", "A", "y")]
        recorded = [Indicator("A07", "A", "x"), Indicator("B01", "B", "z")]
        self.assertEqual(diff_recorded(derived, recorded), (("A13",), ("B01",)))


class TestReferenceConsolidation(unittest.TestCase):
    """参考数据集上的整合结果"""

    @classmethod
    def setUpClass(cls):
        results = AnalysisResults(bundle=load_bundle(FIXTURE_DIR))
        run_through(results, "consolidate")
        cls.consolidation = results.consolidation

    def test_thirty_indicators(self):
        codes = self.consolidation.codes
        self.assertEqual(len(codes), 30)
        self.assertEqual(codes[:5], ("A07", "A13", "A14", "A15", "A16"))
        self.assertEqual(codes[-3:], ("I01", "I02", "I03"))

    def test_extension_dimensions(self):
        self.assertEqual(
            [(d.code, d.name) for d in self.consolidation.new_dimensions],
            [("H", "Centers, hubs, and multi-user structures"), ("I", "Investment in R&DI")],
        )

    def test_derived_set_matches_recorded(self):
        self.assertEqual(self.consolidation.missing_from_recorded, ())
        self.assertEqual(self.consolidation.unexpected_in_recorded, ())

    def test_alias_group_merged(self):
        merged = {p.name: p for p in self.consolidation.merged_proposals}
        self.assertNotIn("AI startup funding", merged)
        self.assertEqual(merged["Investment in SMEs and startups operating in AI - total"].source_countries, ("CA", "KR"))
        self.assertEqual(len(self.consolidation.proposed), 21)


if __name__ == "__main__":
    unittest.main()
