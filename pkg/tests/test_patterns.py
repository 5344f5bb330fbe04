#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
盲点、溢出比例、覆盖缺口与勘误核对测试
"""

import os
import sys
import unittest
from pathlib import Path

# 添加项目根目录到Python路径
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.tools.alignment import build_matrix, frequency_table
from src.tools.patterns import (
    build_pattern_report,
    compare_published,
    derived_quantities,
    detect_blind_spot,
    disagreements,
    flag_coverage,
    overflow_ratios,
)
from src.utils.ingest import load_bundle
from src.utils.input_validation import AnalysisError
from src.utils.model import OTA, OVA, ExtendedMatrix

FIXTURE_DIR = Path(__file__).resolve().parents[1] / "fixtures" / "ebia"


def tiny_matrix(cells):
    return ExtendedMatrix(rows=("GOV", OTA), columns=("EDU", OVA), cells=cells)


class TestBlindSpot(unittest.TestCase):
    def test_corner_cell(self):
        matrix = tiny_matrix({(OTA, OVA): ("X01",), ("GOV", "EDU"): ("A01",)})
        codes, share = detect_blind_spot(matrix, ["A01", "X01", "B01", "C01"])
        self.assertEqual(codes, ("X01",))
        self.assertEqual(share, 0.25)

    def test_empty_corner(self):
        codes, share = detect_blind_spot(tiny_matrix({}), ["A01"])
        self.assertEqual((codes, share), ((), 0.0))

    def test_empty_consolidated_set(self):
        with self.assertRaises(AnalysisError):
            detect_blind_spot(tiny_matrix({}), [])


class TestOverflow(unittest.TestCase):
    """测试溢出比例"""

    def test_ratios_are_unreduced_pairs(self):
        matrix = tiny_matrix(
            {
                ("GOV", "EDU"): ("A01", "A02"),
                (OTA, "EDU"): ("A03", "A04", "A05", "A06"),
                ("GOV", OVA): ("A07", "A08"),
                (OTA, OVA): ("A09",),
            }
        )
        ratios = overflow_ratios(matrix)
        self.assertEqual(ratios.vertical_overflow, (3, 6))
        self.assertEqual(ratios.transversal_overflow, (4, 2))
        self.assertEqual(dict(ratios.per_axis_overflow), {"EDU": (4, 2)})
        self.assertEqual(dict(ratios.per_transversal_overflow), {"GOV": (2, 2)})
        self.assertEqual(ratios.outside_dominant_verticals, ("EDU",))


class TestCoverageFlags(unittest.TestCase):
    def test_low_and_uncovered(self):
        low, uncovered = flag_coverage({"EDU": 6, "PS": 1, "GOV": 0, "INT": 3}, 3)
        self.assertEqual(low, ("PS", "GOV"))
        self.assertEqual(uncovered, ("GOV",))

    def test_minimum_must_be_positive(self):
        for bad in (0, -1, 2.5, True):
            with self.subTest(minimum=bad):
                with self.assertRaises(AnalysisError):
                    flag_coverage({"EDU": 1}, bad)


class TestComparePublished(unittest.TestCase):
    """测试与已发表数值的核对"""

    def test_mapping_expands_per_key(self):
        derived = {"row_totals": {"OTA": 21, "GOV": 4}, "blind_spot_share": 0.1}
        published = {"row_totals": {"OTA": 22, "GOV": 4}, "blind_spot_share": 0.10004, "other": 1}
        checks = compare_published(derived, published)
        self.assertEqual([c.quantity for c in checks], ["blind_spot_share", "row_totals.GOV", "row_totals.OTA"])
        self.assertEqual([c.quantity for c in disagreements(checks)], ["row_totals.OTA"])

    def test_code_lists_compare_as_sets(self):
        checks = compare_published({"blind_spot": ["A16", "B31"]}, {"blind_spot": ["B31", "A16"]})
        self.assertTrue(checks[0].agrees)

    def test_disagreement_is_logged(self):
        with self.assertLogs("stratscope", level="INFO") as logs:
            compare_published({"row_totals": {"OTA": 21}}, {"row_totals": {"OTA": 22}})
        self.assertEqual(
            [r.levelname for r in logs.records if "row_totals.OTA" in r.getMessage()], ["INFO"]
        )

    def test_nothing_published(self):
        self.assertEqual(compare_published({"blind_spot": []}, None), [])


class TestReferencePatterns(unittest.TestCase):
    """参考数据集的第三阶段结果"""

    @classmethod
    def setUpClass(cls):
        bundle = load_bundle(FIXTURE_DIR)
        cls.bundle = bundle
        matrix = build_matrix(bundle.correspondences, bundle.axis_scheme, bundle.consolidated)
        cls.table = frequency_table(matrix)
        cls.report = build_pattern_report(matrix, bundle.consolidated, 3)

    def test_blind_spot(self):
        self.assertEqual(self.report.blind_spot, ("A16", "B31", "H01"))
        self.assertAlmostEqual(self.report.blind_spot_share, 0.1)

    def test_overflow(self):
        report = self.report
        self.assertEqual(report.vertical_overflow, (5, 32))
        self.assertEqual(report.transversal_overflow, (21, 11))
        self.assertEqual(
            dict(report.per_axis_overflow),
            {"EDU": (5, 1), "W&T": (6, 1), "R&DE": (5, 4), "App.PS": (4, 2), "App.PA": (0, 3), "PS": (1, 0)},
        )
        self.assertEqual(report.outside_dominant_verticals, ("EDU", "W&T", "R&DE", "App.PS", "PS"))

    def test_coverage_flags(self):
        self.assertEqual(self.report.low_coverage_axes, ("PS",))
        self.assertEqual(self.report.uncovered_axes, ())

    def test_two_published_errata(self):
        checks = compare_published(derived_quantities(self.table, self.report), self.bundle.published)
        wrong = {c.quantity: (c.published, c.derived) for c in disagreements(checks)}
        self.assertEqual(wrong, {"row_totals.OTA": (22, 21), "transversal_overflow": ([22, 12], [21, 11])})
        self.assertEqual(len(checks), 15)


if __name__ == "__main__":
    unittest.main()
