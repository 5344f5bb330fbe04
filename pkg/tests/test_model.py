#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
领域类型与数据集校验单元测试
"""

import os
import string
import sys
import unittest

from hypothesis import given, settings
from hypothesis import strategies as st

# 添加项目根目录到Python路径
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.utils.input_validation import CodeFormatError
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
    ExtendedMatrix,
    Indicator,
    MatchRecord,
    PrevalenceStats,
    ProposedIndicator,
    StrategicAction,
    is_canonical_code,
    normalize_code,
    validate_dataset,
    validate_proposals,
)


def small_dataset():
    dimensions = [Dimension("A", "Adoption"), Dimension("B", "Knowledge")]
    indicators = [Indicator("A01", "A", "Companies using AI"), Indicator("B01", "B", "Networks")]
    countries = [
        CountryRecord("DE", "Germany", True, uses_indicators=True),
        CountryRecord("ZA", "South Africa", False),
    ]
    matches = [MatchRecord("A01", "DE")]
    scheme = AxisScheme(
        vertical_axes=(Axis("EDU", "Education", "ED", AxisKind.VERTICAL),),
        transversal_axes=(Axis("GOV", "Governance", "GIA", AxisKind.TRANSVERSAL),),
    )
    correspondences = [CorrespondenceEntry("A01", "EDU", "GOV"), CorrespondenceEntry("B01", OVA, OTA)]
    return dict(
        indicators=indicators,
        dimensions=dimensions,
        countries=countries,
        matches=matches,
        axis_scheme=scheme,
        correspondences=correspondences,
    )


class TestNormalizeCode(unittest.TestCase):
    """测试指标代码规范化"""

    def test_pads_and_uppercases(self):
        self.assertEqual(normalize_code("a1"), "A01")
        self.assertEqual(normalize_code(" B17 "), "B17")
        self.assertEqual(normalize_code("h5"), "H05")

    def test_rejects_malformed_codes_with_position(self):
        cases = {"": 0, "1A": 0, "A": 1, "AB1": 1, "A1x": 2, "A123": 3, "A0": 1}
        for raw, position in cases.items():
            with self.subTest(raw=raw):
                with self.assertRaises(CodeFormatError) as ctx:
                    normalize_code(raw)
                self.assertEqual(ctx.exception.position, position)

    def test_is_canonical(self):
        self.assertTrue(is_canonical_code("A07"))
        self.assertFalse(is_canonical_code("A7"))
        self.assertFalse(is_canonical_code("A00"))

    @settings(max_examples=500, derandomize=True, deadline=None)
    @given(
        st.sampled_from(string.ascii_letters),
        st.integers(min_value=1, max_value=99),
        st.booleans(),
        st.sampled_from(["", " ", "\t"]),
    )
    def test_normalisation_is_idempotent(self, letter, number, padded, blank):
        digits = f"{number:02d}" if padded else str(number)
        code = normalize_code(blank + letter + digits + blank)
        self.assertEqual(code, f"{letter.upper()}{number:02d}")
        self.assertEqual(normalize_code(code), code)
        self.assertTrue(is_canonical_code(code))

    @settings(max_examples=500, derandomize=True, deadline=None)
    @given(st.text(alphabet="aZ019 x", max_size=5))
    def test_accepted_text_normalises_to_a_fixed_point(self, raw):
        try:
            code = normalize_code(raw)
        except CodeFormatError:
            return
        self.assertEqual(normalize_code(code), code)


class TestPrevalenceStats(unittest.TestCase):
    def test_lower_threshold_truncated_at_zero(self):
        stats = PrevalenceStats.from_moments(1.0, 1.5)
        self.assertEqual(stats.hp_threshold, 2.5)
        self.assertEqual(stats.irrelevant_threshold, 0.0)


class TestExtendedMatrix(unittest.TestCase):
    def test_empty_cells_and_unknown_cells(self):
        matrix = ExtendedMatrix(rows=("GOV", OTA), columns=("EDU", OVA), cells={("GOV", "EDU"): ("A01",)})
        self.assertEqual(matrix.cell(OTA, OVA), ())
        self.assertEqual(matrix.column_codes("EDU"), ["A01"])
        self.assertEqual(matrix.interior_rows, ("GOV",))
        with self.assertRaises(KeyError):
            matrix.cell("INT", "EDU")


class TestValidateDataset(unittest.TestCase):
    """测试数据集整体校验"""

    def test_valid_dataset_has_no_violations(self):
        report = validate_dataset(**small_dataset())
        self.assertTrue(report.valid)
        self.assertEqual(len(report), 0)

    def test_dangling_and_duplicate_references(self):
        data = small_dataset()
        data["matches"] = [MatchRecord("A01", "DE"), MatchRecord("A01", "DE"), MatchRecord("C09", "XX")]
        report = validate_dataset(**data)
        kinds = sorted(v.kind for v in report)
        self.assertEqual(kinds, ["dangling_reference", "dangling_reference", "duplicate"])
        self.assertTrue(all(v.source == "matches.csv" for v in report))

    def test_sentinel_misuse(self):
        data = small_dataset()
        data["correspondences"] = [CorrespondenceEntry("A01", OTA, OVA)]
        report = validate_dataset(**data)
        self.assertEqual({v.kind for v in report}, {"sentinel_misuse"})
        self.assertEqual(len(report), 2)

    def test_sentinel_declared_as_axis(self):
        data = small_dataset()
        scheme = data["axis_scheme"]
        data["axis_scheme"] = AxisScheme(
            vertical_axes=scheme.vertical_axes + (Axis(OVA, "Outside", "OVA", AxisKind.VERTICAL),),
            transversal_axes=scheme.transversal_axes,
        )
        kinds = [v.kind for v in validate_dataset(**data)]
        self.assertIn("sentinel_misuse", kinds)

    def test_inconsistent_country_flags(self):
        data = small_dataset()
        data["countries"] = [CountryRecord("ZA", "South Africa", False, plans_indicators=True)]
        data["matches"] = []
        report = validate_dataset(**data)
        self.assertEqual([v.kind for v in report], ["inconsistent_country"])

    def test_extension_dimension_collision(self):
        data = small_dataset()
        data["dimensions"] = data["dimensions"] + [Dimension("B", "Hubs", DimensionOrigin.EXTENSION)]
        report = validate_dataset(**data)
        self.assertEqual([v.kind for v in report], ["extension_collision"])

    def test_missing_transversal_axes(self):
        data = small_dataset()
        data["axis_scheme"] = AxisScheme(vertical_axes=data["axis_scheme"].vertical_axes)
        data["correspondences"] = []
        report = validate_dataset(**data)
        self.assertEqual([(v.kind, v.key) for v in report], [("missing_axes", "transversal")])

    def test_action_with_unknown_axis(self):
        data = small_dataset()
        scheme = data["axis_scheme"]
        data["axis_scheme"] = AxisScheme(
            scheme.vertical_axes, scheme.transversal_axes, (StrategicAction("X-01", "PS", "Patrol"),)
        )
        report = validate_dataset(**data)
        self.assertEqual([(v.source, v.key) for v in report], [("actions.csv", "X-01")])

    def test_order_independent(self):
        data = small_dataset()
        data["matches"] = [MatchRecord("Z01", "DE"), MatchRecord("A01", "QQ")]
        forward = validate_dataset(**data)
        data["matches"] = list(reversed(data["matches"]))
        self.assertEqual(forward, validate_dataset(**data))

    def test_proposal_country_references(self):
        countries = small_dataset()["countries"]
        proposals = [
            ProposedIndicator("Startups", "A", ("DE",)),
            ProposedIndicator("Hubs", "Centers", ("FR",)),
        ]
        report = validate_proposals(proposals, countries)
        self.assertEqual([(v.kind, v.key) for v in report], [("dangling_reference", "Hubs")])


if __name__ == "__main__":
    unittest.main()
