#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
指标普及度、突出战略与国家分层测试
"""

import math
import os
import sys
import unittest
from pathlib import Path

# 添加项目根目录到Python路径
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.tools.prevalence import (
    Prevalence,
    Stratum,
    classify,
    compute_frequencies,
    compute_stats,
    count_matches,
    detect_standouts,
    label_for,
    prevalence_universe,
    stratify_countries,
    summarize_by_dimension,
)
from src.utils.ingest import load_bundle
from src.utils.input_validation import AnalysisError, ValidationError
from src.utils.model import CountryRecord, FrequencyRecord, MatchQuality, MatchRecord, PrevalenceStats

FIXTURE_DIR = Path(__file__).resolve().parents[1] / "fixtures" / "ebia"

HIGHLY_PREVALENT = ["A07", "B01", "B06", "B13", "B17", "C01", "C02", "C03", "D01"]


class TestComputeStats(unittest.TestCase):
    """测试描述统计与阈值"""

    def test_population_and_sample(self):
        population = compute_stats([0, 0, 1, 2, 7], "population")
        self.assertAlmostEqual(population.mean, 2.0)
        self.assertAlmostEqual(population.std_dev, math.sqrt(6.8))
        sample = compute_stats([0, 0, 1, 2, 7], "sample")
        self.assertAlmostEqual(sample.std_dev, math.sqrt(8.5))

    def test_all_equal_series_has_zero_spread(self):
        stats = compute_stats([0.1, 0.1, 0.1])
        self.assertEqual(stats.std_dev, 0.0)
        self.assertEqual(stats.hp_threshold, 0.1)
        self.assertEqual(stats.irrelevant_threshold, 0.1)

    def test_single_value_sample(self):
        stats = compute_stats([3], "sample")
        self.assertEqual((stats.mean, stats.std_dev), (3.0, 0.0))

    def test_empty_series_fails(self):
        with self.assertRaises(AnalysisError):
            compute_stats([])

    def test_unknown_mode(self):
        with self.assertRaises(ValidationError):
            compute_stats([1, 2], "median")


class TestClassify(unittest.TestCase):
    """测试三分类及其优先级"""

    def test_boundaries(self):
        stats = PrevalenceStats.from_moments(2.0, 1.0)
        self.assertEqual(label_for(3.0, stats), Prevalence.HIGHLY_PREVALENT)
        self.assertEqual(label_for(1.0, stats), Prevalence.IRRELEVANT)
        self.assertEqual(label_for(2.5, stats), Prevalence.PREVALENT)

    def test_highly_prevalent_wins_when_spread_is_zero(self):
        stats = compute_stats([4, 4, 4])
        labels = classify([4, 4, 4], stats)
        self.assertEqual({label.label for label in labels}, {Prevalence.HIGHLY_PREVALENT})

    def test_float_noise_on_threshold(self):
        stats = PrevalenceStats.from_moments(0.1 + 0.2, 0.0)
        self.assertEqual(label_for(0.3, stats), Prevalence.HIGHLY_PREVALENT)

    def test_bare_numbers_keyed_by_index(self):
        labels = classify([0, 5], compute_stats([0, 5]))
        self.assertEqual([label.indicator for label in labels], ["0", "1"])

    def test_frequency_records_keep_codes(self):
        series = [FrequencyRecord("A01", 0.0), FrequencyRecord("A02", 3.0), FrequencyRecord("A03", 1.0)]
        labels = classify(series, compute_stats(series))
        self.assertEqual(labels[1].indicator, "A02")
        self.assertEqual(labels[1].label, Prevalence.HIGHLY_PREVALENT)


class TestFrequencies(unittest.TestCase):
    def setUp(self):
        self.countries = [
            CountryRecord("DE", "Germany", True),
            CountryRecord("FR", "France", True),
            CountryRecord("ZA", "South Africa", False),
        ]
        self.matches = [
            MatchRecord("A01", "DE"),
            MatchRecord("A01", "FR", MatchQuality.PARTIAL),
            MatchRecord("A02", "ZA"),
        ]

    def test_partial_weight_and_documentless_countries(self):
        full = compute_frequencies(self.matches, self.countries, 1.0, ["A01", "A02", "A03"])
        self.assertEqual([(f.indicator, f.frequency) for f in full], [("A01", 2.0), ("A02", 0.0), ("A03", 0.0)])
        half = compute_frequencies(self.matches, self.countries, 0.5, ["A01"])
        self.assertEqual(half[0].frequency, 1.5)

    def test_weight_outside_unit_interval(self):
        with self.assertRaises(ValidationError):
            compute_frequencies(self.matches, self.countries, 1.5)

    def test_count_matches_distinct(self):
        counts = count_matches(self.matches + [MatchRecord("A02", "DE")], self.countries)
        self.assertEqual(dict(counts.per_country), {"DE": 2, "FR": 1})
        self.assertEqual(dict(counts.per_indicator), {"A01": 2, "A02": 1})


class TestStandoutsAndStrata(unittest.TestCase):
    """测试突出战略检测与国家分层"""

    def setUp(self):
        self.countries = [
            CountryRecord("AA", "Alpha", True, uses_indicators=True),
            CountryRecord("BB", "Beta", True),
            CountryRecord("CC", "Gamma", True, plans_indicators=True),
            CountryRecord("DD", "Delta", True),
            CountryRecord("EE", "Epsilon", False),
        ]
        self.matches = [MatchRecord(f"A{n:02d}", "BB") for n in range(1, 5)] + [MatchRecord("A01", "CC")]

    def test_strict_threshold(self):
        result = detect_standouts(self.matches, self.countries, 4)
        self.assertEqual(result.standouts, ())
        result = detect_standouts(self.matches, self.countries, 3)
        self.assertEqual(result.standouts, ("BB",))

    def test_auto_threshold_is_mean_over_document_countries(self):
        result = detect_standouts(self.matches, self.countries, "auto")
        self.assertAlmostEqual(result.threshold, 5 / 4)
        self.assertTrue(result.auto)
        self.assertEqual(result.standouts, ("BB",))

    def test_auto_without_documents(self):
        with self.assertRaises(AnalysisError):
            detect_standouts([], [CountryRecord("EE", "Epsilon", False)], "auto")

    def test_negative_threshold_rejected(self):
        with self.assertRaises(ValidationError):
            detect_standouts(self.matches, self.countries, -1)

    def test_strata_first_rule_wins(self):
        strata = stratify_countries(self.countries, ["BB", "CC"])
        self.assertEqual(
            strata,
            {
                "AA": Stratum.SYSTEMATIC,
                "BB": Stratum.SYSTEMATIC,
                "CC": Stratum.SYSTEMATIC,
                "DD": Stratum.NEITHER,
                "EE": Stratum.NO_NAIS,
            },
        )
        self.assertEqual(stratify_countries(self.countries, [])["CC"], Stratum.PLANNED)


class TestReferenceDataset(unittest.TestCase):
    """参考数据集上的第一阶段结果"""

    @classmethod
    def setUpClass(cls):
        bundle = load_bundle(FIXTURE_DIR)
        cls.bundle = bundle
        cls.universe = prevalence_universe(bundle.indicators, bundle.dimensions, bundle.proposals)
        codes = [i.code for i in cls.universe]
        cls.frequencies = compute_frequencies(bundle.matches, bundle.countries, 1.0, codes)
        cls.stats = compute_stats(cls.frequencies)
        cls.labels = classify(cls.frequencies, cls.stats)

    def test_universe_is_the_preliminary_list(self):
        self.assertEqual(len(self.universe), 56)
        codes = {i.code for i in self.universe}
        self.assertIn("A07", codes)
        self.assertNotIn("A13", codes)
        self.assertNotIn("H01", codes)

    def test_stats(self):
        self.assertAlmostEqual(self.stats.mean, 69 / 56)
        self.assertAlmostEqual(self.stats.std_dev, math.sqrt(231 / 56 - (69 / 56) ** 2))
        self.assertEqual(self.stats.irrelevant_threshold, 0.0)

    def test_highly_prevalent_set(self):
        found = [label.indicator for label in self.labels if label.label == Prevalence.HIGHLY_PREVALENT]
        self.assertEqual(found, HIGHLY_PREVALENT)

    def test_dimension_summary_matches_published_groups(self):
        summary = {d.dimension: d for d in summarize_by_dimension(self.labels, self.bundle.indicators, self.bundle.dimensions)}
        self.assertEqual(summary["A"].irrelevant, ("A01", "A03", "A06", "A10", "A11", "A12"))
        self.assertEqual(summary["A"].prevalent, ("A02", "A04", "A05", "A08", "A09"))
        self.assertEqual(summary["A"].highly_prevalent, ("A07",))
        self.assertEqual(
            summary["B"].prevalent,
            ("B02", "B05", "B14", "B15", "B16", "B18", "B20", "B21", "B22", "B23", "B24", "B27"),
        )
        self.assertEqual(len(summary["B"].irrelevant), 14)

    def test_standouts_and_strata(self):
        result = detect_standouts(self.bundle.matches, self.bundle.countries, "auto")
        self.assertAlmostEqual(result.threshold, 5.75)
        self.assertEqual(result.standouts, ("AR", "CA", "DE", "KR", "MX"))
        self.assertEqual(result.counts["AR"], 15)
        self.assertEqual(result.counts["AU"], 0)
        strata = stratify_countries(self.bundle.countries, result)
        self.assertEqual(strata["ZA"], Stratum.NO_NAIS)
        self.assertEqual(strata["FR"], Stratum.PLANNED)
        self.assertEqual(strata["US"], Stratum.NEITHER)
        self.assertEqual(sum(1 for s in strata.values() if s == Stratum.SYSTEMATIC), 5)


if __name__ == "__main__":
    unittest.main()
