# Copyright (c) 2025, Ahmad Hussnain and Contributors
# See license.txt

import io

import numpy as np

from needstack.exceptions import DataError, MissingSeedError, TsvParseError, ValidationError
from needstack.needstack.corpus.corpus import TweetRecord
from needstack.needstack.embeddings.embeddings import EmbeddingModel, TrainConfig, Vocabulary
from needstack.needstack.evaluation.evaluation import (
    EvalReport,
    GoldLabels,
    ResourceLexicon,
    baseline_rank,
    baseline_scores,
    bundled_lexicons,
    cohens_kappa,
    coverage_prefix,
    label_top,
    load_gold,
    precision_at_k,
    precision_curve,
    prf1,
    published_ranking,
    write_curve,
)
from needstack.needstack.evaluation.evaluation_helpers import baseline_preprocess, normalize_term, stopwords
from needstack.tests.utils import NeedstackTestCase


def labels_from_counts(a, b, c, d):
    """Two annotators' labels from a 2x2 table: a yes/yes, b yes/no, c no/yes, d no/no."""
    first, second = {}, {}
    pattern = [(True, True)] * a + [(True, False)] * b + [(False, True)] * c + [(False, False)] * d
    for i, (x, y) in enumerate(pattern):
        first["s%d" % i] = x
        second["s%d" % i] = y
    return GoldLabels(first), GoldLabels(second)


def tweet(tweet_id, text):
    return TweetRecord(tweet_id, text, None, None)


def baseline_model(rows):
    terms = list(rows)
    matrix = np.array([rows[t] for t in terms], dtype=np.float32)
    return EmbeddingModel(Vocabulary(terms, [1] * len(terms)), matrix, np.zeros_like(matrix),
                          TrainConfig(dim=matrix.shape[1], min_count=1))


class TestPrecisionAtK(NeedstackTestCase):
    def setUp(self):
        super().setUp()
        self.ranked = published_ranking()
        self.lexicons = bundled_lexicons()

    def test_fixtures(self):
        self.assertEqual(len(self.ranked), 100)
        self.assertEqual(self.ranked.terms()[:3], ["medical-equipment", "equipment", "medical-supplies"])
        self.assertEqual([lex.name for lex in self.lexicons], ["WHO", "HHS"])
        self.assertEqual(len(stopwords()), 170)

    def test_published_top10(self):
        report = precision_at_k(self.ranked, self.lexicons, ks=[10])
        self.assertAlmostEqual(report["precision@10[WHO]"], 0.8, delta=1e-12)
        self.assertAlmostEqual(report["precision@10[HHS]"], 0.9, delta=1e-12)
        self.assertAlmostEqual(report["precision@10[union]"], 1.0, delta=1e-12)

    def test_published_top100(self):
        report = precision_at_k(self.ranked, self.lexicons, ks=[100])
        self.assertEqual(report.counts["matches@100[WHO]"], 41)
        self.assertEqual(report.counts["matches@100[HHS]"], 57)
        self.assertEqual(report.counts["matches@100[union]"], 64)
        self.assertAlmostEqual(report["precision@100[union]"], 0.64, delta=1e-12)

    def test_covered_prefix(self):
        self.assertEqual(coverage_prefix(self.ranked, self.lexicons), 13)
        report = precision_at_k(self.ranked, self.lexicons, ks=[20])
        self.assertEqual(report.counts["matches@20[union]"], 19)

    def test_union_dominates(self):
        for k, name, value, _matches in precision_curve(self.ranked, self.lexicons):
            if name == "union":
                continue
            union = precision_at_k(self.ranked, self.lexicons, ks=[k])["precision@{0}[union]".format(k)]
            self.assertGreaterEqual(union, value)

    def test_complete_lexicon(self):
        lexicon = ResourceLexicon("ALL", frozenset(self.ranked.terms()))
        for _k, _name, value, _matches in precision_curve(self.ranked, [lexicon]):
            self.assertEqual(value, 1.0)

    def test_k_beyond_list(self):
        with self.assertRaises(DataError) as ctx:
            precision_at_k(self.ranked.terms()[:5], self.lexicons, ks=[10])
        self.assertIn("rank list shorter than k", str(ctx.exception))
        self.assertEqual(ctx.exception.exit_code, 2)

    def test_normalization(self):
        self.assertEqual(normalize_term("  Medical-Equipment "), "medical equipment")
        self.assertEqual(normalize_term("#PPE"), "ppe")
        self.assertEqual(normalize_term("personal   protective-equipment"), "personal protective equipment")
        self.assertIn("medical-equipment", self.lexicons[0])

    def test_curve_tsv(self):
        out = io.StringIO()
        write_curve(precision_curve(self.ranked, self.lexicons, ks=[10]), out)
        self.assertEqual(out.getvalue(), "10\tWHO\t0.800000\n10\tHHS\t0.900000\n10\tunion\t1.000000\n")

    def test_lexicon_file(self):
        path = self.write_file("cdc.txt", "# comment\nN95 respirators\n\nface-shields\n")
        lexicon = ResourceLexicon.load(path)
        self.assertEqual(lexicon.name, "CDC")
        self.assertEqual(lexicon.terms, {"n95 respirators", "face shields"})
        with self.assertRaises(DataError):
            ResourceLexicon.load(self.write_file("empty.txt", "# nothing\n"))


class TestPrf1(NeedstackTestCase):
    def test_counts_oracle(self):
        predicted = {"s%d" % i: i < 10 for i in range(100)}
        gold = GoldLabels({"s%d" % i: (i < 7 or 10 <= i < 13) for i in range(100)})
        report = prf1(predicted, gold)
        self.assertEqual(report.counts, {"tp": 7, "fp": 3, "fn": 3, "tn": 87})
        self.assertAlmostEqualSeq([report[name] for name in ("precision", "recall", "f1")], [0.7] * 3, places=9)
        self.assertEqual(report.flags, [])

    def test_identity(self):
        gold = GoldLabels({"a": True, "b": False, "c": True})
        report = prf1(dict(gold.labels), gold)
        self.assertEqual((report["precision"], report["recall"], report["f1"]), (1.0, 1.0, 1.0))

    def test_no_predicted_positives(self):
        report = prf1({"a": False, "b": False}, GoldLabels({"a": True, "b": False}))
        self.assertEqual((report["precision"], report["recall"], report["f1"]), (0.0, 0.0, 0.0))
        self.assertEqual(len(report.flags), 1)

    def test_accepts_label_pairs(self):
        report = prf1([("a", True), ("b", False)], GoldLabels({"a": True, "b": True}))
        self.assertEqual(report["precision"], 1.0)
        self.assertEqual(report["recall"], 0.5)

    def test_id_mismatch(self):
        with self.assertRaises(DataError) as ctx:
            prf1({"a": True}, GoldLabels({"a": True, "b": False}))
        self.assertIn("b", str(ctx.exception))

    def test_f1_bounds_on_random_labels(self):
        rng = np.random.default_rng(4)
        for _trial in range(50):
            n = int(rng.integers(1, 60))
            predicted = {str(i): bool(rng.random() < 0.5) for i in range(n)}
            gold = GoldLabels({str(i): bool(rng.random() < 0.5) for i in range(n)})
            report = prf1(predicted, gold)
            p, r, f1 = report["precision"], report["recall"], report["f1"]
            self.assertLessEqual(f1, min(1.0, 2 * min(p, r)) + 1e-12)
            if p and r:
                self.assertAlmostEqual(f1, 2 * p * r / (p + r), delta=1e-12)

    def test_report_output(self):
        report = EvalReport({"precision": 0.5}, {"tp": 1})
        out = io.StringIO()
        report.write(out)
        self.assertEqual(out.getvalue(), "precision\t0.500000\ntp\t1\n")
        self.assertIn("precision", report.summary())
        with self.assertRaises(DataError):
            EvalReport({"precision": float("nan")})


class TestCohensKappa(NeedstackTestCase):
    def test_hand_computed_table(self):
        a, b = labels_from_counts(80, 20, 10, 90)
        self.assertAlmostEqual(cohens_kappa(a, b), 0.7, delta=1e-9)
        self.assertAlmostEqual(cohens_kappa(b, a), 0.7, delta=1e-9)

    def test_perfect_agreement(self):
        a, _b = labels_from_counts(30, 0, 0, 20)
        self.assertAlmostEqual(cohens_kappa(a, a), 1.0, delta=1e-12)

    def test_chance_agreement(self):
        # p_o = p_e = 0.5
        a, b = labels_from_counts(25, 25, 25, 25)
        self.assertAlmostEqual(cohens_kappa(a, b), 0.0, delta=1e-12)

    def test_single_class_convention(self):
        a, b = labels_from_counts(10, 0, 0, 0)
        self.assertEqual(cohens_kappa(a, b), 1.0)

    def test_id_mismatch(self):
        with self.assertRaises(DataError):
            cohens_kappa(GoldLabels({"a": True}), GoldLabels({"b": True}))


class TestGoldLabels(NeedstackTestCase):
    def test_load(self):
        gold = load_gold(self.write_file("gold.tsv", "s1\t1\ns2\t0\n\n"))
        self.assertEqual(gold.labels, {"s1": True, "s2": False})

    def test_rejects_bad_rows(self):
        for name, content in (("value", "s1\tyes\n"), ("duplicate", "s1\t1\ns1\t0\n")):
            with self.subTest(name=name), self.assertRaises(TsvParseError) as ctx:
                load_gold(self.write_file(name + ".tsv", content))
            self.assertIsNotNone(ctx.exception.line_no)


class TestBaseline(NeedstackTestCase):
    def test_preprocess(self):
        self.assertEqual(baseline_preprocess("We REQUIRED masks @cdc http://t.co/x #PPE!!"), ["requir", "mask", "ppe"])
        self.assertEqual(baseline_preprocess("Hospitals need supplies &amp; gowns"),
                         ["hospit", "need", "suppli", "gown"])
        self.assertEqual(baseline_preprocess("it is what it is"), [])

    def test_contractions_do_not_hide_words(self):
        self.assertEqual(baseline_preprocess("patients are ill"), ["patient", "ill"])
        self.assertEqual(baseline_preprocess("we'll need well water"), ["need", "well", "water"])
        self.assertEqual(baseline_preprocess("I’ll need water"), ["need", "water"])
        self.assertNotIn("ill", stopwords())
        self.assertIn("i'll", stopwords())

    def setUp(self):
        super().setUp()
        vectors = {"need": [1.0, 0.0, 0.0], "requir": [0.0, 1.0, 0.0]}
        for token in baseline_preprocess("hospitals masks"):
            vectors[token] = [0.0, 0.0, 1.0]
        for token in baseline_preprocess("weather sunshine"):
            vectors[token] = [0.0, 0.2, 1.0]
        self.model = baseline_model(vectors)
        self.tweets = [
            tweet("1", "Lovely weather and sunshine"),
            tweet("2", "Hospitals need masks"),
            tweet("3", "zzz qqq"),
        ]

    def test_need_tweet_ranked_first(self):
        scores = baseline_scores(self.tweets, self.model)
        self.assertEqual(list(scores), ["1", "2", "3"])
        self.assertEqual(scores["3"], -1.0)
        self.assertGreater(scores["2"], scores["1"])
        self.assertAlmostEqual(scores["2"], 1 / np.sqrt(5), delta=1e-6)
        self.assertEqual(baseline_rank(self.tweets, self.model, cutoff=1), {"1": False, "2": True, "3": False})

    def test_cutoff_saturation(self):
        self.assertTrue(all(baseline_rank(self.tweets, self.model, cutoff=3).values()))
        self.assertTrue(all(baseline_rank(self.tweets, self.model, cutoff=250).values()))

    def test_shifting_scores_keeps_positive_set(self):
        rng = np.random.default_rng(8)
        scores = {str(i): float(x) for i, x in enumerate(rng.normal(size=40))}
        shifted = {key: value + 3.5 for key, value in scores.items()}
        self.assertEqual(label_top(scores, 12), label_top(shifted, 12))

    def test_sum_aggregate_and_mean_merge(self):
        scores = baseline_scores(self.tweets, self.model, aggregate="sum", merge="mean")
        self.assertGreater(scores["2"], scores["1"])
        with self.assertRaises(ValidationError):
            baseline_scores(self.tweets, self.model, aggregate="median")

    def test_missing_seed(self):
        model = baseline_model({"need": [1.0, 0.0]})
        with self.assertRaises(MissingSeedError):
            baseline_rank(self.tweets, model)
