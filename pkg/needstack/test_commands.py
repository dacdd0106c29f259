# Copyright (c) 2025, Ahmad Hussnain and Contributors
# See license.txt

import json
import os
import time
import unittest

import numpy as np
from click.testing import CliRunner

from needstack import __version__
from needstack.commands import cli, main
from needstack.needstack.embeddings.embeddings import EmbeddingModel, TrainConfig, Vocabulary
from needstack.tests.utils import SLOW_TESTS, NeedstackTestCase

TEMPLATES = [
    "The hospital in {0} needs masks and gloves.",
    "Shelter {0} needs water, blankets and medical supplies!",
    "We are running out of supplies in {0}. Please send masks.",
    "Volunteers in {0} deliver food and water today",
    "Stay safe {0}, the storm is coming #hurricane",
]
CITIES = ["houston", "miami", "tampa", "austin"]

RUN_CONFIG = "dim = 8\nepochs = 2\nmin_count = 1\nsubsample = 0\nk = 5\nmin_pair_count = 3\nthreshold = 0.95\n"


def data_rows(output):
    return [line for line in output.splitlines() if "\t" in line]


class TestCommands(NeedstackTestCase):
    def setUp(self):
        super().setUp()
        self.runner = CliRunner()
        lines = []
        for i in range(60):
            text = TEMPLATES[i % len(TEMPLATES)].format(CITIES[i % len(CITIES)])
            lines.append(json.dumps({"id": str(i), "text": text}))
        self.tweets = self.write_file("tweets.jsonl", "\n".join(lines) + "\n")
        self.config = self.write_file("run.cfg", RUN_CONFIG)

    def invoke(self, *args):
        return self.runner.invoke(cli, ["--config", self.config] + list(args), catch_exceptions=False)

    def read(self, path):
        with open(path, "rb") as f:
            return f.read()

    def hand_model(self):
        rng = np.random.default_rng(3)
        terms = ["needs", "supplies"] + ["term{0:02d}".format(i) for i in range(18)]
        vectors = rng.normal(size=(len(terms), 6)).astype(np.float32)
        model = EmbeddingModel(Vocabulary(terms, [5] * len(terms)), vectors, np.zeros_like(vectors),
                               TrainConfig(dim=6, min_count=1))
        path = self.tmp_path("hand.bin")
        model.save(path)
        lexicon = self.write_file("pos.tsv", "".join("{0}\tNOUN\t3\n".format(t) for t in terms))
        return path, lexicon

    def test_top_needs_rows(self):
        model, lexicon = self.hand_model()
        result = self.invoke("top-needs", "--model", model, "--pos-lex", lexicon, "--k", "10")
        self.assertEqual(result.exit_code, 0, result.output)
        rows = data_rows(result.output)
        self.assertEqual(len(rows), 10)
        self.assertEqual([int(row.split("\t")[0]) for row in rows], list(range(1, 11)))
        self.assertNotIn("needs", [row.split("\t")[1] for row in rows])

    def test_missing_conllu(self):
        result = self.invoke("extract", "--conllu", self.tmp_path("missing.conllu"))
        self.assertEqual(result.exit_code, 2)
        self.assertIn("missing.conllu", result.output)

    def test_extract_fixture(self):
        conllu = os.path.join(os.path.dirname(__file__), "needstack", "wnw", "needs_ud.conllu")
        triples, labels = self.tmp_path("triples.tsv"), self.tmp_path("labels.tsv")
        result = self.invoke("extract", "--conllu", conllu, "--out", triples, "--labels-out", labels)
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertEqual(len(self.read(triples).splitlines()), 7)
        self.assertEqual(len(self.read(labels).splitlines()), 14)
        self.assertIn("extract: 14 sentences", result.output)

    def test_unknown_config_key(self):
        bad = self.write_file("bad.cfg", "dimensions = 8\n")
        result = self.runner.invoke(cli, ["--config", bad, "annotate", "--corpus", "c", "--phrases", "p",
                                          "--out", "o"])
        self.assertEqual(result.exit_code, 1)
        self.assertIn("dimensions", result.output)

    def test_pipeline_is_deterministic(self):
        first, second = self.tmp_path("first.tsv"), self.tmp_path("second.tsv")
        for out in (first, second):
            result = self.invoke("pipeline", "--in", self.tweets, "--out", out, "--seed", "42")
            self.assertEqual(result.exit_code, 0, result.output)
        self.assertEqual(self.read(first), self.read(second))
        self.assertEqual(len(self.read(first).splitlines()), 5)

    def test_stages_compose_to_pipeline(self):
        workdir = self.tmp_path("work")
        piped = self.tmp_path("piped.tsv")
        result = self.invoke("pipeline", "--in", self.tweets, "--out", piped, "--workdir", workdir)
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertTrue(os.path.exists(os.path.join(workdir, "model.bin")))

        corpus, phrases = self.tmp_path("corpus.tsv"), self.tmp_path("phrases.tsv")
        annotated, model, ranked = self.tmp_path("annotated.tsv"), self.tmp_path("model.bin"), self.tmp_path("r.tsv")
        steps = [
            ("ingest", "--in", self.tweets, "--out", corpus),
            ("mine-phrases", "--corpus", corpus, "--out", phrases),
            ("annotate", "--corpus", corpus, "--phrases", phrases, "--out", annotated),
            ("train", "--corpus", annotated, "--out", model),
            ("top-needs", "--model", model, "--out", ranked),
        ]
        for step in steps:
            result = self.invoke(*step)
            self.assertEqual(result.exit_code, 0, result.output)
        self.assertEqual(self.read(ranked), self.read(piped))
        self.assertEqual(self.read(model), self.read(os.path.join(workdir, "model.bin")))

    def test_baseline_ingest_is_stemmed(self):
        corpus = self.tmp_path("stemmed.tsv")
        result = self.invoke("ingest", "--in", self.tweets, "--out", corpus, "--baseline")
        self.assertEqual(result.exit_code, 0, result.output)
        first = self.read(corpus).decode("utf-8").splitlines()[0].split("\t")
        self.assertEqual(first[2].split(" "), ["hospit", "houston", "need", "mask", "glove"])

    def test_eval_topk_on_published_ranking(self):
        ranked = os.path.join(os.path.dirname(__file__), "needstack", "evaluation", "top100.tsv")
        curve = self.tmp_path("curve.tsv")
        result = self.invoke("eval-topk", "--ranked", ranked, "--curve-out", curve, "--ks", "10,100")
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn("precision@10[union]\t1.000000", result.output)
        self.assertIn("precision@100[HHS]\t0.570000", result.output)
        self.assertIn("covered_prefix\t13", result.output)
        self.assertEqual(len(self.read(curve).splitlines()), 6)

    def test_label_metrics(self):
        gold = self.write_file("gold.tsv", "s1\t1\ns2\t0\ns3\t1\ns4\t0\n")
        predicted = self.write_file("pred.tsv", "s1\t1\ns2\t1\ns3\t1\ns4\t0\n")
        result = self.invoke("eval-triples", "--labels", predicted, "--gold", gold)
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn("recall\t1.000000", result.output)
        self.assertIn("precision\t0.666667", result.output)
        result = self.invoke("kappa", "--a", gold, "--b", gold)
        self.assertIn("kappa\t1.000000", result.output)

    def test_main_exit_codes(self):
        with self.assertRaises(SystemExit) as ctx:
            main(["top-needs", "--k", "3"])
        self.assertEqual(ctx.exception.code, 1)
        with self.assertRaises(SystemExit) as ctx:
            main(["kappa", "--a", self.tmp_path("a.tsv"), "--b", self.tmp_path("b.tsv")])
        self.assertEqual(ctx.exception.code, 2)

    def test_version(self):
        result = self.runner.invoke(cli, ["--version"])
        self.assertEqual(result.exit_code, 0)
        self.assertIn(__version__, result.output)

    def test_unwritable_output(self):
        result = self.invoke("ingest", "--in", self.tweets, "--out", self.tmp_path(os.path.join("nope", "c.tsv")))
        self.assertEqual(result.exit_code, 2)
        self.assertIn("Error:", result.output)
        self.assertIn("c.tsv", result.output)

    @unittest.skipUnless(SLOW_TESTS, "set NEEDSTACK_SLOW_TESTS=1 to run")
    def test_pipeline_throughput(self):
        rng = np.random.default_rng(7)
        vocab = np.array(["w{0:04d}".format(i) for i in range(5000)])
        weights = 1.0 / np.arange(1, len(vocab) + 1)
        words = vocab[rng.choice(len(vocab), size=(600000, 17), p=weights / weights.sum())]
        tweets = self.tmp_path("large.jsonl")
        with open(tweets, "w", encoding="utf-8") as f:
            for i, row in enumerate(words):
                # 20 tokens per tweet
                text = "{0} needs {1} supplies and {2}".format(" ".join(row[:9]), " ".join(row[9:15]), " ".join(row[15:]))
                f.write(json.dumps({"id": str(i), "text": text}) + "\n")
        config = self.write_file("full.cfg", "dim = 100\nepochs = 5\n")
        ranked = self.tmp_path("ranked.tsv")

        started = time.perf_counter()
        result = self.runner.invoke(cli, ["--config", config, "pipeline", "--in", tweets, "--out", ranked],
                                    catch_exceptions=False)
        elapsed = time.perf_counter() - started

        self.assertEqual(result.exit_code, 0, result.output)
        self.assertEqual(len(self.read(ranked).splitlines()), 100)
        self.assertLess(elapsed, 30 * 60)
