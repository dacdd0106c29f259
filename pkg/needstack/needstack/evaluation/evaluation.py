# Copyright (c) 2025, Ahmad Hussnain and contributors
# For license information, please see license.txt

import math
import os
from dataclasses import dataclass, field

import numpy as np
from sklearn.metrics import cohen_kappa_score, confusion_matrix, precision_recall_fscore_support

import needstack
from needstack import _
from needstack.exceptions import DataError, InputFileError, MissingSeedError, TsvParseError, ValidationError
from needstack.needstack.embeddings.embeddings import cosine
from needstack.needstack.evaluation.evaluation_helpers import (
    FIXTURE_DIR,
    baseline_preprocess,
    normalize_term,
    read_word_list,
)
from needstack.needstack.topneeds.topneeds import RankedResourceList

logger = needstack.logger(__name__)

DEFAULT_KS = tuple(range(10, 101, 10))
UNION = "union"
BASELINE_SEEDS = ("need", "requir")
AGGREGATES = ("mean", "sum")
MERGES = ("max", "mean")


@dataclass
class ResourceLexicon:
    name: str
    terms: frozenset

    def __post_init__(self):
        self.terms = frozenset(normalize_term(t) for t in self.terms if normalize_term(t))
        if not self.terms:
            needstack.throw(_("Resource lexicon {0!r} is empty").format(self.name), DataError)

    def __contains__(self, term):
        return normalize_term(term) in self.terms

    def __len__(self):
        return len(self.terms)

    @classmethod
    def load(cls, path, name=None):
        """One term per line, `#` comments. The name defaults to the upper-cased file stem."""
        try:
            terms = read_word_list(path)
        except OSError as e:
            needstack.throw(_("Cannot read lexicon: {0}").format(e.strerror), InputFileError, path=path)
        name = name or os.path.splitext(os.path.basename(path))[0].upper()
        return cls(name, frozenset(terms))


def bundled_lexicons():
    """The WHO and HHS resource lexicons shipped with the package."""
    return [ResourceLexicon.load(os.path.join(FIXTURE_DIR, name)) for name in ("who.txt", "hhs.txt")]


def published_ranking():
    return RankedResourceList.load(os.path.join(FIXTURE_DIR, "top100.tsv"))


@dataclass
class GoldLabels:
    labels: dict

    def __len__(self):
        return len(self.labels)

    @classmethod
    def from_pairs(cls, pairs):
        labels = {}
        for sent_id, positive in pairs:
            if sent_id in labels:
                needstack.throw(_("Duplicate sent_id {0!r}").format(sent_id), DataError)
            labels[sent_id] = bool(positive)
        return cls(labels)


def load_gold(path):
    """Read `sent_id<TAB>0|1` rows."""
    labels = {}
    try:
        f = open(path, encoding="utf-8")
    except OSError as e:
        needstack.throw(_("Cannot read labels: {0}").format(e.strerror), InputFileError, path=path)
    with f:
        for line_no, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            cols = line.split("\t")
            if len(cols) != 2 or cols[1].strip() not in ("0", "1"):
                needstack.throw(_("Expected sent_id<TAB>0|1"), TsvParseError, path=path, line_no=line_no)
            if cols[0] in labels:
                needstack.throw(_("Duplicate sent_id {0!r}").format(cols[0]), TsvParseError, path=path,
                                line_no=line_no)
            labels[cols[0]] = cols[1].strip() == "1"
    return GoldLabels(labels)


@dataclass
class EvalReport:
    metrics: dict
    counts: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)

    def __post_init__(self):
        for name, value in self.metrics.items():
            if not math.isfinite(value):
                needstack.throw(_("Metric {0} is not finite").format(name), DataError)

    def __getitem__(self, name):
        return self.metrics[name]

    def write(self, out=None):
        """TSV `name<TAB>value` rows, metrics then counts."""
        with needstack.open_output(out) as f:
            for name, value in self.metrics.items():
                f.write("{0}\t{1:.6f}\n".format(name, value))
            for name, value in self.counts.items():
                f.write("{0}\t{1}\n".format(name, value))

    def summary(self):
        lines = ["{0:<24} {1:.4f}".format(name, value) for name, value in self.metrics.items()]
        lines += ["{0:<24} {1}".format(name, value) for name, value in self.counts.items()]
        lines += ["note: {0}".format(flag) for flag in self.flags]
        return "\n".join(lines)


def _ranked_terms(ranked):
    if isinstance(ranked, RankedResourceList):
        return ranked.terms()
    return [item[0] if isinstance(item, tuple) else item for item in ranked]


def _with_union(lexicons):
    lexicons = list(lexicons)
    if not lexicons:
        needstack.throw(_("At least one resource lexicon is required"))
    union = ResourceLexicon(UNION, frozenset().union(*(lex.terms for lex in lexicons)))
    return lexicons + [union]


def precision_curve(ranked, lexicons, ks=DEFAULT_KS):
    """
        Precision at each cutoff against each lexicon and their union.
        Args:
            ranked (RankedResourceList | list): Ranked terms.
            lexicons (list): ResourceLexicons.
            ks (iterable): Cutoffs, each at most the list length.
        Returns:
            list: (k, lexicon name, precision, matches) rows.
    """
    terms = _ranked_terms(ranked)
    rows = []
    for k in ks:
        if k < 1:
            needstack.throw(_("k must be >= 1, got {0}").format(k))
        if k > len(terms):
            needstack.throw(_("rank list shorter than k: {0} < {1}").format(len(terms), k), DataError)
        for lexicon in _with_union(lexicons):
            matches = sum(1 for term in terms[:k] if term in lexicon)
            rows.append((k, lexicon.name, matches / k, matches))
    return rows


def precision_at_k(ranked, lexicons, ks=DEFAULT_KS):
    report = EvalReport({})
    for k, name, value, matches in precision_curve(ranked, lexicons, ks):
        report.metrics["precision@{0}[{1}]".format(k, name)] = value
        report.counts["matches@{0}[{1}]".format(k, name)] = matches
    return report


def write_curve(rows, out=None):
    with needstack.open_output(out) as f:
        for k, name, value, _matches in rows:
            f.write("{0}\t{1}\t{2:.6f}\n".format(k, name, value))


def coverage_prefix(ranked, lexicons):
    """Length of the longest rank prefix whose every term is in at least one lexicon."""
    union = _with_union(lexicons)[-1]
    covered = 0
    for term in _ranked_terms(ranked):
        if term not in union:
            break
        covered += 1
    return covered


def _aligned(a, b, what):
    a_ids, b_ids = set(a), set(b)
    if a_ids != b_ids:
        missing = sorted(b_ids - a_ids)[:10]
        extra = sorted(a_ids - b_ids)[:10]
        needstack.throw(_("{0}: sent_id sets differ; missing {1}, unexpected {2}").format(
            what, ", ".join(missing) or "-", ", ".join(extra) or "-"), DataError)
    if not a_ids:
        needstack.throw(_("{0}: no labelled sentences").format(what), DataError)
    ids = sorted(a_ids)
    return np.array([bool(a[i]) for i in ids]), np.array([bool(b[i]) for i in ids])


def prf1(predicted, gold):
    """
        Precision, recall and F1 of sentence labels against gold labels.
        A zero denominator gives 0.0 and a note in the report's flags.
        Args:
            predicted (dict | list): sent_id -> bool, or (sent_id, bool) pairs.
            gold (GoldLabels): Reference labels over the same sent_ids.
        Returns:
            EvalReport
    """
    if not isinstance(predicted, dict):
        predicted = GoldLabels.from_pairs(predicted).labels
    y_pred, y_true = _aligned(predicted, gold.labels, "prf1")
    tn, fp, fn, tp = (int(x) for x in confusion_matrix(y_true, y_pred, labels=[False, True]).ravel())
    precision, recall, f1, _support = precision_recall_fscore_support(
        y_true, y_pred, average="binary", pos_label=True, zero_division=0
    )
    flags = []
    if tp + fp == 0:
        flags.append("precision undefined (no predicted positives), reported as 0")
    if tp + fn == 0:
        flags.append("recall undefined (no gold positives), reported as 0")
    for flag in flags:
        logger.warning(flag)
    return EvalReport(
        {"precision": float(precision), "recall": float(recall), "f1": float(f1)},
        {"tp": tp, "fp": fp, "fn": fn, "tn": tn},
        flags,
    )


def cohens_kappa(a, b):
    """
        Cohen's kappa between two annotators over the same sentences.
        When chance agreement is 1 (both annotators used one and the same class) kappa is
        undefined; 1.0 is returned and a warning logged.
    """
    y_a, y_b = _aligned(a.labels, b.labels, "kappa")
    if len(set(y_a.tolist()) | set(y_b.tolist())) == 1:
        logger.warning("kappa undefined: chance agreement is 1; reporting 1.0")
        return 1.0
    return float(cohen_kappa_score(y_a, y_b, labels=[False, True]))


def baseline_scores(tweets, model, seeds=BASELINE_SEEDS, aggregate="mean", merge="max"):
    """
        Score tweets by cosine between their embedding and the stemmed seed terms.
        A tweet's embedding aggregates its in-vocabulary token vectors; tweets without any score -1.
        Args:
            tweets (list): TweetRecords.
            model (EmbeddingModel): Trained on the baseline-preprocessed corpus.
            seeds (tuple): Stemmed seed terms.
            aggregate (str): "mean" or "sum" of token vectors.
            merge (str): "max" or "mean" over the seeds.
        Returns:
            dict: tweet id -> score, in input order.
    """
    if aggregate not in AGGREGATES:
        needstack.throw(_("aggregate must be one of {0}").format(", ".join(AGGREGATES)), ValidationError)
    if merge not in MERGES:
        needstack.throw(_("merge must be one of {0}").format(", ".join(MERGES)), ValidationError)
    missing = [seed for seed in seeds if seed not in model]
    if missing:
        needstack.throw(_("seed term not in vocabulary: {0}").format(", ".join(missing)), MissingSeedError)
    seed_vectors = [model.vector(seed) for seed in seeds]
    index = model.vocab.index
    scores = {}
    for tweet in tweets:
        rows = [index[t] for t in baseline_preprocess(tweet.text) if t in index]
        if not rows:
            scores[tweet.id] = -1.0
            continue
        vectors = model.input_vectors[rows].astype(np.float64)
        vector = vectors.mean(axis=0) if aggregate == "mean" else vectors.sum(axis=0)
        sims = [cosine(vector, seed) for seed in seed_vectors]
        scores[tweet.id] = max(sims) if merge == "max" else float(np.mean(sims))
    return scores


def label_top(scores, cutoff):
    """Mark the `cutoff` highest scores positive; ties keep input order."""
    if cutoff < 0:
        needstack.throw(_("cutoff must be >= 0, got {0}").format(cutoff))
    ids = list(scores)
    order = sorted(range(len(ids)), key=lambda i: (-scores[ids[i]], i))
    positive = {ids[i] for i in order[:cutoff]}
    return {tweet_id: tweet_id in positive for tweet_id in ids}


def baseline_rank(tweets, model, cutoff=250, aggregate="mean", merge="max", seeds=BASELINE_SEEDS):
    labels = label_top(baseline_scores(tweets, model, seeds, aggregate, merge), cutoff)
    logger.info("baseline: %s of %s tweets labelled positive", sum(labels.values()), len(labels))
    return labels
