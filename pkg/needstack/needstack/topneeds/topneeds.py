# Copyright (c) 2025, Ahmad Hussnain and contributors
# For license information, please see license.txt

from collections import Counter
from dataclasses import dataclass

import numpy as np

import needstack
from needstack import _
from needstack.exceptions import EmptyCorpusError, InputFileError, MissingSeedError, TsvParseError, ValidationError
from needstack.needstack.embeddings.embeddings import nearest_neighbors
from needstack.needstack.topneeds.topneeds_helpers import NOUN_TAGS, normalize_tag

logger = needstack.logger(__name__)

DEFAULT_SEEDS = ("needs", "supplies")
NEED_WORD_FORMS = frozenset(("need", "needs", "needing", "needed", "supply", "supplies"))
MERGE_MODES = ("max", "mean")


class PosLexicon:
    """Per-token tag histograms over lowercased tokens."""

    def __init__(self):
        self.entries = {}

    def add(self, token, tag, count=1):
        if count < 1:
            needstack.throw(_("Tag counts must be >= 1, got {0}").format(count))
        self.entries.setdefault(token.lower(), Counter())[normalize_tag(tag)] += count

    def __contains__(self, token):
        return token.lower() in self.entries

    def __len__(self):
        return len(self.entries)

    def histogram(self, token):
        return dict(self.entries.get(token.lower(), {}))

    def is_noun(self, term):
        return is_noun(self, term)

    def dump(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            for token in sorted(self.entries):
                for tag, count in sorted(self.entries[token].items()):
                    f.write("{0}\t{1}\t{2}\n".format(token, tag, count))
        return len(self)

    @classmethod
    def load(cls, path):
        lexicon = cls()
        try:
            f = open(path, encoding="utf-8")
        except OSError as e:
            needstack.throw(_("Cannot read POS lexicon: {0}").format(e.strerror), InputFileError, path=path)
        with f:
            for line_no, line in enumerate(f, start=1):
                line = line.rstrip("\n")
                if not line.strip():
                    continue
                cols = line.split("\t")
                try:
                    token, tag, count = cols[0], cols[1], int(cols[2])
                except (IndexError, ValueError):
                    count = 0
                if len(cols) != 3 or count < 1 or not token or not tag:
                    needstack.throw(_("Expected token<TAB>tag<TAB>count"), TsvParseError, path=path,
                                    line_no=line_no)
                lexicon.add(token, tag, count)
        if not len(lexicon):
            needstack.throw(_("POS lexicon is empty"), EmptyCorpusError, path=path)
        return lexicon


def build_pos_lexicon(tagged_input):
    """
        Count tags per lowercased token.
        Args:
            tagged_input (iterable): (token, tag) pairs; Penn Treebank tags are mapped to Universal POS.
        Returns:
            PosLexicon
    """
    lexicon = PosLexicon()
    pairs = 0
    for token, tag in tagged_input:
        lexicon.add(token, tag)
        pairs += 1
    if not pairs:
        needstack.throw(_("empty tagged input"), EmptyCorpusError)
    logger.info("POS lexicon: %s tokens from %s tagged pairs", len(lexicon), pairs)
    return lexicon


def is_noun(lexicon, term):
    """
        A token is a noun when a noun tag reaches the top count of its histogram (ties count as noun).
        Hyphen-joined phrases are decided on their final component.
    """
    head = term.rsplit("-", 1)[-1].lower()
    histogram = lexicon.entries.get(head)
    if not histogram:
        return False
    top = max(histogram.values())
    return any(histogram.get(tag, 0) == top for tag in NOUN_TAGS)


@dataclass
class RankedResourceList:
    items: list
    seeds: tuple = DEFAULT_SEEDS
    k: int = 100

    def __post_init__(self):
        if len(self.items) > self.k:
            needstack.throw(_("{0} items exceed k={1}").format(len(self.items), self.k))
        terms = [term for term, _score in self.items]
        if len(set(terms)) != len(terms):
            needstack.throw(_("Ranked list contains a term twice"))
        if any(a[1] < b[1] for a, b in zip(self.items, self.items[1:])):
            needstack.throw(_("Ranked list scores must be non-increasing"))

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def terms(self):
        return [term for term, _score in self.items]

    def write(self, out=None):
        """Write `rank<TAB>term<TAB>score` rows to a path, a file object, or stdout."""
        with needstack.open_output(out) as f:
            for rank, (term, score) in enumerate(self.items, start=1):
                f.write("{0}\t{1}\t{2:.6f}\n".format(rank, term, score))

    @classmethod
    def load(cls, path):
        """Read a `rank<TAB>term<TAB>score` list; rows without a score (bare terms, or rank and term) get 0."""
        items = []
        try:
            f = open(path, encoding="utf-8")
        except OSError as e:
            needstack.throw(_("Cannot read ranked list: {0}").format(e.strerror), InputFileError, path=path)
        with f:
            for line_no, line in enumerate(f, start=1):
                cols = line.rstrip("\n").split("\t")
                if not cols[0].strip():
                    continue
                if len(cols) == 1:
                    items.append((cols[0].strip(), 0.0))
                    continue
                try:
                    int(cols[0])
                except ValueError:
                    needstack.throw(_("Expected an integer rank, got {0!r}").format(cols[0]), TsvParseError, path=path,
                                    line_no=line_no)
                if len(cols) == 2:
                    items.append((cols[1].strip(), 0.0))
                    continue
                try:
                    items.append((cols[1], float(cols[2])))
                except (IndexError, ValueError):
                    needstack.throw(_("Expected rank<TAB>term<TAB>score"), TsvParseError, path=path, line_no=line_no)
        return cls(items, k=len(items))


def rank_top_needs(model, lexicon, seeds=DEFAULT_SEEDS, k=100, merge="max", exclude_need_forms=False):
    """
        Rank noun terms by their closeness to the seed embeddings.
        Each seed's neighbourhood is searched on its own and the per-seed cosines are merged,
        by maximum or by mean over the seeds.
        Args:
            model (EmbeddingModel): Trained embeddings.
            lexicon (PosLexicon): Decides nounhood; None disables the noun filter.
            seeds (tuple): Seed terms, all required in the vocabulary.
            k (int): Number of terms to return.
            merge (str): "max" or "mean".
            exclude_need_forms (bool): Also drop need/supply word forms from the candidates.
        Returns:
            RankedResourceList
    """
    seeds = tuple(seeds)
    if not seeds:
        needstack.throw(_("At least one seed term is required"))
    if k < 0:
        needstack.throw(_("k must be >= 0, got {0}").format(k))
    if merge not in MERGE_MODES:
        needstack.throw(_("merge must be one of {0}, got {1!r}").format(", ".join(MERGE_MODES), merge), ValidationError)
    missing = [seed for seed in seeds if seed not in model]
    if missing:
        needstack.throw(_("seed term not in vocabulary: {0}").format(", ".join(missing)), MissingSeedError)
    if k == 0:
        return RankedResourceList([], seeds, k)

    if lexicon is None:
        logger.warning("no POS lexicon given: noun filter disabled")
        noun_filter = None
    else:
        noun_filter = lexicon.is_noun
    exclude = set(seeds)
    if exclude_need_forms:
        exclude |= NEED_WORD_FORMS

    by_seed = {
        seed: dict(nearest_neighbors(model, model.vector(seed), None, filter=noun_filter, exclude=exclude))
        for seed in seeds
    }
    candidates = by_seed[seeds[0]]
    if merge == "max":
        merged = {term: max(by_seed[seed][term] for seed in seeds) for term in candidates}
    else:
        merged = {term: float(np.mean([by_seed[seed][term] for seed in seeds])) for term in candidates}

    index = model.vocab.index
    ranked = sorted(merged.items(), key=lambda item: (-item[1], index[item[0]]))[:k]
    logger.info("ranked %s of %s candidate nouns for seeds %s", len(ranked), len(merged), ", ".join(seeds))
    return RankedResourceList(ranked, seeds, k)
