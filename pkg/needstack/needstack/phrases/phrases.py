# Copyright (c) 2025, Ahmad Hussnain and contributors
# For license information, please see license.txt

from dataclasses import dataclass

import needstack
from needstack import _
from needstack.exceptions import EmptyCorpusError, InputFileError, TsvParseError, ValidationError
from needstack.needstack.corpus.corpus import TokenSentence
from needstack.needstack.phrases.phrases_helpers import PairCounts, merge_pairs, rescaled_npmi

logger = needstack.logger(__name__)

JOINER = "-"


@dataclass
class PhraseConfig:
    threshold: float = 0.8
    min_pair_count: int = 5
    max_passes: int = 3

    def validate(self):
        if not 0.0 <= self.threshold <= 1.0:
            needstack.throw(_("threshold must be in [0, 1], got {0}").format(self.threshold), ValidationError)
        if self.min_pair_count < 1:
            needstack.throw(_("min_pair_count must be >= 1, got {0}").format(self.min_pair_count), ValidationError)
        if self.max_passes < 1:
            needstack.throw(_("max_passes must be >= 1, got {0}").format(self.max_passes), ValidationError)
        return self


class PhraseTable:
    """Salient phrases (tuples of 2+ component tokens) with a score in [0, 1]."""

    def __init__(self, entries=None):
        self.entries = {}
        self.max_len = 0
        for components, score in (entries or {}).items():
            self.add(components, score)

    def add(self, components, score):
        components = tuple(components)
        if len(components) < 2:
            needstack.throw(_("A phrase needs at least 2 components: {0!r}").format(components), ValidationError)
        if not 0.0 <= score <= 1.0:
            needstack.throw(_("Phrase score must be in [0, 1], got {0}").format(score), ValidationError)
        self.entries[components] = max(score, self.entries.get(components, 0.0))
        self.max_len = max(self.max_len, len(components))

    def __contains__(self, components):
        return tuple(components) in self.entries

    def __len__(self):
        return len(self.entries)

    def get(self, components, default=None):
        return self.entries.get(tuple(components), default)

    def sorted_items(self):
        return sorted(self.entries.items(), key=lambda item: (-item[1], " ".join(item[0])))

    def dump(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            for components, score in self.sorted_items():
                f.write("{0}\t{1:.6f}\n".format(" ".join(components), score))
        return len(self)

    @classmethod
    def load(cls, path, threshold=None):
        """
            Load a phrase list: `phrase<TAB>score`, or `score<TAB>phrase` as AutoPhrase writes it.
            Args:
                path (str): TSV file.
                threshold (float): When given, entries scoring below it are dropped.
            Returns:
                PhraseTable
        """
        table = cls()
        try:
            f = open(path, encoding="utf-8")
        except OSError as e:
            needstack.throw(_("Cannot read phrase file: {0}").format(e.strerror), InputFileError, path=path)
        with f:
            for line_no, line in enumerate(f, start=1):
                line = line.rstrip("\n")
                if not line.strip():
                    continue
                parts = line.split("\t")
                if len(parts) != 2:
                    needstack.throw(_("Expected phrase<TAB>score"), TsvParseError, path=path, line_no=line_no)
                phrase, score = _phrase_and_score(parts)
                if score is None or not 0.0 <= score <= 1.0:
                    needstack.throw(_("No score in [0, 1] on this line"), TsvParseError, path=path, line_no=line_no)
                components = phrase.lower().split()
                if len(components) == 1 and JOINER in components[0]:
                    components = components[0].split(JOINER)
                if len(components) < 2 or (threshold is not None and score < threshold):
                    continue
                table.add(components, score)
        return table


def _phrase_and_score(parts):
    for phrase, score in ((parts[0], parts[1]), (parts[1], parts[0])):
        try:
            return phrase, float(score)
        except ValueError:
            continue
    return None, None


def mine_phrases(tokenized_corpus, config=None):
    """
        Mine salient phrases by iterative NPMI pair merging.
        Each pass scores every adjacent pair of the working corpus with rescaled NPMI,
        accepts pairs at or above `threshold` that occur at least `min_pair_count` times,
        and merges them before the next pass, so later passes can grow longer phrases.
        Args:
            tokenized_corpus (iterable): TokenSentences or plain token lists.
            config (PhraseConfig): Mining parameters.
        Returns:
            PhraseTable
    """
    config = (config or PhraseConfig()).validate()
    corpus = []
    units = {}  # one shared 1-tuple per token type
    for sent in tokenized_corpus:
        tokens = sent.tokens if isinstance(sent, TokenSentence) else sent
        corpus.append([units.setdefault(t, (t,)) for t in tokens])
    if not corpus:
        needstack.throw(_("empty corpus"), EmptyCorpusError)

    table = PhraseTable()
    for pass_no in range(1, config.max_passes + 1):
        counts = PairCounts.from_sentences(corpus)
        if not counts.total:
            break
        accepted = {}
        for pair, count in counts.pairs.items():
            if count < config.min_pair_count:
                continue
            score = rescaled_npmi(count, counts.left[pair[0]], counts.right[pair[1]], counts.total)
            if score >= config.threshold:
                accepted[pair] = score
        logger.info("phrase pass %s: %s pair types, %s accepted", pass_no, len(counts.pairs), len(accepted))
        if not accepted:
            break
        for (x, y), score in accepted.items():
            table.add(x + y, score)
        corpus = [merge_pairs(tokens, accepted) for tokens in corpus]
    return table


def annotate_phrases(tokens, table):
    """
        Replace phrase occurrences with single hyphen-joined tokens, greedy longest match from the left.
        Args:
            tokens (list): Token strings.
            table (PhraseTable): Phrases to merge.
        Returns:
            list: Token strings, never longer than the input.
    """
    if not table.max_len:
        return list(tokens)
    out = []
    i = 0
    n = len(tokens)
    while i < n:
        for length in range(min(table.max_len, n - i), 1, -1):
            if tuple(tokens[i:i + length]) in table.entries:
                out.append(JOINER.join(tokens[i:i + length]))
                i += length
                break
        else:
            out.append(tokens[i])
            i += 1
    return out


def annotate_corpus(sentences, table):
    for sent in sentences:
        yield TokenSentence(sent.tweet_id, annotate_phrases(sent.tokens, table), sent.index_in_tweet)
