# Copyright (c) 2025, Ahmad Hussnain and contributors
# For license information, please see license.txt

import io
from dataclasses import dataclass, field

import needstack
from needstack import _
from needstack.exceptions import ConllParseError, InputFileError
from needstack.needstack.wnw.wnw_helpers import (
    NEED_FORMS,
    WHAT_UPOS,
    WHO_UPOS,
    find_cycle,
    get_scheme,
    nearest,
)

logger = needstack.logger(__name__)

RULES = ("R1", "R2")


@dataclass(frozen=True)
class DepToken:
    index: int
    form: str
    lemma: str
    upos: str
    head: int
    deprel: str


@dataclass
class DepSentence:
    sent_id: str
    tokens: list
    text: str = None
    _children: dict = field(default=None, init=False, repr=False, compare=False)

    def __len__(self):
        return len(self.tokens)

    def token(self, index):
        return self.tokens[index - 1]

    def children(self, index, deprel=None):
        if self._children is None:
            self._children = {}
            for tok in self.tokens:
                self._children.setdefault(tok.head, []).append(tok)
        kids = self._children.get(index, [])
        if deprel is None:
            return kids
        return [tok for tok in kids if tok.deprel == deprel]


@dataclass(frozen=True)
class NeedTriple:
    sent_id: str
    rule: str
    who_head: int
    who_text: str
    need_index: int
    need_form: str
    what_head: int
    what_text: str

    @property
    def key(self):
        return self.sent_id, self.who_head, self.need_index, self.what_head


def parse_conllu(stream, path=None):
    """
        Parse CoNLL-U text into dependency sentences.
        Multiword range lines (`1-2`) and empty nodes (`1.1`) are skipped. Every block must
        form a single tree over its tokens: heads in range, no self-loops, no cycles.
        Args:
            stream (iterable): Lines of CoNLL-U text, a file object or a string.
            path (str): Name used in error messages.
        Returns:
            list: DepSentence per block.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    sentences = []
    block = _Block()
    for line_no, line in enumerate(stream, start=1):
        line = line.rstrip("\r\n")
        if not line.strip():
            if block.rows:
                sentences.append(block.close(len(sentences) + 1, path))
            block = _Block()
        elif line.startswith("#"):
            block.comment(line)
        else:
            block.add(line, line_no, path)
    if block.rows:
        sentences.append(block.close(len(sentences) + 1, path))
    return sentences


def read_conllu(path):
    try:
        f = open(path, encoding="utf-8")
    except OSError as e:
        needstack.throw(_("Cannot read CoNLL-U file: {0}").format(e.strerror), InputFileError, path=path)
    with f:
        return parse_conllu(f, path=path)


class _Block:
    def __init__(self):
        self.sent_id = None
        self.text = None
        self.rows = []

    def comment(self, line):
        key, sep, value = line[1:].partition("=")
        if not sep:
            return
        key = key.strip()
        if key == "sent_id":
            self.sent_id = value.strip()
        elif key == "text":
            self.text = value.strip()

    def add(self, line, line_no, path):
        cols = line.split("\t")
        if len(cols) != 10:
            needstack.throw(_("Expected 10 tab-separated columns, found {0}").format(len(cols)),
                            ConllParseError, path=path, line_no=line_no)
        if "-" in cols[0] or "." in cols[0]:
            return
        try:
            index = int(cols[0])
        except ValueError:
            needstack.throw(_("Non-integer token ID {0!r}").format(cols[0]), ConllParseError, path=path,
                            line_no=line_no)
        if index != len(self.rows) + 1:
            needstack.throw(_("Token ID {0} out of sequence").format(index), ConllParseError, path=path,
                            line_no=line_no)
        try:
            head = int(cols[6])
        except ValueError:
            needstack.throw(_("Non-integer HEAD {0!r}").format(cols[6]), ConllParseError, path=path,
                            line_no=line_no)
        if head == index:
            needstack.throw(_("Token {0} is its own head").format(index), ConllParseError, path=path,
                            line_no=line_no)
        self.rows.append((line_no, DepToken(index, cols[1], cols[2], cols[3], head, cols[7])))

    def close(self, ordinal, path):
        size = len(self.rows)
        for line_no, tok in self.rows:
            if not 0 <= tok.head <= size:
                needstack.throw(_("HEAD {0} out of range for a {1}-token sentence").format(tok.head, size),
                                ConllParseError, path=path, line_no=line_no)
        on_cycle = find_cycle([tok.head for _line_no, tok in self.rows])
        if on_cycle is not None:
            needstack.throw(_("Dependency cycle through token {0}").format(on_cycle), ConllParseError,
                            path=path, line_no=self.rows[on_cycle - 1][0])
        sent_id = self.sent_id if self.sent_id is not None else str(ordinal)
        return DepSentence(sent_id, [tok for _line_no, tok in self.rows], self.text)


def is_need_token(tok, upos, lemma_trigger=False):
    if tok.upos != upos:
        return False
    return tok.form.lower() in NEED_FORMS or (lemma_trigger and tok.lemma.lower() == "need")


def yield_text(sent, head, skip=()):
    """Forms of the subtree under `head`, in sentence order; subtrees rooted in `skip` are left out."""
    stack = [head]
    members = []
    while stack:
        index = stack.pop()
        members.append(index)
        stack.extend(tok.index for tok in sent.children(index) if tok.index not in skip)
    return " ".join(sent.token(i).form for i in sorted(members))


def _triple(sent, rule, who, need, what, what_skip=()):
    return NeedTriple(
        sent.sent_id, rule,
        who.index, yield_text(sent, who.index),
        need.index, need.form,
        what.index, yield_text(sent, what.index, what_skip),
    )


def match_rule1(sent, scheme="ud", strict_pos=False, lemma_trigger=False):
    """
        Rule 1: a need verb with a subject child on its left and a direct object child on its right.
        When several qualify, the child nearest to the verb is taken on each side.
    """
    scheme = get_scheme(scheme)
    triples = []
    for need in sent.tokens:
        if not is_need_token(need, "VERB", lemma_trigger):
            continue
        subjects = [tok for tok in sent.children(need.index, scheme.subject) if tok.index < need.index]
        objects = [tok for tok in sent.children(need.index, scheme.direct_object) if tok.index > need.index]
        if strict_pos:
            subjects = [tok for tok in subjects if tok.upos in WHO_UPOS]
            objects = [tok for tok in objects if tok.upos in WHAT_UPOS]
        who, what = nearest(subjects, need.index), nearest(objects, need.index)
        if who and what:
            triples.append(_triple(sent, "R1", who, need, what))
    return triples


def match_rule2(sent, scheme="ud", lemma_trigger=False):
    """
        Rule 2: "X is in need of Y".
        clear: need is the prepositional object of a preposition attached to the copular verb; who is
        the verb's subject and what the object of a preposition attached to need.
        ud: need heads the clause; it carries the copula, the subject, and an nmod with a case marker.
    """
    scheme = get_scheme(scheme)
    triples = []
    for need in sent.tokens:
        if not is_need_token(need, "NOUN", lemma_trigger):
            continue
        if scheme.name == "ud":
            found = _rule2_ud(sent, scheme, need)
        else:
            found = _rule2_clear(sent, scheme, need)
        if found:
            triples.append(found)
    return triples


def _rule2_clear(sent, scheme, need):
    if need.deprel != scheme.prep_object or need.head == 0:
        return None
    prep = sent.token(need.head)
    if prep.deprel != scheme.preposition or prep.head == 0:
        return None
    who = nearest(sent.children(prep.head, scheme.subject), prep.head)
    objects = [obj for p in sent.children(need.index, scheme.preposition)
               for obj in sent.children(p.index, scheme.prep_object)]
    what = nearest(objects, need.index)
    if who and what:
        return _triple(sent, "R2", who, need, what)
    return None


def _rule2_ud(sent, scheme, need):
    if not sent.children(need.index, scheme.copula):
        return None
    who = nearest(sent.children(need.index, scheme.subject), need.index)
    objects = [tok for tok in sent.children(need.index, scheme.nmod) if sent.children(tok.index, scheme.case)]
    what = nearest(objects, need.index)
    if who and what:
        markers = {tok.index for tok in sent.children(what.index, scheme.case)}
        return _triple(sent, "R2", who, need, what, markers)
    return None


def extract_triples(sentences, scheme="ud", strict_pos=False, lemma_trigger=False, rules=RULES):
    """
        Run the rules over parsed sentences.
        Args:
            sentences (list): DepSentences.
            scheme (str | LabelScheme): "ud" or "clear".
            strict_pos (bool): Require noun/pronoun who and noun what in rule 1.
            lemma_trigger (bool): Also trigger on tokens whose lemma is "need".
            rules (tuple): Rules to apply, ("R1", "R2") by default.
        Returns:
            tuple: (triples, labels); labels is a list of (sent_id, bool), one per sentence.
    """
    scheme = get_scheme(scheme)
    unknown = set(rules) - set(RULES)
    if unknown:
        needstack.throw(_("Unknown rules: {0}").format(", ".join(sorted(unknown))))
    triples, labels = [], []
    seen = set()
    for sent in sentences:
        found = []
        if "R1" in rules:
            found += match_rule1(sent, scheme, strict_pos, lemma_trigger)
        if "R2" in rules:
            found += match_rule2(sent, scheme, lemma_trigger)
        for triple in found:
            if triple.key not in seen:
                seen.add(triple.key)
                triples.append(triple)
        labels.append((sent.sent_id, bool(found)))
    logger.info("extracted %s triples from %s sentences (%s positive)", len(triples), len(labels),
                sum(1 for _sent_id, positive in labels if positive))
    return triples, labels


def write_triples(triples, out=None):
    """TSV rows: sent_id, rule, who_text, need_form, what_text, who_head, need_index, what_head."""
    with needstack.open_output(out) as f:
        for t in triples:
            f.write("\t".join((t.sent_id, t.rule, t.who_text, t.need_form, t.what_text,
                               str(t.who_head), str(t.need_index), str(t.what_head))) + "\n")


def write_labels(labels, out=None):
    with needstack.open_output(out) as f:
        for sent_id, positive in labels:
            f.write("{0}\t{1}\n".format(sent_id, int(bool(positive))))
