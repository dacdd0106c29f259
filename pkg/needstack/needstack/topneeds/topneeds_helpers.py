import os

from nltk.tag import str2tuple

import needstack
from needstack import _
from needstack.exceptions import ConllParseError, InputFileError, TsvParseError

NOUN_TAGS = frozenset(("NOUN", "PROPN"))

# Penn Treebank (NLTK default tagger) to Universal POS
PTB_TO_UPOS = {
    "NN": "NOUN", "NNS": "NOUN", "NNP": "PROPN", "NNPS": "PROPN",
    "VB": "VERB", "VBD": "VERB", "VBG": "VERB", "VBN": "VERB", "VBP": "VERB", "VBZ": "VERB", "MD": "AUX",
    "JJ": "ADJ", "JJR": "ADJ", "JJS": "ADJ",
    "RB": "ADV", "RBR": "ADV", "RBS": "ADV", "WRB": "ADV",
    "PRP": "PRON", "PRP$": "PRON", "WP": "PRON", "WP$": "PRON", "EX": "PRON",
    "DT": "DET", "PDT": "DET", "WDT": "DET",
    "IN": "ADP", "RP": "ADP", "TO": "PART", "POS": "PART",
    "CC": "CCONJ", "CD": "NUM", "UH": "INTJ", "SYM": "SYM", "FW": "X", "LS": "X",
    ".": "PUNCT", ",": "PUNCT", ":": "PUNCT", "``": "PUNCT", "''": "PUNCT",
    "-LRB-": "PUNCT", "-RRB-": "PUNCT", "#": "SYM", "$": "SYM",
}


def normalize_tag(tag):
    """Map a Penn Treebank tag to its Universal POS tag; any other tag passes through."""
    return PTB_TO_UPOS.get(tag, tag)


def _open(path):
    try:
        return open(path, encoding="utf-8")
    except OSError as e:
        needstack.throw(_("Cannot read tagged input: {0}").format(e.strerror), InputFileError, path=path)


def read_conllu_tags(path):
    """(FORM, UPOS) pairs of a CoNLL-U file; multiword ranges and empty nodes are skipped."""
    with _open(path) as f:
        for line_no, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 10:
                needstack.throw(_("Expected 10 tab-separated columns, found {0}").format(len(cols)),
                                ConllParseError, path=path, line_no=line_no)
            if "-" in cols[0] or "." in cols[0]:
                continue
            yield cols[1], cols[3]


def read_tsv_tags(path):
    with _open(path) as f:
        for line_no, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            cols = line.split("\t")
            if len(cols) != 2 or not cols[0] or not cols[1]:
                needstack.throw(_("Expected token<TAB>tag"), TsvParseError, path=path, line_no=line_no)
            yield cols[0], cols[1]


def read_slash_tags(path):
    """Whitespace-separated `word/TAG` items, as NLTK prints tagged text."""
    with _open(path) as f:
        for line_no, line in enumerate(f, start=1):
            for item in line.split():
                word, tag = str2tuple(item)
                if not word or not tag:
                    needstack.throw(_("Expected word/TAG, got {0!r}").format(item), TsvParseError,
                                    path=path, line_no=line_no)
                yield word, tag


READERS = {
    "conllu": read_conllu_tags,
    "tsv": read_tsv_tags,
    "slash": read_slash_tags,
}


def detect_format(path):
    ext = os.path.splitext(path)[1].lower()
    if ext in (".conllu", ".conll"):
        return "conllu"
    if ext == ".tsv":
        return "tsv"
    return "slash"


def read_tagged(path, fmt=None):
    """
        Read (token, tag) pairs from a tagged file.
        Args:
            path (str): Input file.
            fmt (str): "conllu", "tsv" or "slash"; guessed from the extension when None.
        Returns:
            generator: (token, tag) tuples with tags as written in the file.
    """
    fmt = fmt or detect_format(path)
    if fmt not in READERS:
        needstack.throw(_("Unknown tagged input format {0!r}; use one of {1}").format(fmt, ", ".join(READERS)))
    return READERS[fmt](path)
