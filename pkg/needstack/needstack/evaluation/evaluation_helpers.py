import html
import os
import re
from functools import lru_cache

from nltk.stem.porter import PorterStemmer

from needstack.needstack.corpus.corpus import tokenize
from needstack.needstack.corpus.corpus_helpers import URL_TOKEN

FIXTURE_DIR = os.path.dirname(os.path.abspath(__file__))
STOPWORDS_PATH = os.path.join(FIXTURE_DIR, "stopwords.txt")

_NON_ALNUM = re.compile(r"[\W_]+", re.UNICODE)
_SPACES = re.compile(r"\s+")


def normalize_term(term):
    """Lowercase, drop a leading hashtag mark, treat hyphens as spaces and collapse whitespace."""
    term = term.strip().lower().lstrip("#")
    return _SPACES.sub(" ", term.replace("-", " ")).strip()


def strip_punctuation(token):
    return _NON_ALNUM.sub("", token)


def read_word_list(path):
    """Non-empty lines that are not `#` comments."""
    with open(path, encoding="utf-8") as f:
        return [line.strip() for line in f if line.strip() and not line.lstrip().startswith("#")]


@lru_cache(maxsize=None)
def stopwords(path=STOPWORDS_PATH):
    """Lowercased stopwords with apostrophes kept, so "i'll" never collides with "ill"."""
    return frozenset(normalize_apostrophes(word.lower()) for word in read_word_list(path))


def normalize_apostrophes(token):
    return token.replace("’", "'")


@lru_cache(maxsize=1)
def stemmer():
    return PorterStemmer(mode=PorterStemmer.ORIGINAL_ALGORITHM)


def baseline_preprocess(text):
    """
        Text pipeline of the cosine-ranking baseline: lowercase, drop URLs and @mentions,
        remove stopwords, strip punctuation, Porter-stem.
        Stopwords are matched before punctuation is stripped.
        Args:
            text (str): Raw tweet text.
        Returns:
            list: Stemmed tokens.
    """
    stop = stopwords()
    stem = stemmer().stem
    out = []
    for token in tokenize(html.unescape(text)):
        if token == URL_TOKEN or token.startswith("@"):
            continue
        token = normalize_apostrophes(token)
        if token in stop:
            continue
        token = strip_punctuation(token)
        if not token or token in stop:
            continue
        out.append(stem(token))
    return out
