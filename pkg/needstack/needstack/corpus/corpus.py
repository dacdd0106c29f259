# Copyright (c) 2025, Ahmad Hussnain and contributors
# For license information, please see license.txt

import html
import json
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone

import needstack
from needstack import _
from needstack.exceptions import InputFileError, TsvParseError, TweetParseError, ValidationError
from needstack.needstack.corpus.corpus_helpers import (
    BOUNDARY_RE,
    TOKEN_RE,
    is_abbreviation,
    normalize_token,
)

logger = needstack.logger(__name__)

ON_ERROR_POLICIES = ("skip", "fail")


@dataclass(frozen=True)
class TweetRecord:
    id: str
    text: str
    timestamp: datetime | None = None
    lang: str | None = None


@dataclass
class TokenSentence:
    tweet_id: str
    tokens: list = field(default_factory=list)
    index_in_tweet: int = 0


class TweetStream:
    """
        Iterable over the TweetRecords of a JSON-lines file.
        The `read` and `skipped` counters are final once iteration is exhausted.
    """

    def __init__(self, path, on_error="skip"):
        if on_error not in ON_ERROR_POLICIES:
            needstack.throw(_("on_error must be one of {0}, got {1!r}").format(", ".join(ON_ERROR_POLICIES), on_error))
        if not os.path.isfile(path) or not os.access(path, os.R_OK):
            needstack.throw(_("Cannot read tweet file"), InputFileError, path=path)
        self.path = path
        self.on_error = on_error
        self.read = 0
        self.skipped = 0

    def __iter__(self):
        self.read = 0
        self.skipped = 0
        seen = set()
        try:
            f = open(self.path, "rb")
        except OSError as e:
            needstack.throw(_("Cannot read tweet file: {0}").format(e.strerror), InputFileError, path=self.path)
        with f:
            for line_no, raw in enumerate(f, start=1):
                if not raw.strip():
                    continue
                try:
                    record = parse_tweet_line(raw)
                    if record.id in seen:
                        raise ValueError(_("duplicate id {0!r}").format(record.id))
                except ValueError as e:
                    if self.on_error == "fail":
                        needstack.throw(_("Malformed tweet line: {0}").format(e), TweetParseError,
                                        path=self.path, line_no=line_no)
                    self.skipped += 1
                    logger.debug("%s:%s skipped: %s", self.path, line_no, e)
                    continue
                seen.add(record.id)
                self.read += 1
                yield record

        if self.skipped:
            logger.warning("%s: skipped %s malformed line(s), read %s tweet(s)", self.path, self.skipped, self.read)
        else:
            logger.info("%s: read %s tweet(s)", self.path, self.read)


def load_tweets(path, on_error="skip"):
    """
        Stream the tweets of a JSON-lines file in file order.
        Args:
            path (str): The JSON-lines file, one object with "id" and "text" per line.
            on_error (str): "skip" counts malformed lines and carries on, "fail" raises on the first one.
        Returns:
            TweetStream: iterable of TweetRecord; `skipped` holds the malformed line count afterwards.
    """
    return TweetStream(path, on_error=on_error)


def parse_tweet_line(raw):
    """Parse one JSON-lines row. Raises ValueError describing what is wrong."""
    try:
        line = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    except UnicodeDecodeError:
        raise ValueError(_("not valid UTF-8"))
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as e:
        raise ValueError(_("not JSON ({0})").format(e.msg))
    if not isinstance(obj, dict):
        raise ValueError(_("not a JSON object"))

    tweet_id = obj.get("id")
    if isinstance(tweet_id, bool) or not isinstance(tweet_id, (str, int)):
        raise ValueError(_("missing or invalid \"id\""))
    tweet_id = str(tweet_id)
    if not tweet_id or any(c in tweet_id for c in "\t\r\n"):
        raise ValueError(_("\"id\" is empty or contains tab/newline"))

    text = obj.get("text")
    if not isinstance(text, str) or not text.strip():
        raise ValueError(_("missing or empty \"text\""))

    return TweetRecord(
        id=tweet_id,
        text=text,
        timestamp=_parse_timestamp(obj.get("timestamp")),
        lang=_parse_lang(obj.get("lang")),
    )


def _parse_timestamp(value):
    if value is None:
        return None
    if not isinstance(value, str):
        raise ValueError(_("\"timestamp\" is not a string"))
    text = value.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    try:
        ts = datetime.fromisoformat(text)
    except ValueError:
        raise ValueError(_("\"timestamp\" is not ISO-8601: {0!r}").format(value))
    if ts.tzinfo is None:
        return ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def _parse_lang(value):
    if value is None:
        return None
    if not isinstance(value, str) or len(value) != 2:
        raise ValueError(_("\"lang\" is not a 2-letter code"))
    return value.lower()


def split_sentences(text):
    """
        Split text into sentences at newlines and after terminal punctuation (. ! ?)
        that does not close a known abbreviation.
        Args:
            text (str): Raw tweet text.
        Returns:
            list: Sentence strings, whitespace-trimmed, never empty.
    """
    sentences = []
    for line in text.splitlines():
        start = 0
        for m in BOUNDARY_RE.finditer(line):
            piece = line[start:m.end()]
            chunk = piece.rsplit(None, 1)[-1] if piece.strip() else ""
            if m.group().startswith(".") and is_abbreviation(chunk):
                continue
            if piece.strip():
                sentences.append(piece.strip())
            start = m.end()
        rest = line[start:].strip()
        if rest:
            sentences.append(rest)
    return sentences


def tokenize(sentence):
    """
        Tokenize one sentence: URLs become the token "URL", hashtags and mentions stay whole,
        internal hyphens and apostrophes are kept, other punctuation becomes separate tokens,
        everything else is lowercased.
        Args:
            sentence (str): One sentence.
        Returns:
            list: Token strings.
    """
    return [normalize_token(m.lastgroup, m.group()) for m in TOKEN_RE.finditer(sentence)]


def tokenize_tweet(record):
    """Split and tokenize a TweetRecord. Sentences without tokens are dropped."""
    text = html.unescape(record.text)
    out = []
    for sentence in split_sentences(text):
        tokens = tokenize(sentence)
        if tokens:
            out.append(TokenSentence(tweet_id=record.id, tokens=tokens, index_in_tweet=len(out)))
    return out


def write_corpus(sentences, path):
    """
        Write TokenSentences as `tweet_id<TAB>sentence_index<TAB>tok tok ...` lines.
        Returns:
            int: Number of sentences written.
    """
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for sent in sentences:
            if not sent.tokens:
                needstack.throw(_("Refusing to write an empty sentence for tweet {0}").format(sent.tweet_id),
                                ValidationError)
            f.write("{0}\t{1}\t{2}\n".format(sent.tweet_id, sent.index_in_tweet, " ".join(sent.tokens)))
            count += 1
    return count


def read_corpus(path):
    """
        Stream TokenSentences from a tokenized corpus file.
        Raises:
            InputFileError: The file cannot be opened.
            TsvParseError: A line does not have three columns or has no tokens.
    """
    try:
        f = open(path, encoding="utf-8")
    except OSError as e:
        needstack.throw(_("Cannot read corpus file: {0}").format(e.strerror), InputFileError, path=path)
    with f:
        for line_no, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                needstack.throw(_("Expected 3 tab-separated columns, found {0}").format(len(parts)),
                                TsvParseError, path=path, line_no=line_no)
            tweet_id, index, text = parts
            tokens = text.split(" ")
            if not text or not all(tokens):
                needstack.throw(_("Empty token field"), TsvParseError, path=path, line_no=line_no)
            try:
                index = int(index)
            except ValueError:
                needstack.throw(_("Sentence index is not an integer: {0!r}").format(index),
                                TsvParseError, path=path, line_no=line_no)
            yield TokenSentence(tweet_id=tweet_id, tokens=tokens, index_in_tweet=index)


def ingest(path, out_path, on_error="skip", preprocess=None):
    """
        Tokenize a JSON-lines tweet file into a corpus file.
        Args:
            path (str): JSON-lines tweets.
            out_path (str): Destination corpus file.
            on_error (str): Malformed line policy, see load_tweets.
            preprocess (callable): Optional text -> tokens function used instead of split+tokenize;
                each tweet then becomes a single sentence.
        Returns:
            dict: tweets, skipped and sentences counts.
    """
    stream = load_tweets(path, on_error=on_error)

    def sentences():
        for record in stream:
            if preprocess is None:
                yield from tokenize_tweet(record)
                continue
            tokens = preprocess(record.text)
            if tokens:
                yield TokenSentence(tweet_id=record.id, tokens=tokens, index_in_tweet=0)

    written = write_corpus(sentences(), out_path)
    return {"tweets": stream.read, "skipped": stream.skipped, "sentences": written}
