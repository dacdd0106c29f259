import re

# Abbreviations whose trailing period never ends a sentence.
ABBREVIATIONS = frozenset([
    "dr.", "mr.", "mrs.", "ms.", "st.", "vs.", "u.s.", "e.g.", "i.e.",
])

URL_TOKEN = "URL"

# A run of terminal punctuation, optionally followed by closing quotes or
# brackets, that is followed by whitespace or the end of the line.
BOUNDARY_RE = re.compile(r"""[.!?]+["'”’)\]]*(?=\s|$)""")
LEADING_OPENERS = "\"'(“‘["

# Order matters: URLs first, then hashtags/mentions, then words, and a last
# ditch single non-space character for everything else.
_URL = r"(?:https?://|www\.)\S+"
_TAG = r"[#@]\w+(?:['’\-]\w+)*"
_WORD = r"\w+(?:['’\-]\w+)*"
_OTHER = r"\S"

TOKEN_RE = re.compile(
    r"(?P<url>{0})|(?P<tag>{1})|(?P<word>{2})|(?P<other>{3})".format(_URL, _TAG, _WORD, _OTHER),
    re.UNICODE | re.IGNORECASE,
)
URL_RE = re.compile(_URL, re.UNICODE | re.IGNORECASE)


def is_abbreviation(chunk):
    """
        Check whether the whitespace-delimited chunk ending at a boundary is a known abbreviation.
        Args:
            chunk (str): The text between the previous whitespace and the boundary end.
        Returns:
            bool
    """
    word = chunk.lstrip(LEADING_OPENERS).lower()
    return word in ABBREVIATIONS


def normalize_token(kind, text):
    if kind == "url":
        return URL_TOKEN
    if text == URL_TOKEN:
        return text
    return text.lower()
