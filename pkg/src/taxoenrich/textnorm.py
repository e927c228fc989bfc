"""Text normalization shared by taxonomy lemmas, embedding tokens and Wiktionary keys.

A lemma is normalized by Unicode NFC, case folding, and collapsing internal
whitespace to a single underscore, which matches the token convention of the
usual text-format embedding files.
"""

import re
import unicodedata

_WHITESPACE = re.compile(r"\s+")
_SUBTOKEN_SPLIT = re.compile(r"[_\-]+")
_WORD_TOKEN = re.compile(r"\w+", re.UNICODE)


def normalize(text: str) -> str:
    """Normalize a lemma or token: NFC, casefold, whitespace -> underscore."""
    return _WHITESPACE.sub("_", unicodedata.normalize("NFC", text).casefold().strip())


def subtokens(token: str) -> list[str]:
    """Split a (normalized) token on underscores and hyphens."""
    return [t for t in _SUBTOKEN_SPLIT.split(token) if t]


def text_tokens(text: str) -> list[str]:
    """Word tokens of free text (e.g. a definition), normalized for matching."""
    return _WORD_TOKEN.findall(unicodedata.normalize("NFC", text).casefold())


def surface_tokens(word: str) -> list[str]:
    """Tokens of an original surface form, case preserved."""
    return [t for t in re.split(r"[\s_\-]+", word) if t]
