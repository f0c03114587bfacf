"""Tokenizers shared by mutation, metrics and the mock translator.

Word tokenization splits on whitespace and keeps punctuation as standalone
tokens; decimal numbers ("4.4", "1,000") and apostrophe words ("don't")
stay in one piece.  Character tokenization serves scripts written without
spaces, where metric tokens are single characters.
"""

from __future__ import annotations

import re

from .errors import InvalidSentenceError

_TOKEN_RE = re.compile(
    r"\d+(?:[.,]\d+)*"          # numbers, incl. decimal/thousands separators
    r"|[^\W\d_]+(?:'[^\W\d_]+)*"  # words, incl. internal apostrophes
    r"|\S"                        # any other visible character on its own
)


def word_tokenize(text: str) -> list[str]:
    """Split text into word, number and punctuation tokens."""
    return _TOKEN_RE.findall(text)


def char_tokenize(text: str) -> list[str]:
    """One token per non-space character."""
    return [ch for ch in text if not ch.isspace()]


def tokenize_sentence(text: str) -> list[str]:
    """Word-tokenize, raising if nothing tokenizable remains."""
    tokens = word_tokenize(text)
    if not tokens:
        raise InvalidSentenceError(f"no tokens in input: {text!r}")
    return tokens


def tokenizer_for(profile: str):
    """Return the tokenizer named by a language profile ('word' or 'char')."""
    if profile == "word":
        return lambda text: text.split()
    if profile == "char":
        return char_tokenize
    raise ValueError(f"unknown tokenization profile: {profile!r}")


def detokenize(tokens) -> str:
    """Inverse of the pipeline's token storage format (space joined)."""
    return " ".join(tokens)
