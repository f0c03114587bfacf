"""Part-of-speech tagging behind a small pluggable interface.

The shipped tagger is a closed lexicon plus suffix and numeral rules,
emitting Penn Treebank tags.  It is deliberately context-free: a token
always gets the same tag, which keeps mutant filtering deterministic.
An adapter is provided for driving an external tagger process over a
line-based protocol (space-joined tokens in, space-joined tags out).
"""

from __future__ import annotations

import re
import subprocess
from collections.abc import Sequence
from typing import Protocol

NUMBER_RE = re.compile(r"^\d+(?:[.,]\d+)*$")

NUMBER_WORDS = {
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine",
    "ten", "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen",
    "seventeen", "eighteen", "nineteen", "twenty", "thirty", "forty", "fifty",
    "sixty", "seventy", "eighty", "ninety", "hundred", "thousand", "million",
    "billion",
}

PUNCT_TAGS = {
    ".": ".", "!": ".", "?": ".",
    ",": ",",
    ":": ":", ";": ":",
    "(": "(", ")": ")",
    '"': "''", "'": "''", "`": "``",
    "#": "#", "$": "$",
}

# Closed-class and frequent open-class words.  Plural nouns and inflected
# verbs are mostly derived by the -s/-ed/-ing rules from these stems.
BASE_LEXICON = {
    # pronouns
    "i": "PRP", "you": "PRP", "he": "PRP", "she": "PRP", "it": "PRP",
    "we": "PRP", "they": "PRP", "me": "PRP", "him": "PRP", "her": "PRP",
    "us": "PRP", "them": "PRP",
    "my": "PRP$", "your": "PRP$", "his": "PRP$", "its": "PRP$",
    "our": "PRP$", "their": "PRP$",
    # determiners
    "the": "DT", "a": "DT", "an": "DT", "this": "DT", "that": "DT",
    "these": "DT", "those": "DT", "another": "DT", "each": "DT",
    "every": "DT", "some": "DT", "any": "DT", "no": "DT", "all": "DT",
    # conjunctions, prepositions, particles
    "and": "CC", "or": "CC", "but": "CC", "nor": "CC",
    "in": "IN", "on": "IN", "at": "IN", "by": "IN", "for": "IN",
    "with": "IN", "from": "IN", "of": "IN", "about": "IN", "near": "IN",
    "over": "IN", "under": "IN", "after": "IN", "before": "IN",
    "between": "IN", "during": "IN", "against": "IN", "if": "IN",
    "to": "TO",
    # modals and auxiliaries
    "can": "MD", "could": "MD", "will": "MD", "would": "MD",
    "shall": "MD", "should": "MD", "may": "MD", "might": "MD", "must": "MD",
    "be": "VB", "am": "VBP", "is": "VBZ", "are": "VBP", "was": "VBD",
    "were": "VBD", "been": "VBN", "being": "VBG",
    "do": "VBP", "does": "VBZ", "did": "VBD", "done": "VBN",
    "have": "VBP", "has": "VBZ", "had": "VBD",
    # frequent verbs (base form; inflections via suffix rules)
    "like": "VB", "make": "VB", "made": "VBD", "go": "VB", "went": "VBD",
    "play": "VBP", "see": "VB", "saw": "VBD", "produce": "VB", "write": "VB",
    "wrote": "VBD", "need": "VB", "press": "VB", "enjoy": "VB", "kill": "VB",
    "get": "VB", "give": "VB", "take": "VB", "find": "VB", "know": "VB",
    "think": "VB", "say": "VB", "said": "VBD", "use": "VB", "want": "VB",
    "run": "VB", "ban": "VB", "handle": "VB", "share": "VB", "teach": "VB",
    # frequent nouns (singular; plurals via the -s rule)
    "cat": "NN", "dog": "NN", "boy": "NN", "girl": "NN", "man": "NN",
    "woman": "NN", "men": "NNS", "women": "NNS", "people": "NNS",
    "person": "NN", "child": "NN", "children": "NNS", "kid": "NN",
    "student": "NN", "teacher": "NN", "doctor": "NN", "worker": "NN",
    "adult": "NN", "parent": "NN", "nurse": "NN", "author": "NN",
    "research": "NN", "work": "NN", "art": "NN", "paper": "NN",
    "science": "NN", "computer": "NN", "heart": "NN", "spirit": "NN",
    "earthquake": "NN", "magnitude": "NN", "station": "NN", "button": "NN",
    "vote": "NN", "envelope": "NN", "title": "NN", "police": "NNS",
    "supporter": "NN", "bomb": "NN", "attack": "NN", "end": "NN",
    "service": "NN", "help": "NN", "shame": "NN", "school": "NN",
    "result": "NN", "report": "NN", "idea": "NN", "song": "NN",
    "story": "NN", "house": "NN", "city": "NN", "team": "NN",
    # frequent adjectives and adverbs
    "good": "JJ", "great": "JJ", "fine": "JJ", "nice": "JJ", "kind": "JJ",
    "big": "JJ", "small": "JJ", "new": "JJ", "old": "JJ", "timely": "JJ",
    "political": "JJ", "postal": "JJ", "nearby": "JJ", "homemade": "JJ",
    "female": "JJ", "male": "JJ", "best": "JJS", "better": "JJR",
    "complete": "JJ", "solid": "JJ", "strong": "JJ", "bright": "JJ",
    "very": "RB", "not": "RB", "also": "RB", "respectively": "RB",
    "there": "EX",
}

NOUN_SUFFIXES = ("tion", "sion", "ment", "ness", "ity", "ism", "ship", "ance", "ence", "ture")
ADJ_SUFFIXES = ("ous", "ful", "ive", "able", "ible", "ish", "less", "ic", "al")


class PosTagger(Protocol):
    """Anything that maps a token sequence to one tag per token."""

    def tag(self, tokens: Sequence[str]) -> list[str]:
        ...


class LexiconTagger:
    """Lexicon lookup with numeral, suffix and capitalisation fallbacks."""

    def __init__(self, extra: dict[str, str] | None = None):
        self.lexicon = dict(BASE_LEXICON)
        if extra:
            self.lexicon.update({w: t for w, t in extra.items()})

    @classmethod
    def from_file(cls, path) -> "LexiconTagger":
        """Extend the baseline with `word<TAB>tag` lines."""
        extra: dict[str, str] = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                word, tag = line.split("\t")
                extra[word] = tag
        return cls(extra)

    def tag(self, tokens: Sequence[str]) -> list[str]:
        return [self.tag_word(tok) for tok in tokens]

    def tag_word(self, token: str) -> str:
        if token in self.lexicon:
            return self.lexicon[token]
        lowered = token.lower()
        if lowered in self.lexicon:
            return self.lexicon[lowered]
        if token in PUNCT_TAGS:
            return PUNCT_TAGS[token]
        if NUMBER_RE.match(token) or lowered in NUMBER_WORDS:
            return "CD"
        if not token[:1].isalpha():
            return "SYM"
        if token[:1].isupper():
            return "NNP"
        return self._suffix_tag(lowered)

    def _suffix_tag(self, word: str) -> str:
        if word.endswith("ly"):
            return "RB"
        if word.endswith("ing") and len(word) > 4:
            return "VBG"
        if word.endswith("ed") and len(word) > 3:
            return "VBD"
        for suffix in NOUN_SUFFIXES:
            if word.endswith(suffix):
                return "NN"
        for suffix in ADJ_SUFFIXES:
            if word.endswith(suffix):
                return "JJ"
        if word.endswith("s") and not word.endswith("ss") and len(word) > 2:
            stem = word[:-1]
            stem_tag = self.lexicon.get(stem)
            if stem_tag is None and stem.endswith("e"):
                stem_tag = self.lexicon.get(stem[:-1])
            if stem_tag and stem_tag.startswith("VB"):
                return "VBZ"
            return "NNS"
        return "NN"


class ExternalProcessTagger:
    """Adapter for a long-running tagger subprocess.

    Protocol: one request line of space-joined tokens, one response line of
    space-joined tags.  The subprocess must flush after each line.
    """

    def __init__(self, command: Sequence[str]):
        self.command = list(command)
        self._proc: subprocess.Popen | None = None

    def _ensure(self) -> subprocess.Popen:
        if self._proc is None or self._proc.poll() is not None:
            self._proc = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        return self._proc

    def tag(self, tokens: Sequence[str]) -> list[str]:
        proc = self._ensure()
        assert proc.stdin is not None and proc.stdout is not None
        proc.stdin.write(" ".join(tokens) + "\n")
        proc.stdin.flush()
        line = proc.stdout.readline()
        if not line:
            raise RuntimeError(f"tagger process produced no output: {self.command}")
        tags = line.split()
        if len(tags) != len(tokens):
            raise RuntimeError(
                f"tagger returned {len(tags)} tags for {len(tokens)} tokens"
            )
        return tags

    def close(self) -> None:
        if self._proc is not None and self._proc.poll() is None:
            self._proc.stdin.close()  # type: ignore[union-attr]
            self._proc.wait(timeout=5)
        self._proc = None


def is_replaceable_tag(tag: str) -> bool:
    """Nouns, adjectives and numbers are the only mutation targets."""
    return tag.startswith("NN") or tag.startswith("JJ") or tag == "CD"
