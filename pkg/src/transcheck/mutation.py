"""Context-similar sentence mutation with structural filtering.

A mutant replaces exactly one noun, adjective or number token with a
context-similar partner from the similarity corpus.  Mutants whose
replacement disturbs the POS tagging are rejected: in "sentence" mode the
whole re-tagged sequence must match the original tags, in "word" mode only
the replaced position is compared.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field

from .embeddings import SimilarityCorpus
from .errors import InvalidInputError, InvalidSentenceError
from .tagging import LexiconTagger, PosTagger, is_replaceable_tag
from .tokenization import tokenize_sentence

log = logging.getLogger(__name__)

FILTER_MODES = ("sentence", "word")


@dataclass(frozen=True)
class TaggedSentence:
    tokens: tuple[str, ...]
    tags: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.tokens:
            raise InvalidSentenceError("empty sentence")
        if len(self.tokens) != len(self.tags):
            raise InvalidInputError(
                f"{len(self.tokens)} tokens but {len(self.tags)} tags"
            )

    def text(self) -> str:
        return " ".join(self.tokens)


@dataclass(frozen=True)
class MutantSentence:
    original: TaggedSentence
    mutated_index: int
    original_word: str
    replacement_word: str
    passed_filter: bool = False

    def __post_init__(self) -> None:
        if self.original_word == self.replacement_word:
            raise InvalidInputError("replacement equals the original word")
        if not 0 <= self.mutated_index < len(self.original.tokens):
            raise InvalidInputError(f"mutated index {self.mutated_index} out of range")

    @property
    def tokens(self) -> tuple[str, ...]:
        out = list(self.original.tokens)
        out[self.mutated_index] = self.replacement_word
        return tuple(out)

    def text(self) -> str:
        return " ".join(self.tokens)


def pos_tag(sentence: str, tagger: PosTagger | None = None) -> TaggedSentence:
    """Tokenize and tag raw text."""
    tagger = tagger or LexiconTagger()
    tokens = tokenize_sentence(sentence)
    tags = tagger.tag(tokens)
    return TaggedSentence(tuple(tokens), tuple(tags))


def structural_filter(
    s: TaggedSentence,
    mutant: MutantSentence,
    tagger: PosTagger | None = None,
    mode: str = "sentence",
) -> bool:
    """True when re-tagging the mutant leaves the original tags intact.

    A tagger failure counts as a filter failure so that broken mutants are
    dropped rather than propagated.
    """
    if mode not in FILTER_MODES:
        raise InvalidInputError(f"filter mode must be one of {FILTER_MODES}")
    tagger = tagger or LexiconTagger()
    try:
        new_tags = tagger.tag(list(mutant.tokens))
    except Exception:
        log.warning("tagger failed on mutant %r; rejecting", mutant.text())
        return False
    if len(new_tags) != len(s.tags):
        return False
    idx = mutant.mutated_index
    if mode == "word":
        return new_tags[idx] == s.tags[idx]
    return tuple(new_tags) == s.tags


@dataclass
class MutationStats:
    candidates: int = 0
    rejected: int = 0
    emitted: int = 0
    rejected_examples: list[str] = field(default_factory=list)


def generate_mutants(
    s: TaggedSentence,
    corpus: SimilarityCorpus,
    max_mutants: int = 5,
    tagger: PosTagger | None = None,
    filter_mode: str = "sentence",
    stats: MutationStats | None = None,
) -> list[MutantSentence]:
    """Up to max_mutants filter-passing single-word replacements.

    Tokens are scanned left to right; replaceable positions query the
    corpus in its similarity order, so the output is deterministic for a
    fixed (sentence, corpus, tagger, max_mutants) quadruple.
    """
    if max_mutants < 1:
        raise InvalidInputError("max_mutants must be at least 1")
    tagger = tagger or LexiconTagger()
    out: list[MutantSentence] = []
    for idx, (token, tag) in enumerate(zip(s.tokens, s.tags)):
        if not is_replaceable_tag(tag):
            continue
        for replacement, _floor in corpus.lookup(token):
            if replacement == token:
                continue
            if stats:
                stats.candidates += 1
            candidate = MutantSentence(s, idx, token, replacement)
            if structural_filter(s, candidate, tagger, filter_mode):
                out.append(
                    MutantSentence(s, idx, token, replacement, passed_filter=True)
                )
                if stats:
                    stats.emitted += 1
                if len(out) >= max_mutants:
                    return out
            elif stats:
                stats.rejected += 1
                if len(stats.rejected_examples) < 5:
                    stats.rejected_examples.append(candidate.text())
    return out
