"""Word-level diff slices and the four translation similarity metrics.

All metrics operate on token sequences, are symmetric in their two
arguments, return values in [0, 1], and score identical inputs as 1.0.
The diff is LCS-based with leftmost-match tie-breaking so that slices are
deterministic.
"""

from __future__ import annotations

import math
import warnings
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from .errors import DegenerateVectorWarning, InvalidInputError

Tokens = Sequence[str]


# ---------------------------------------------------------------------------
# LCS / edit distance
# ---------------------------------------------------------------------------

def lcs_length(a: Tokens, b: Tokens) -> int:
    """Length of a longest common subsequence, iterative DP."""
    m, n = len(a), len(b)
    if m == 0 or n == 0:
        return 0
    prev = [0] * (n + 1)
    for i in range(1, m + 1):
        cur = [0] * (n + 1)
        ai = a[i - 1]
        for j in range(1, n + 1):
            if ai == b[j - 1]:
                cur[j] = prev[j - 1] + 1
            else:
                cur[j] = prev[j] if prev[j] >= cur[j - 1] else cur[j - 1]
        prev = cur
    return prev[n]


def edit_distance(a: Tokens, b: Tokens) -> int:
    """Levenshtein distance over tokens, unit-cost insert/delete/substitute."""
    m, n = len(a), len(b)
    if m == 0:
        return n
    if n == 0:
        return m
    prev = list(range(n + 1))
    for i in range(1, m + 1):
        cur = [i] + [0] * n
        ai = a[i - 1]
        for j in range(1, n + 1):
            cost = 0 if ai == b[j - 1] else 1
            cur[j] = min(prev[j - 1] + cost, prev[j] + 1, cur[j - 1] + 1)
        prev = cur
    return prev[n]


def lcs_metric(t1: Tokens, t2: Tokens) -> float:
    """Normalised LCS length: len(LCS) / max(len(t1), len(t2))."""
    longest = max(len(t1), len(t2))
    if longest == 0:
        return 1.0  # two empty texts are identical
    return lcs_length(t1, t2) / longest


def ed_metric(t1: Tokens, t2: Tokens) -> float:
    """Normalised edit similarity: 1 - ED / max(len(t1), len(t2))."""
    longest = max(len(t1), len(t2))
    if longest == 0:
        return 1.0
    return 1.0 - edit_distance(t1, t2) / longest


# ---------------------------------------------------------------------------
# Word-level diff slices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Slice:
    """A maximal run of tokens unique to one side of a diff."""

    start: int
    tokens: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class DiffSlices:
    """Per-side difference slices of two token sequences."""

    slices_a: tuple[Slice, ...]
    slices_b: tuple[Slice, ...]

    def texts_a(self) -> list[list[str]]:
        return [list(s.tokens) for s in self.slices_a]

    def texts_b(self) -> list[list[str]]:
        return [list(s.tokens) for s in self.slices_b]

    def to_json(self) -> dict:
        return {
            "a": [{"start": s.start, "tokens": list(s.tokens)} for s in self.slices_a],
            "b": [{"start": s.start, "tokens": list(s.tokens)} for s in self.slices_b],
        }


def _lcs_match_pairs(a: Tokens, b: Tokens) -> list[tuple[int, int]]:
    """Index pairs of one LCS alignment, matching as early as possible.

    Ties between skipping either side are broken by comparing the two
    tokens, so swapping the arguments yields the mirrored alignment and
    downstream consistency scores stay symmetric.
    """
    m, n = len(a), len(b)
    # suffix[i][j] = LCS length of a[i:], b[j:]
    suffix = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(m - 1, -1, -1):
        row, below = suffix[i], suffix[i + 1]
        ai = a[i]
        for j in range(n - 1, -1, -1):
            if ai == b[j]:
                row[j] = below[j + 1] + 1
            else:
                row[j] = below[j] if below[j] >= row[j + 1] else row[j + 1]
    pairs: list[tuple[int, int]] = []
    i = j = 0
    while i < m and j < n:
        if a[i] == b[j] and suffix[i][j] == suffix[i + 1][j + 1] + 1:
            pairs.append((i, j))
            i += 1
            j += 1
        elif suffix[i + 1][j] > suffix[i][j + 1]:
            i += 1
        elif suffix[i + 1][j] < suffix[i][j + 1]:
            j += 1
        elif a[i] <= b[j]:
            i += 1
        else:
            j += 1
    return pairs


def _runs(length: int, common: set[int], tokens: Tokens) -> tuple[Slice, ...]:
    slices = []
    run_start = None
    for idx in range(length + 1):
        if idx < length and idx not in common:
            if run_start is None:
                run_start = idx
        elif run_start is not None:
            slices.append(Slice(run_start, tuple(tokens[run_start:idx])))
            run_start = None
    return tuple(slices)


def word_diff(a: Tokens, b: Tokens) -> DiffSlices:
    """Difference slices of two token sequences around an LCS alignment."""
    pairs = _lcs_match_pairs(a, b)
    common_a = {i for i, _ in pairs}
    common_b = {j for _, j in pairs}
    return DiffSlices(_runs(len(a), common_a, a), _runs(len(b), common_b, b))


def delete_slice(tokens: Tokens, piece: Slice) -> tuple[str, ...]:
    """Token sequence with one diff slice removed."""
    return tuple(tokens[: piece.start]) + tuple(tokens[piece.start + len(piece):])


def splice_back(common: Tokens, slices: Iterable[Slice]) -> tuple[str, ...]:
    """Reinsert slices at their recorded positions (inverse of removal)."""
    out = list(common)
    for piece in sorted(slices, key=lambda s: s.start):
        out[piece.start:piece.start] = list(piece.tokens)
    return tuple(out)


def remove_all_slices(tokens: Tokens, slices: Iterable[Slice]) -> tuple[str, ...]:
    """Drop every slice, leaving the common subsequence of the diff."""
    drop = set()
    for piece in slices:
        drop.update(range(piece.start, piece.start + len(piece)))
    return tuple(tok for idx, tok in enumerate(tokens) if idx not in drop)


# ---------------------------------------------------------------------------
# tf-idf bag-of-words cosine
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IdfTable:
    """Inverse document frequencies over a sentence corpus.

    weight(w) = log((|C| + 1) / (f_w + 1)) where f_w counts the sentences
    containing w; an unseen token gets log(|C| + 1).
    """

    doc_freq: dict[str, int]
    corpus_size: int

    def weight(self, token: str) -> float:
        return math.log((self.corpus_size + 1) / (self.doc_freq.get(token, 0) + 1))

    @property
    def weights(self) -> dict[str, float]:
        return {tok: self.weight(tok) for tok in self.doc_freq}

    @property
    def degenerate(self) -> bool:
        return self.corpus_size == 0

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"#corpus_size\t{self.corpus_size}\n")
            for token in sorted(self.doc_freq):
                fh.write(f"{token}\t{self.doc_freq[token]}\n")

    @classmethod
    def load(cls, path) -> "IdfTable":
        doc_freq: dict[str, int] = {}
        corpus_size = 0
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line:
                    continue
                key, value = line.split("\t")
                if key == "#corpus_size":
                    corpus_size = int(value)
                else:
                    doc_freq[key] = int(value)
        return cls(doc_freq, corpus_size)


def build_idf(corpus: Iterable[Tokens]) -> IdfTable:
    """Document frequencies from a stream of tokenized sentences."""
    doc_freq: Counter[str] = Counter()
    size = 0
    for sentence in corpus:
        size += 1
        doc_freq.update(set(sentence))
    return IdfTable(dict(doc_freq), size)


def bag_of_words(tokens: Tokens) -> Counter[str]:
    """Multiset of tokens; order is discarded, multiplicity kept."""
    return Counter(tokens)


def tfidf_metric(t1: Tokens, t2: Tokens, idf: IdfTable) -> float:
    """Cosine similarity of idf-weighted bag-of-words vectors, in [0, 1].

    A zero-norm weighted vector cannot define a direction; the score is
    forced to 0 and a DegenerateVectorWarning is emitted.
    """
    if tuple(t1) == tuple(t2):
        return 1.0
    bag1, bag2 = bag_of_words(t1), bag_of_words(t2)
    vocab = set(bag1) | set(bag2)
    dot = norm1 = norm2 = 0.0
    for token in vocab:
        w = idf.weight(token)
        x = bag1.get(token, 0) * w
        y = bag2.get(token, 0) * w
        dot += x * y
        norm1 += x * x
        norm2 += y * y
    if norm1 == 0.0 or norm2 == 0.0:
        warnings.warn(
            "zero-norm weighted vector in tfidf_metric; scoring 0",
            DegenerateVectorWarning,
            stacklevel=2,
        )
        return 0.0
    return min(1.0, max(0.0, dot / math.sqrt(norm1 * norm2)))


# ---------------------------------------------------------------------------
# BLEU
# ---------------------------------------------------------------------------

BLEU_ORDER = 4


def ngram_counts(tokens: Tokens, n: int) -> Counter[tuple[str, ...]]:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def modified_ngram_precision(reference: Tokens, candidate: Tokens, n: int) -> tuple[int, int]:
    """Clipped n-gram matches of the candidate against the reference.

    Returns (matched, total) so callers can keep the ratio exact.
    """
    cand = ngram_counts(candidate, n)
    total = sum(cand.values())
    if total == 0:
        return 0, 0
    ref = ngram_counts(reference, n)
    matched = sum(min(count, ref.get(gram, 0)) for gram, count in cand.items())
    return matched, total


def brevity_penalty(reference_len: int, candidate_len: int) -> float:
    """exp(1 - r/c) when the candidate is not longer than the reference."""
    if candidate_len > reference_len:
        return 1.0
    return math.exp(1.0 - reference_len / candidate_len)


def bleu_directional(reference: Tokens, candidate: Tokens) -> float:
    """BLEU of one candidate against one reference, orders 1..4.

    Any order with zero (or undefined) precision collapses the score to 0;
    no smoothing is applied.
    """
    log_sum = 0.0
    for n in range(1, BLEU_ORDER + 1):
        matched, total = modified_ngram_precision(reference, candidate, n)
        if matched == 0 or total == 0:
            return 0.0
        log_sum += math.log(matched / total) / BLEU_ORDER
    return brevity_penalty(len(reference), len(candidate)) * math.exp(log_sum)


def bleu_metric(t1: Tokens, t2: Tokens) -> float:
    """Symmetric BLEU: the higher of the two directional scores.

    Identical sequences score 1.0 even when they are too short to hold a
    4-gram; that keeps the metric's identity-of-indiscernibles property.
    """
    if len(t1) == 0 or len(t2) == 0:
        raise InvalidInputError("bleu_metric requires two non-empty sequences")
    if tuple(t1) == tuple(t2):
        return 1.0
    return max(bleu_directional(t1, t2), bleu_directional(t2, t1))
