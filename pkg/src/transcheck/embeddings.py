"""Word embeddings, cosine similarity and the context-similarity corpus.

Two independently trained embedding files are intersected: a word pair
enters the corpus only when its cosine similarity meets the threshold
under both models.  The corpus then answers replacement lookups during
mutation.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateVectorError, EmbeddingParseError, InvalidInputError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class WordVector:
    word: str
    vector: np.ndarray

    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))


def cosine_similarity(a: WordVector, b: WordVector) -> float:
    """Cosine of the angle between two word vectors, in [-1, 1]."""
    va, vb = np.asarray(a.vector, dtype=float), np.asarray(b.vector, dtype=float)
    if va.shape != vb.shape:
        raise InvalidInputError(
            f"dimension mismatch: {a.word!r} has {va.shape[0]}, {b.word!r} has {vb.shape[0]}"
        )
    norm_a = float(np.linalg.norm(va))
    norm_b = float(np.linalg.norm(vb))
    if norm_a == 0.0 or norm_b == 0.0:
        raise DegenerateVectorError(f"zero-norm vector for {a.word!r} or {b.word!r}")
    return float(np.dot(va, vb)) / (norm_a * norm_b)


class EmbeddingModel:
    """Vocabulary plus a dense matrix of word vectors."""

    def __init__(self, words: list[str], matrix: np.ndarray):
        self.words = words
        self.matrix = matrix
        self.index = {w: i for i, w in enumerate(words)}

    @property
    def dimension(self) -> int:
        return self.matrix.shape[1]

    def __contains__(self, word: str) -> bool:
        return word in self.index

    def __len__(self) -> int:
        return len(self.words)

    def vector(self, word: str) -> WordVector:
        return WordVector(word, self.matrix[self.index[word]])


def load_embeddings(path, lowercase: bool = False) -> EmbeddingModel:
    """Parse a text embedding file: token then whitespace-separated floats.

    A first line holding exactly two integers is read as a count/dimension
    header.  The dimension is otherwise inferred from the first data line;
    later lines must match it.  Duplicate tokens keep the last occurrence.
    """
    words: list[str] = []
    rows: list[np.ndarray] = []
    seen: dict[str, int] = {}
    dimension: int | None = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.rstrip("\n").split()
            if not parts:
                continue
            if lineno == 1 and len(parts) == 2 and all(p.isdigit() for p in parts):
                dimension = int(parts[1])
                continue
            if len(parts) < 2:
                raise EmbeddingParseError(f"{path}:{lineno}: no vector components")
            word, components = parts[0], parts[1:]
            if lowercase:
                word = word.lower()
            try:
                vec = np.array([float(c) for c in components], dtype=float)
            except ValueError as exc:
                raise EmbeddingParseError(f"{path}:{lineno}: {exc}") from exc
            if dimension is None:
                dimension = len(vec)
            elif len(vec) != dimension:
                raise EmbeddingParseError(
                    f"{path}:{lineno}: expected {dimension} components, found {len(vec)}"
                )
            if word in seen:
                rows[seen[word]] = vec
            else:
                seen[word] = len(words)
                words.append(word)
                rows.append(vec)
    matrix = np.vstack(rows) if rows else np.zeros((0, dimension or 0))
    return EmbeddingModel(words, matrix)


@dataclass
class SimilarityCorpus:
    """Unordered context-similar word pairs with both models' similarities."""

    pairs: dict[tuple[str, str], tuple[float, float]]
    threshold: float
    _index: dict[str, list[tuple[str, float]]] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        index: dict[str, list[tuple[str, float]]] = {}
        for (a, b), (s1, s2) in self.pairs.items():
            floor = min(s1, s2)
            index.setdefault(a, []).append((b, floor))
            index.setdefault(b, []).append((a, floor))
        for partners in index.values():
            partners.sort(key=lambda item: (-item[1], item[0]))
        self._index = index

    def __len__(self) -> int:
        return len(self.pairs)

    def __contains__(self, pair: tuple[str, str]) -> bool:
        return _canonical(*pair) in self.pairs

    def lookup(self, word: str) -> list[tuple[str, float]]:
        """Partners of a word, best minimum similarity first, ties lexicographic."""
        return list(self._index.get(word, []))

    def words(self) -> set[str]:
        return set(self._index)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"#threshold\t{self.threshold!r}\n")
            for a, b in sorted(self.pairs):
                s1, s2 = self.pairs[(a, b)]
                fh.write(f"{a}\t{b}\t{s1!r}\t{s2!r}\n")

    @classmethod
    def load(cls, path) -> "SimilarityCorpus":
        pairs: dict[tuple[str, str], tuple[float, float]] = {}
        threshold = 0.9
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line:
                    continue
                parts = line.split("\t")
                if parts[0] == "#threshold":
                    threshold = float(parts[1])
                    continue
                a, b, s1, s2 = parts
                pairs[_canonical(a, b)] = (float(s1), float(s2))
        return cls(pairs, threshold)


def _canonical(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


def _normalized_rows(model: EmbeddingModel, vocab: list[str]) -> tuple[np.ndarray, np.ndarray]:
    rows = model.matrix[[model.index[w] for w in vocab]]
    norms = np.linalg.norm(rows, axis=1)
    safe = np.where(norms > 0.0, norms, 1.0)
    return rows / safe[:, None], norms


def build_corpus(
    model1: EmbeddingModel,
    model2: EmbeddingModel,
    threshold: float = 0.9,
    workers: int = 1,
    block: int = 512,
) -> SimilarityCorpus:
    """Context-similar pairs over the vocabulary intersection of two models.

    A pair qualifies when cosine similarity is at or above the threshold
    under both models.  Zero-norm words are skipped (they have no
    direction to compare).  The result is immutable and safe to share.
    """
    if not 0.0 < threshold <= 1.0:
        raise InvalidInputError(f"threshold must be in (0, 1], got {threshold}")
    vocab = sorted(set(model1.words) & set(model2.words))
    unit1, norms1 = _normalized_rows(model1, vocab)
    unit2, norms2 = _normalized_rows(model2, vocab)
    usable = (norms1 > 0.0) & (norms2 > 0.0)
    dropped = [w for w, ok in zip(vocab, usable) if not ok]
    if dropped:
        log.warning("skipping %d zero-norm words (e.g. %r)", len(dropped), dropped[0])

    n = len(vocab)
    pairs: dict[tuple[str, str], tuple[float, float]] = {}

    def scan(start: int) -> list[tuple[int, int, float, float]]:
        stop = min(start + block, n)
        sims1 = unit1[start:stop] @ unit1.T
        sims2 = unit2[start:stop] @ unit2.T
        found = []
        for local in range(stop - start):
            i = start + local
            if not usable[i]:
                continue
            row_ok = (sims1[local] >= threshold) & (sims2[local] >= threshold) & usable
            for j in np.nonzero(row_ok)[0]:
                if j > i:
                    found.append((i, int(j), float(sims1[local, j]), float(sims2[local, j])))
        return found

    starts = range(0, n, block)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(scan, starts))
    else:
        chunks = [scan(s) for s in starts]
    for chunk in chunks:
        for i, j, s1, s2 in chunk:
            pairs[_canonical(vocab[i], vocab[j])] = (s1, s2)
    return SimilarityCorpus(pairs, threshold)


def brute_force_pairs(
    model1: EmbeddingModel, model2: EmbeddingModel, threshold: float
) -> set[tuple[str, str]]:
    """Reference corpus construction by direct pairwise evaluation."""
    shared = sorted(set(model1.words) & set(model2.words))
    out: set[tuple[str, str]] = set()
    for i, a in enumerate(shared):
        for b in shared[i + 1:]:
            va, vb = model1.vector(a), model1.vector(b)
            wa, wb = model2.vector(a), model2.vector(b)
            if va.norm() == 0 or vb.norm() == 0 or wa.norm() == 0 or wb.norm() == 0:
                continue
            if cosine_similarity(va, vb) >= threshold and cosine_similarity(wa, wb) >= threshold:
                out.add(_canonical(a, b))
    return out


def corpus_from_iterable(
    entries: Iterable[tuple[str, str, float, float]], threshold: float
) -> SimilarityCorpus:
    """Assemble a corpus from precomputed (word_a, word_b, sim1, sim2) rows."""
    pairs = {}
    for a, b, s1, s2 in entries:
        if a == b:
            raise InvalidInputError(f"identical-word pair not allowed: {a!r}")
        pairs[_canonical(a, b)] = (s1, s2)
    return SimilarityCorpus(pairs, threshold)
