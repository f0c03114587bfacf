"""Source-to-target word alignment for repair map-back.

The shipped aligner is a lexical translation model estimated by
expectation maximisation over sentence pairs: each EM round distributes
every target token's mass over the source tokens of its sentence, then
renormalises per source word.  Given the model, each source token links to
its most probable target token, with a diagonal preference on ties.
Externally produced alignments in the usual `i-j` interchange format can
be plugged in instead.
"""

from __future__ import annotations

from collections import defaultdict
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Protocol

from .errors import InvalidInputError, TrainingError

Tokens = Sequence[str]

ALIGNMENT_FLOOR = 0.1


@dataclass(frozen=True)
class Link:
    source: int
    target: int
    confidence: float


@dataclass(frozen=True)
class AlignmentTable:
    links: tuple[Link, ...]

    def targets_of(self, source_index: int) -> list[Link]:
        return [ln for ln in self.links if ln.source == source_index]

    def to_pharaoh(self) -> str:
        return " ".join(f"{ln.source}-{ln.target}" for ln in self.links)


@dataclass(frozen=True)
class TokenSpan:
    """Contiguous target token range [start, stop) covered by one source word."""

    start: int
    stop: int
    tokens: tuple[str, ...]
    contiguous: bool = True


@dataclass
class LexiconModel:
    """p(target | source) estimates plus training metadata."""

    probs: dict[str, dict[str, float]]
    iterations: int = 0
    corpus_size: int = 0
    drift_per_iteration: list[float] = field(default_factory=list)

    def prob(self, target: str, source: str) -> float:
        return self.probs.get(source, {}).get(target, 0.0)

    def max_normalization_drift(self) -> float:
        worst = 0.0
        for row in self.probs.values():
            worst = max(worst, abs(sum(row.values()) - 1.0))
        return worst

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"#iterations\t{self.iterations}\n")
            fh.write(f"#corpus_size\t{self.corpus_size}\n")
            for source in sorted(self.probs):
                for target in sorted(self.probs[source]):
                    fh.write(f"{source}\t{target}\t{self.probs[source][target]!r}\n")

    @classmethod
    def load(cls, path) -> "LexiconModel":
        probs: dict[str, dict[str, float]] = {}
        iterations = corpus_size = 0
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line:
                    continue
                parts = line.split("\t")
                if parts[0] == "#iterations":
                    iterations = int(parts[1])
                elif parts[0] == "#corpus_size":
                    corpus_size = int(parts[1])
                else:
                    source, target, p = parts
                    probs.setdefault(source, {})[target] = float(p)
        return cls(probs, iterations, corpus_size)


def train_lexicon(
    corpus: Sequence[tuple[Tokens, Tokens]], iterations: int = 10
) -> LexiconModel:
    """EM-estimate lexical translation probabilities from sentence pairs.

    Initialisation is uniform over co-occurring targets, so the result is
    deterministic for a fixed corpus order and iteration count.
    """
    if not corpus:
        raise TrainingError("parallel corpus is empty")
    if iterations < 1:
        raise TrainingError("iterations must be at least 1")

    cooc: dict[str, dict[str, float]] = {}
    for source_toks, target_toks in corpus:
        if not source_toks or not target_toks:
            raise TrainingError("sentence pairs must be non-empty on both sides")
        for s in source_toks:
            row = cooc.setdefault(s, {})
            for t in target_toks:
                row.setdefault(t, 0.0)

    probs = {
        s: {t: 1.0 / len(row) for t in row}
        for s, row in cooc.items()
    }

    drift_log: list[float] = []
    for _ in range(iterations):
        counts: dict[str, dict[str, float]] = {s: defaultdict(float) for s in probs}
        totals: dict[str, float] = defaultdict(float)
        for source_toks, target_toks in corpus:
            for t in target_toks:
                denom = sum(probs[s][t] for s in source_toks)
                if denom == 0.0:
                    continue
                for s in source_toks:
                    share = probs[s][t] / denom
                    counts[s][t] += share
                    totals[s] += share
        drift = 0.0
        for s, row in probs.items():
            total = totals[s]
            if total == 0.0:
                continue
            for t in row:
                row[t] = counts[s][t] / total
            drift = max(drift, abs(sum(row.values()) - 1.0))
        drift_log.append(drift)

    return LexiconModel(probs, iterations, len(corpus), drift_log)


def align(
    source: Tokens,
    target: Tokens,
    model: LexiconModel,
    floor: float = ALIGNMENT_FLOOR,
) -> AlignmentTable:
    """Best-target link per source token, subject to a probability floor.

    Ties in probability prefer the target position closest to the source
    token's relative position, then the smaller index.
    """
    if not source or not target:
        raise InvalidInputError("alignment needs non-empty token sequences")
    links: list[Link] = []
    len_s, len_t = len(source), len(target)
    for i, s_tok in enumerate(source):
        best_j = -1
        best_p = 0.0
        best_dist = float("inf")
        for j, t_tok in enumerate(target):
            p = model.prob(t_tok, s_tok)
            if p < floor:
                continue
            dist = abs(i / len_s - j / len_t)
            if p > best_p or (p == best_p and dist < best_dist):
                best_j, best_p, best_dist = j, p, dist
        if best_j >= 0:
            links.append(Link(i, best_j, best_p))
    return AlignmentTable(tuple(links))


def get_translated_word(
    index: int, table: AlignmentTable, target: Tokens
) -> TokenSpan | None:
    """Target span covered by one source token's links, None when unlinked.

    Non-contiguous links still yield the min..max span but are marked
    non-contiguous so callers can treat them as low confidence.
    """
    if index < 0:
        raise InvalidInputError(f"source index {index} out of bounds")
    linked = sorted(ln.target for ln in table.targets_of(index))
    if not linked:
        return None
    start, stop = linked[0], linked[-1] + 1
    return TokenSpan(
        start=start,
        stop=stop,
        tokens=tuple(target[start:stop]),
        contiguous=(stop - start) == len(linked),
    )


class Aligner(Protocol):
    """Anything that aligns a (source, target) token pair."""

    def align(self, source: Tokens, target: Tokens) -> AlignmentTable:
        ...


class LexiconAligner:
    """Aligner interface over a trained lexical model."""

    def __init__(self, model: LexiconModel, floor: float = ALIGNMENT_FLOOR):
        self.model = model
        self.floor = floor

    def align(self, source: Tokens, target: Tokens) -> AlignmentTable:
        return align(source, target, self.model, self.floor)


def parse_pharaoh_line(line: str) -> AlignmentTable:
    links = []
    for part in line.split():
        i, j = part.split("-")
        links.append(Link(int(i), int(j), 1.0))
    return AlignmentTable(tuple(links))


def load_alignments(path) -> list[AlignmentTable]:
    """One `i-j i-j ...` line per sentence pair, in corpus order."""
    tables = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            tables.append(parse_pharaoh_line(line.strip()))
    return tables


class FileAligner:
    """Serve externally produced alignments keyed by exact sentence pair."""

    def __init__(
        self,
        pairs: Sequence[tuple[Tokens, Tokens]],
        tables: Sequence[AlignmentTable],
    ):
        if len(pairs) != len(tables):
            raise InvalidInputError("one alignment line per sentence pair required")
        self._by_pair = {
            (tuple(src), tuple(tgt)): table
            for (src, tgt), table in zip(pairs, tables)
        }

    @classmethod
    def from_file(cls, path, pairs: Sequence[tuple[Tokens, Tokens]]) -> "FileAligner":
        return cls(pairs, load_alignments(path))

    def align(self, source: Tokens, target: Tokens) -> AlignmentTable:
        key = (tuple(source), tuple(target))
        if key not in self._by_pair:
            raise InvalidInputError(f"no stored alignment for pair {key!r}")
        return self._by_pair[key]
