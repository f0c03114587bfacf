"""Automatic repair of inconsistent translations by candidate substitution.

Candidates (the sentence's own translation plus its mutants') are ranked
either by the translator's predictive probability (grey box) or by mean
mutual consistency (cross-reference, black box).  Walking the ranked list,
the first candidate that survives the numeric, structure and consistency
gates donates its translation: the replaced word's target span is swapped
back to the original word's span, and the result becomes the repaired
translation.  Reaching the sentence's own entry first means the existing
translation is kept.
"""

from __future__ import annotations

import re
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path

from .alignment import Aligner, AlignmentTable, get_translated_word
from .errors import GreyBoxUnavailableError, InvalidInputError, MapBackUnavailableError
from .metrics import IdfTable
from .oracle import ThresholdSet, consistency_score, normalize_metric
from .tagging import NUMBER_WORDS, PosTagger

Tokens = Sequence[str]

ORIGINAL_ID = "original"

NUMERIC_RE = re.compile(r"^\d+(?:[.,]\d+)*$")


class NumeralLexicon:
    """Number words per language, extending the digit pattern."""

    def __init__(self, words: set[str] | None = None):
        self.words = {w.lower() for w in (words if words is not None else NUMBER_WORDS)}

    @classmethod
    def from_file(cls, path) -> "NumeralLexicon":
        words = set()
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            word = line.split("#", 1)[0].strip()
            if word:
                words.add(word)
        return cls(words)

    def __contains__(self, token: str) -> bool:
        return token.lower() in self.words


def is_numeric(span: str | Tokens, numerals: NumeralLexicon | None = None) -> bool:
    """True when every token of the span is a numeral or a number word."""
    tokens = span.split() if isinstance(span, str) else list(span)
    if not tokens:
        return False
    numerals = numerals or NumeralLexicon()
    return all(bool(NUMERIC_RE.match(tok)) or tok in numerals for tok in tokens)


@dataclass(frozen=True)
class Candidate:
    candidate_id: str  # ORIGINAL_ID or a mutant id such as "m3"
    sentence: tuple[str, ...]
    translation: tuple[str, ...]
    probability: float | None = None
    ordinal: int = 0  # stable tie-break position

    @property
    def is_original(self) -> bool:
        return self.candidate_id == ORIGINAL_ID


@dataclass
class CandidateSet:
    """One target entry plus single-edit alternatives.

    Entries whose sentence does not differ from the target's in exactly one
    token cannot feed map-back and are rejected on construction.
    """

    entries: list[Candidate]

    def __post_init__(self) -> None:
        originals = [c for c in self.entries if c.is_original]
        if len(originals) != 1:
            raise InvalidInputError("candidate set needs exactly one original entry")
        base = originals[0].sentence
        for cand in self.entries:
            if cand.is_original:
                continue
            if len(cand.sentence) != len(base) or _diff_count(base, cand.sentence) != 1:
                raise InvalidInputError(
                    f"candidate {cand.candidate_id} is not a single-token edit"
                )

    @property
    def original(self) -> Candidate:
        return next(c for c in self.entries if c.is_original)

    def __len__(self) -> int:
        return len(self.entries)


def _diff_count(a: Tokens, b: Tokens) -> int:
    return sum(1 for x, y in zip(a, b) if x != y)


def build_candidate_set(
    target_sentence: Tokens,
    target_translation: Tokens,
    others: Sequence[tuple[str, Tokens, Tokens, float | None]],
    target_probability: float | None = None,
) -> tuple[CandidateSet, list[str]]:
    """Assemble a pool around one target, dropping non-single-edit entries.

    `others` rows are (candidate_id, sentence, translation, probability).
    Returns the set plus the ids that were dropped.
    """
    base = tuple(target_sentence)
    entries = [Candidate(ORIGINAL_ID, base, tuple(target_translation), target_probability, 0)]
    skipped: list[str] = []
    ordinal = 1
    for cand_id, sentence, translation, probability in others:
        sent = tuple(sentence)
        if len(sent) != len(base) or _diff_count(base, sent) != 1:
            skipped.append(cand_id)
            continue
        entries.append(Candidate(cand_id, sent, tuple(translation), probability, ordinal))
        ordinal += 1
    return CandidateSet(entries), skipped


# ---------------------------------------------------------------------------
# Ranking
# ---------------------------------------------------------------------------

def _tie_key(cand: Candidate) -> tuple[int, int]:
    return (0 if cand.is_original else 1, cand.ordinal)


def rank_by_probability(cands: CandidateSet) -> list[Candidate]:
    """Descending predictive probability; the original wins ties."""
    for cand in cands.entries:
        if cand.probability is None:
            raise GreyBoxUnavailableError(
                f"candidate {cand.candidate_id} has no probability"
            )
    return sorted(cands.entries, key=lambda c: (-c.probability, *_tie_key(c)))


def cross_reference_means(
    cands: CandidateSet, metric: str = "LCS", idf: IdfTable | None = None
) -> dict[str, float]:
    """Mean consistency of each entry's translation against all the others."""
    metric = normalize_metric(metric)
    means: dict[str, float] = {}
    for cand in cands.entries:
        scores = [
            consistency_score(cand.translation, other.translation, metric, idf)[0]
            for other in cands.entries
            if other.candidate_id != cand.candidate_id
        ]
        means[cand.candidate_id] = sum(scores) / len(scores) if scores else 1.0
    return means


def rank_by_cross_reference(
    cands: CandidateSet, metric: str = "LCS", idf: IdfTable | None = None
) -> list[Candidate]:
    """Descending mean mutual consistency; the original wins ties."""
    if len(cands) < 2:
        return list(cands.entries)
    means = cross_reference_means(cands, metric, idf)
    return sorted(
        cands.entries, key=lambda c: (-means[c.candidate_id], *_tie_key(c))
    )


# ---------------------------------------------------------------------------
# Map-back
# ---------------------------------------------------------------------------

def replaced_position(s: Tokens, s_r: Tokens) -> int:
    """Index of the single differing token between a sentence and a mutant."""
    if len(s) != len(s_r):
        raise InvalidInputError("sentences differ in length; not a single edit")
    diffs = [i for i, (x, y) in enumerate(zip(s, s_r)) if x != y]
    if len(diffs) != 1:
        raise InvalidInputError(f"expected exactly one differing token, found {len(diffs)}")
    return diffs[0]


def map_back(
    t_s: Tokens,
    t_sr: Tokens,
    s: Tokens,
    s_r: Tokens,
    a_s: AlignmentTable,
    a_sr: AlignmentTable,
) -> tuple[str, ...]:
    """Swap the replacement word's target span for the original word's.

    The candidate translation t_sr is adopted wholesale except that the
    span aligned to the replacement word is substituted with the span the
    original word has in t_s.
    """
    idx = replaced_position(s, s_r)
    span_original = get_translated_word(idx, a_s, t_s)
    span_replacement = get_translated_word(idx, a_sr, t_sr)
    if span_original is None:
        raise MapBackUnavailableError(f"word {s[idx]!r} is unaligned in the original")
    if span_replacement is None:
        raise MapBackUnavailableError(f"word {s_r[idx]!r} is unaligned in the candidate")
    return (
        tuple(t_sr[: span_replacement.start])
        + span_original.tokens
        + tuple(t_sr[span_replacement.stop:])
    )


# ---------------------------------------------------------------------------
# Repair walk
# ---------------------------------------------------------------------------

STATUS_REPAIRED = "repaired"
STATUS_KEPT = "kept-original"
STATUS_NO_CANDIDATE = "no-candidate"


@dataclass(frozen=True)
class GateCheck:
    candidate_id: str
    gate: str  # "alignment" | "numeric" | "structure" | "consistency"
    passed: bool
    note: str = ""

    def to_json(self) -> dict:
        return {
            "candidate": self.candidate_id,
            "gate": self.gate,
            "passed": self.passed,
            "note": self.note,
        }


@dataclass
class RepairOutcome:
    target_id: str
    status: str
    chosen_candidate: str
    repaired_translation: tuple[str, ...]
    gates: list[GateCheck] = field(default_factory=list)
    mode: str = "cross-reference"
    metric: str = "LCS"
    post_mean_consistency: float | None = None
    skipped_candidates: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "target": self.target_id,
            "status": self.status,
            "chosen_candidate": self.chosen_candidate,
            "repaired_translation": list(self.repaired_translation),
            "gates": [g.to_json() for g in self.gates],
            "mode": self.mode,
            "metric": self.metric,
            "post_mean_consistency": self.post_mean_consistency,
            "skipped_candidates": list(self.skipped_candidates),
        }


def repair_translation(
    cands: CandidateSet,
    mode: str = "cross-reference",
    metric: str = "LCS",
    thresholds: ThresholdSet | None = None,
    target_tagger: PosTagger | None = None,
    aligner: Aligner | None = None,
    idf: IdfTable | None = None,
    numerals: NumeralLexicon | None = None,
    repaired_original: Tokens | None = None,
    target_id: str = ORIGINAL_ID,
) -> RepairOutcome:
    """Walk the ranked candidates and adopt the first acceptable mapping.

    `repaired_original` switches on the consistency gate used when the
    target is itself a mutant: its mapped translation must stay
    threshold-consistent with the already repaired original translation.
    """
    if aligner is None:
        raise InvalidInputError("repair needs an aligner")
    metric = normalize_metric(metric)
    if mode == "probability":
        ranked = rank_by_probability(cands)
    elif mode == "cross-reference":
        ranked = rank_by_cross_reference(cands, metric, idf)
    else:
        raise InvalidInputError(f"unknown repair mode {mode!r}")

    target = cands.original
    gates: list[GateCheck] = []
    outcome = RepairOutcome(
        target_id=target_id,
        status=STATUS_NO_CANDIDATE,
        chosen_candidate="",
        repaired_translation=tuple(target.translation),
        gates=gates,
        mode=mode,
        metric=metric,
    )
    a_s = aligner.align(target.sentence, target.translation)

    for cand in ranked:
        if cand.is_original:
            outcome.status = STATUS_KEPT
            outcome.chosen_candidate = ORIGINAL_ID
            break

        idx = replaced_position(target.sentence, cand.sentence)
        w_i, w_ir = target.sentence[idx], cand.sentence[idx]
        a_sr = aligner.align(cand.sentence, cand.translation)
        span_o = get_translated_word(idx, a_s, target.translation)
        span_r = get_translated_word(idx, a_sr, cand.translation)
        if span_o is None or span_r is None:
            missing = w_i if span_o is None else w_ir
            gates.append(GateCheck(cand.candidate_id, "alignment", False,
                                   f"{missing!r} unaligned"))
            continue
        gates.append(GateCheck(cand.candidate_id, "alignment", True))

        numeric_i, numeric_ir = is_numeric([w_i], numerals), is_numeric([w_ir], numerals)
        if numeric_i != is_numeric(span_o.tokens, numerals) or numeric_ir != is_numeric(
            span_r.tokens, numerals
        ):
            gates.append(GateCheck(cand.candidate_id, "numeric", False,
                                   "word/translation numeric types disagree"))
            continue
        gates.append(GateCheck(cand.candidate_id, "numeric", True))

        mapped = map_back(
            target.translation, cand.translation,
            target.sentence, cand.sentence, a_s, a_sr,
        )

        if not (numeric_i and numeric_ir):
            if target_tagger is None:
                raise InvalidInputError("structure gate needs a target-language tagger")
            if target_tagger.tag(list(mapped)) != target_tagger.tag(list(cand.translation)):
                gates.append(GateCheck(cand.candidate_id, "structure", False,
                                       "map-back changed the tag sequence"))
                continue
            gates.append(GateCheck(cand.candidate_id, "structure", True))

        if repaired_original is not None:
            if thresholds is None:
                raise InvalidInputError("consistency gate needs thresholds")
            score, _ = consistency_score(repaired_original, mapped, metric, idf)
            if score < thresholds.threshold(metric):
                gates.append(GateCheck(cand.candidate_id, "consistency", False,
                                       f"score {score:.4f} below threshold"))
                continue
            gates.append(GateCheck(cand.candidate_id, "consistency", True))

        if mapped == tuple(target.translation):
            # Nothing actually changed; keeping the original is the honest
            # status for a byte-identical result.
            outcome.status = STATUS_KEPT
            outcome.chosen_candidate = cand.candidate_id
        else:
            outcome.status = STATUS_REPAIRED
            outcome.chosen_candidate = cand.candidate_id
            outcome.repaired_translation = mapped
        break

    others = [c for c in cands.entries if not c.is_original]
    if others:
        scores = [
            consistency_score(outcome.repaired_translation, c.translation, metric, idf)[0]
            for c in others
        ]
        outcome.post_mean_consistency = sum(scores) / len(scores)
    return outcome
