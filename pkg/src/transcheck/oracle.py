"""Consistency scoring of translation pairs and threshold calibration.

The score of two translations is the highest similarity over their
slice-deleted subsequence pairs: each side contributes the full sequence
plus one variant per diff slice (at most 5 tokens long) with that slice
removed.  Deleting the mutated word's image this way discounts its effect
and yields an upper bound on consistency; a score below the calibrated
threshold flags an inconsistency bug.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass

from .errors import CalibrationError, InvalidInputError, InvalidTranslationError
from .metrics import (
    DiffSlices,
    IdfTable,
    Slice,
    bleu_metric,
    delete_slice,
    ed_metric,
    lcs_metric,
    tfidf_metric,
    word_diff,
)

METRICS = ("LCS", "ED", "TFIDF", "BLEU")

MAX_SLICE_TOKENS = 5

GRID_START = 0.8
GRID_STOP = 1.0
DEFAULT_GRID_STEP = 0.001

Tokens = Sequence[str]


def normalize_metric(name: str) -> str:
    upper = name.upper().replace("-", "")
    if upper not in METRICS:
        raise InvalidInputError(f"unknown metric {name!r}; choose from {METRICS}")
    return upper


def metric_function(name: str, idf: IdfTable | None = None):
    """Bind a metric name to a two-argument scoring function."""
    name = normalize_metric(name)
    if name == "LCS":
        return lcs_metric
    if name == "ED":
        return ed_metric
    if name == "BLEU":
        return bleu_metric
    if idf is None:
        raise InvalidInputError("TFIDF scoring needs an IdfTable")
    return lambda t1, t2: tfidf_metric(t1, t2, idf)


def retained_slices(slices: Sequence[Slice]) -> list[Slice]:
    """Slices short enough to plausibly be a mutated word's image."""
    return [s for s in slices if len(s) <= MAX_SLICE_TOKENS]


def subsequence_set(tokens: Tokens, slices: Sequence[Slice]) -> list[tuple[str, ...]]:
    """The full sequence plus one variant per retained slice deleted."""
    base = tuple(tokens)
    out = [base]
    for piece in retained_slices(slices):
        out.append(delete_slice(base, piece))
    return out


def consistency_score(
    t_s: Tokens,
    t_sm: Tokens,
    metric: str = "LCS",
    idf: IdfTable | None = None,
) -> tuple[float, DiffSlices]:
    """Highest similarity over slice-deleted subsequence pairs.

    BLEU and TFIDF never see an empty subsequence (a slice spanning a whole
    translation would produce one); such pairs are skipped for them, while
    LCS and ED score them directly.
    """
    if not t_s or not t_sm:
        raise InvalidTranslationError("translations must be non-empty")
    metric = normalize_metric(metric)
    fn = metric_function(metric, idf)
    slices = word_diff(t_s, t_sm)
    set_o = subsequence_set(t_s, slices.slices_a)
    set_m = subsequence_set(t_sm, slices.slices_b)
    skip_empty = metric in ("BLEU", "TFIDF")
    best = -1.0
    for cand_o in set_o:
        for cand_m in set_m:
            if skip_empty and (not cand_o or not cand_m):
                continue
            score = fn(cand_o, cand_m)
            if score > best:
                best = score
    return best, slices


@dataclass(frozen=True)
class ConsistencyReport:
    sentence_id: str
    mutant_id: str
    metric_name: str
    score: float
    threshold: float
    is_bug: bool
    slices: DiffSlices

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "sentence_id": self.sentence_id,
            "mutant_id": self.mutant_id,
            "metric": self.metric_name,
            "score": self.score,
            "threshold": self.threshold,
            "is_bug": self.is_bug,
            "slices": self.slices.to_json(),
        }


@dataclass(frozen=True)
class ThresholdSet:
    """Per-metric decision thresholds with their calibration F-measures."""

    thresholds: dict[str, float]
    f_measures: dict[str, float]
    grid_step: float = DEFAULT_GRID_STEP

    def threshold(self, metric: str) -> float:
        return self.thresholds[normalize_metric(metric)]

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"grid_step={self.grid_step!r}\n")
            for metric in sorted(self.thresholds):
                fh.write(f"{metric}.threshold={self.thresholds[metric]!r}\n")
                fh.write(f"{metric}.f_measure={self.f_measures.get(metric, 0.0)!r}\n")

    @classmethod
    def load(cls, path) -> "ThresholdSet":
        thresholds: dict[str, float] = {}
        f_measures: dict[str, float] = {}
        grid_step = DEFAULT_GRID_STEP
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                key, value = line.split("=", 1)
                if key == "grid_step":
                    grid_step = float(value)
                elif key.endswith(".threshold"):
                    thresholds[key[: -len(".threshold")]] = float(value)
                elif key.endswith(".f_measure"):
                    f_measures[key[: -len(".f_measure")]] = float(value)
        return cls(thresholds, f_measures, grid_step)


@dataclass(frozen=True)
class LabeledSample:
    """Calibration item: per-metric scores plus the human consistency label."""

    scores: Mapping[str, float]
    consistent: bool


def threshold_grid(step: float = DEFAULT_GRID_STEP) -> list[float]:
    count = round((GRID_STOP - GRID_START) / step)
    grid = [round(GRID_START + k * step, 10) for k in range(count + 1)]
    return grid


def f_measure(scores: list[float], labels: list[bool], threshold: float) -> float:
    """F1 of the inconsistency verdict `score < threshold`."""
    tp = fp = fn = 0
    for score, consistent in zip(scores, labels):
        flagged = score < threshold
        if flagged and not consistent:
            tp += 1
        elif flagged and consistent:
            fp += 1
        elif not flagged and not consistent:
            fn += 1
    if tp == 0:
        return 0.0
    precision = tp / (tp + fp)
    recall = tp / (tp + fn)
    return 2 * precision * recall / (precision + recall)


def learn_thresholds(
    labeled: Sequence[LabeledSample], step: float = DEFAULT_GRID_STEP
) -> ThresholdSet:
    """Grid-search per-metric thresholds maximising F1, lowest-tie wins."""
    if not labeled:
        raise CalibrationError("no labeled samples")
    labels = [sample.consistent for sample in labeled]
    if all(labels) or not any(labels):
        raise CalibrationError("labels contain a single class; cannot calibrate")
    metrics = sorted(labeled[0].scores)
    grid = threshold_grid(step)
    thresholds: dict[str, float] = {}
    best_fs: dict[str, float] = {}
    for metric in metrics:
        scores = [float(sample.scores[metric]) for sample in labeled]
        best_t, best_f = grid[0], -1.0
        for t in grid:
            f = f_measure(scores, labels, t)
            if f > best_f:
                best_t, best_f = t, f
        thresholds[normalize_metric(metric)] = best_t
        best_fs[normalize_metric(metric)] = best_f
    return ThresholdSet(thresholds, best_fs, step)


def judge(
    t_s: Tokens,
    t_sm: Tokens,
    thresholds: ThresholdSet,
    metric: str,
    idf: IdfTable | None = None,
    sentence_id: str = "",
    mutant_id: str = "",
) -> ConsistencyReport:
    """Score one translation pair and compare against the learned threshold."""
    metric = normalize_metric(metric)
    score, slices = consistency_score(t_s, t_sm, metric, idf)
    threshold = thresholds.threshold(metric)
    return ConsistencyReport(
        sentence_id=sentence_id,
        mutant_id=mutant_id,
        metric_name=metric,
        score=score,
        threshold=threshold,
        is_bug=score < threshold,
        slices=slices,
    )
