"""End-to-end orchestration: mutate, translate, test, repair, report.

Every stage reads and writes line-delimited JSON so that a later stage can
be rerun from persisted artifacts; with a warm translation cache the whole
pipeline is deterministic and its artifacts are byte-reproducible.
"""

from __future__ import annotations

import json
import time
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .embeddings import SimilarityCorpus
from .errors import ConfigError, TranscheckError
from .metrics import IdfTable, build_idf
from .mutation import MutationStats, generate_mutants, pos_tag
from .oracle import (
    ConsistencyReport,
    DiffSlices,
    ThresholdSet,
    judge,
    normalize_metric,
)
from .metrics import Slice
from .repair import (
    ORIGINAL_ID,
    NumeralLexicon,
    RepairOutcome,
    build_candidate_set,
    repair_translation,
)
from .alignment import LexiconAligner, LexiconModel, train_lexicon
from .tagging import LexiconTagger
from .tokenization import tokenizer_for
from .translator import TranslationCache, TranslatorClient, TranslatorProfile

SCHEMA_VERSION = 1

REPAIR_MODES = ("cross-reference", "probability")


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

@dataclass
class RunConfig:
    input_path: Path
    similarity_corpus: Path
    translator_profile: Path
    thresholds: Path
    out_dir: Path
    cache: Path | None = None
    metrics: tuple[str, ...] = ("LCS",)
    repair_metric: str = "LCS"
    max_test_mutants: int = 5
    repair_mutants: int = 16
    repair_mode: str = "cross-reference"
    idf_corpus: Path | None = None
    source_tagger_lexicon: Path | None = None
    target_tagger_lexicon: Path | None = None
    numeral_lexicon: Path | None = None
    filter_mode: str = "sentence"
    align_iterations: int = 10
    align_model: Path | None = None
    workers: int = 1
    seed: int = 0  # reserved for sampling utilities; core stages are exact

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        base = Path(path).parent
        raw: dict[str, str] = {}
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"config line needs key=value: {line!r}")
            key, value = line.split("=", 1)
            raw[key.strip()] = value.strip()

        def path_of(key: str, required: bool = False) -> Path | None:
            value = raw.get(key, "")
            if not value:
                if required:
                    raise ConfigError(f"config is missing required key {key!r}")
                return None
            return (base / value).resolve()

        metric_field = raw.get("metric", "LCS")
        if metric_field.lower() == "all":
            metrics = ("LCS", "ED", "TFIDF", "BLEU")
        else:
            metrics = tuple(
                normalize_metric(m) for m in metric_field.replace(",", " ").split()
            )
        return cls(
            input_path=path_of("input", required=True),
            similarity_corpus=path_of("similarity_corpus", required=True),
            translator_profile=path_of("translator_profile", required=True),
            thresholds=path_of("thresholds", required=True),
            out_dir=path_of("out_dir", required=True),
            cache=path_of("cache"),
            metrics=metrics,
            repair_metric=normalize_metric(raw.get("repair_metric", "LCS")),
            max_test_mutants=int(raw.get("max_test_mutants", "5")),
            repair_mutants=int(raw.get("repair_mutants", "16")),
            repair_mode=raw.get("repair_mode", "cross-reference"),
            idf_corpus=path_of("idf_corpus"),
            source_tagger_lexicon=path_of("source_tagger_lexicon"),
            target_tagger_lexicon=path_of("target_tagger_lexicon"),
            numeral_lexicon=path_of("numeral_lexicon"),
            filter_mode=raw.get("filter_mode", "sentence"),
            align_iterations=int(raw.get("align_iterations", "10")),
            align_model=path_of("align_model"),
            workers=int(raw.get("workers", "1")),
            seed=int(raw.get("seed", "0")),
        )

    def validate(self) -> None:
        for name in ("input_path", "similarity_corpus", "translator_profile", "thresholds"):
            value: Path | None = getattr(self, name)
            if value is None or not Path(value).exists():
                raise ConfigError(f"{name} does not exist: {value}")
        for name in ("idf_corpus", "source_tagger_lexicon", "target_tagger_lexicon",
                     "numeral_lexicon", "align_model"):
            value = getattr(self, name)
            if value is not None and not Path(value).exists():
                raise ConfigError(f"{name} does not exist: {value}")
        if self.repair_mode not in REPAIR_MODES:
            raise ConfigError(f"repair_mode must be one of {REPAIR_MODES}")
        if self.max_test_mutants < 1 or self.repair_mutants < 1:
            raise ConfigError("mutant budgets must be at least 1")
        if self.repair_metric not in self.metrics:
            raise ConfigError(
                f"repair_metric {self.repair_metric} is not among tested metrics {self.metrics}"
            )
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")


@dataclass
class RunSummary:
    sentences_in: int = 0
    mutants_generated: int = 0
    mutants_filtered_out: int = 0
    mutants_emitted: int = 0
    inputs_tested: int = 0
    translated_texts: int = 0
    bugs: dict[str, int] = field(default_factory=dict)
    repairs: dict[str, dict[str, int]] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)
    stages: dict[str, str] = field(default_factory=dict)
    error: str = ""

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "sentences_in": self.sentences_in,
            "mutants_generated": self.mutants_generated,
            "mutants_filtered_out": self.mutants_filtered_out,
            "mutants_emitted": self.mutants_emitted,
            "inputs_tested": self.inputs_tested,
            "translated_texts": self.translated_texts,
            "bugs": self.bugs,
            "repairs": self.repairs,
            "timings": self.timings,
            "stages": self.stages,
            "error": self.error,
        }

    @property
    def failed(self) -> bool:
        return any(state == "failed" for state in self.stages.values())


# ---------------------------------------------------------------------------
# Artifact records
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MutantRecord:
    sentence_id: int
    mutant_id: int
    original_tokens: tuple[str, ...]
    mutant_tokens: tuple[str, ...]
    index: int
    original_word: str
    replacement_word: str

    @property
    def original_text(self) -> str:
        return " ".join(self.original_tokens)

    @property
    def mutant_text(self) -> str:
        return " ".join(self.mutant_tokens)

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "sentence_id": self.sentence_id,
            "mutant_id": self.mutant_id,
            "original": self.original_text,
            "mutant": self.mutant_text,
            "index": self.index,
            "original_word": self.original_word,
            "replacement_word": self.replacement_word,
        }

    @classmethod
    def from_json(cls, row: dict) -> "MutantRecord":
        return cls(
            sentence_id=row["sentence_id"],
            mutant_id=row["mutant_id"],
            original_tokens=tuple(row["original"].split()),
            mutant_tokens=tuple(row["mutant"].split()),
            index=row["index"],
            original_word=row["original_word"],
            replacement_word=row["replacement_word"],
        )


def _dump_lines(rows: Sequence[dict], path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True, ensure_ascii=False) + "\n")


def _load_lines(path) -> list[dict]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append(json.loads(line))
    return rows


def write_mutants(records: Sequence[MutantRecord], path) -> None:
    _dump_lines([r.to_json() for r in records], path)


def read_mutants(path) -> list[MutantRecord]:
    return [MutantRecord.from_json(row) for row in _load_lines(path)]


def write_reports(reports: Sequence[ConsistencyReport], path) -> None:
    _dump_lines([r.to_json() for r in reports], path)


def read_reports(path) -> list[ConsistencyReport]:
    out = []
    for row in _load_lines(path):
        slices = DiffSlices(
            tuple(Slice(s["start"], tuple(s["tokens"])) for s in row["slices"]["a"]),
            tuple(Slice(s["start"], tuple(s["tokens"])) for s in row["slices"]["b"]),
        )
        out.append(
            ConsistencyReport(
                sentence_id=row["sentence_id"],
                mutant_id=row["mutant_id"],
                metric_name=row["metric"],
                score=row["score"],
                threshold=row["threshold"],
                is_bug=row["is_bug"],
                slices=slices,
            )
        )
    return out


def load_sentences(path) -> list[str]:
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line:
            out.append(line)
    return out


def _ordered_map(fn: Callable, items: Sequence, workers: int) -> list:
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# Stages
# ---------------------------------------------------------------------------

def stage_mutate(
    sentences: Sequence[str],
    corpus: SimilarityCorpus,
    tagger,
    max_mutants: int = 5,
    filter_mode: str = "sentence",
    workers: int = 1,
) -> tuple[list[MutantRecord], MutationStats]:
    stats = MutationStats()

    def one(item: tuple[int, str]) -> list[MutantRecord]:
        sid, text = item
        tagged = pos_tag(text, tagger)
        local = MutationStats()
        mutants = generate_mutants(
            tagged, corpus, max_mutants, tagger, filter_mode, stats=local
        )
        records = [
            MutantRecord(
                sentence_id=sid,
                mutant_id=mid,
                original_tokens=tagged.tokens,
                mutant_tokens=m.tokens,
                index=m.mutated_index,
                original_word=m.original_word,
                replacement_word=m.replacement_word,
            )
            for mid, m in enumerate(mutants)
        ]
        return records, local

    results = _ordered_map(one, list(enumerate(sentences)), workers)
    records: list[MutantRecord] = []
    for recs, local in results:
        records.extend(recs)
        stats.candidates += local.candidates
        stats.rejected += local.rejected
        stats.emitted += local.emitted
    return records, stats


def stage_translate(
    sentences: Sequence[str],
    records: Sequence[MutantRecord],
    client: TranslatorClient,
) -> int:
    """Warm the cache for originals that have mutants, plus all mutants."""
    needed: list[str] = []
    seen = set()
    with_mutants = sorted({r.sentence_id for r in records})
    by_sid = {r.sentence_id: r for r in records}
    for sid in with_mutants:
        text = by_sid[sid].original_text
        if text not in seen:
            needed.append(text)
            seen.add(text)
    for record in records:
        if record.mutant_text not in seen:
            needed.append(record.mutant_text)
            seen.add(record.mutant_text)
    for text in needed:
        client.translate(text)
    return len(needed)


def _target_tokens(client: TranslatorClient, text: str) -> tuple[str, ...]:
    record = client.translate(text)
    return tuple(client.target_tokens(record))


def build_idf_for_run(
    client: TranslatorClient,
    records: Sequence[MutantRecord],
    idf_corpus: Path | None,
) -> IdfTable:
    """IDF weights from a corpus file, or from this run's original translations."""
    if idf_corpus is not None:
        tok = tokenizer_for(client.profile.target_tokenization)
        return build_idf(tok(line) for line in load_sentences(idf_corpus))
    originals: list[str] = []
    seen = set()
    for record in sorted(records, key=lambda r: (r.sentence_id, r.mutant_id)):
        if record.sentence_id not in seen:
            originals.append(record.original_text)
            seen.add(record.sentence_id)
    return build_idf(_target_tokens(client, text) for text in originals)


def stage_test(
    records: Sequence[MutantRecord],
    client: TranslatorClient,
    thresholds: ThresholdSet,
    metrics: Sequence[str],
    idf: IdfTable | None = None,
    workers: int = 1,
) -> list[ConsistencyReport]:
    metrics = [normalize_metric(m) for m in metrics]

    def one(record: MutantRecord) -> list[ConsistencyReport]:
        t_s = _target_tokens(client, record.original_text)
        t_sm = _target_tokens(client, record.mutant_text)
        return [
            judge(
                t_s,
                t_sm,
                thresholds,
                metric,
                idf=idf,
                sentence_id=str(record.sentence_id),
                mutant_id=f"m{record.mutant_id}",
            )
            for metric in metrics
        ]
    nested = _ordered_map(one, list(records), workers)
    return [report for group in nested for report in group]


@dataclass
class RepairRow:
    sentence_id: int
    outcome: RepairOutcome

    def to_json(self) -> dict:
        return {"sentence_id": self.sentence_id, **self.outcome.to_json()}


def stage_repair(
    records: Sequence[MutantRecord],
    reports: Sequence[ConsistencyReport],
    corpus: SimilarityCorpus,
    client: TranslatorClient,
    thresholds: ThresholdSet,
    source_tagger,
    target_tagger,
    repair_metric: str = "LCS",
    repair_mode: str = "cross-reference",
    repair_mutants: int = 16,
    filter_mode: str = "sentence",
    align_iterations: int = 10,
    align_model: LexiconModel | None = None,
    numerals: NumeralLexicon | None = None,
    idf: IdfTable | None = None,
    workers: int = 1,
) -> list[RepairRow]:
    repair_metric = normalize_metric(repair_metric)
    flagged = sorted(
        {
            int(r.sentence_id)
            for r in reports
            if r.metric_name == repair_metric and r.is_bug
        }
    )
    if not flagged:
        return []
    by_sentence: dict[int, list[MutantRecord]] = {}
    for record in records:
        by_sentence.setdefault(record.sentence_id, []).append(record)

    # Fresh mutants with the repair budget, then their translations, so the
    # lexical aligner can train on every pair this run has seen.
    repair_pool: dict[int, list[MutantRecord]] = {}
    for sid in flagged:
        base = by_sentence[sid][0]
        tagged = pos_tag(base.original_text, source_tagger)
        mutants = generate_mutants(
            tagged, corpus, repair_mutants, source_tagger, filter_mode
        )
        repair_pool[sid] = [
            MutantRecord(
                sentence_id=sid,
                mutant_id=mid,
                original_tokens=tagged.tokens,
                mutant_tokens=m.tokens,
                index=m.mutated_index,
                original_word=m.original_word,
                replacement_word=m.replacement_word,
            )
            for mid, m in enumerate(mutants)
        ]

    if align_model is None:
        training: list[tuple[tuple[str, ...], tuple[str, ...]]] = []
        seen_pairs = set()

        def add_pair(text: str) -> None:
            source = tuple(text.split())
            target = _target_tokens(client, text)
            if (source, target) not in seen_pairs:
                training.append((source, target))
                seen_pairs.add((source, target))

        for sid in sorted(by_sentence):
            add_pair(by_sentence[sid][0].original_text)
            for record in by_sentence[sid]:
                add_pair(record.mutant_text)
        for sid in flagged:
            for record in repair_pool[sid]:
                add_pair(record.mutant_text)
        align_model = train_lexicon(training, align_iterations)
    aligner = LexiconAligner(align_model)

    flagged_mutants: dict[int, list[int]] = {}
    for report in reports:
        if report.metric_name == repair_metric and report.is_bug:
            sid = int(report.sentence_id)
            mid = int(report.mutant_id.lstrip("m"))
            flagged_mutants.setdefault(sid, []).append(mid)

    def repair_group(sid: int) -> list[RepairRow]:
        base = by_sentence[sid][0]
        original_tokens = base.original_tokens
        original_translation = _target_tokens(client, base.original_text)
        original_prob = client.translate(base.original_text).probability
        pool_rows = []
        for record in repair_pool[sid]:
            prob = client.translate(record.mutant_text).probability
            pool_rows.append(
                (
                    f"m{record.mutant_id}",
                    record.mutant_tokens,
                    _target_tokens(client, record.mutant_text),
                    prob,
                )
            )
        cands, _ = build_candidate_set(
            original_tokens, original_translation, pool_rows, original_prob
        )
        outcome = repair_translation(
            cands,
            mode=repair_mode,
            metric=repair_metric,
            thresholds=thresholds,
            target_tagger=target_tagger,
            aligner=aligner,
            idf=idf,
            numerals=numerals,
            target_id=ORIGINAL_ID,
        )
        rows = [RepairRow(sid, outcome)]

        test_records = {r.mutant_id: r for r in by_sentence[sid]}
        for mid in sorted(set(flagged_mutants.get(sid, []))):
            record = test_records[mid]
            target_translation = _target_tokens(client, record.mutant_text)
            target_prob = client.translate(record.mutant_text).probability
            others = [
                ("orig", original_tokens, original_translation, original_prob)
            ] + pool_rows
            mcands, _ = build_candidate_set(
                record.mutant_tokens, target_translation, others, target_prob
            )
            rows.append(
                RepairRow(
                    sid,
                    repair_translation(
                        mcands,
                        mode=repair_mode,
                        metric=repair_metric,
                        thresholds=thresholds,
                        target_tagger=target_tagger,
                        aligner=aligner,
                        idf=idf,
                        numerals=numerals,
                        repaired_original=outcome.repaired_translation,
                        target_id=f"m{mid}",
                    ),
                )
            )
        return rows

    nested = _ordered_map(repair_group, flagged, workers)
    return [row for group in nested for row in group]


# ---------------------------------------------------------------------------
# Histogram reporting
# ---------------------------------------------------------------------------

BUCKET_WIDTH = 0.05
N_BUCKETS = 20  # [0, 1) in 0.05 steps, plus the exact-1.0 bucket


@dataclass
class Histogram:
    counts: dict[str, list[int]]  # metric -> 21 buckets
    malformed: int = 0

    @staticmethod
    def bucket_label(idx: int) -> str:
        if idx == N_BUCKETS:
            return "1.00"
        low = idx * BUCKET_WIDTH
        return f"{low:.2f}-{low + BUCKET_WIDTH:.2f}"

    def to_text(self) -> str:
        lines = []
        for metric in sorted(self.counts):
            lines.append(f"[{metric}]")
            for idx, count in enumerate(self.counts[metric]):
                if count:
                    lines.append(f"  {self.bucket_label(idx)}  {count}")
        if self.malformed:
            lines.append(f"# skipped malformed lines: {self.malformed}")
        return "\n".join(lines)

    def to_csv(self) -> str:
        lines = ["metric,bucket,count"]
        for metric in sorted(self.counts):
            for idx, count in enumerate(self.counts[metric]):
                lines.append(f"{metric},{self.bucket_label(idx)},{count}")
        return "\n".join(lines)


def report_histogram(reports_path) -> Histogram:
    """Bucket consistency scores per metric, 0.05 wide plus exact 1.0."""
    counts: dict[str, list[int]] = {}
    malformed = 0
    with open(reports_path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
                metric = row["metric"]
                score = float(row["score"])
            except (ValueError, KeyError):
                malformed += 1
                continue
            buckets = counts.setdefault(metric, [0] * (N_BUCKETS + 1))
            if score >= 1.0:
                buckets[N_BUCKETS] += 1
            else:
                buckets[min(int(score / BUCKET_WIDTH), N_BUCKETS - 1)] += 1
    return Histogram(counts, malformed)


# ---------------------------------------------------------------------------
# Full run
# ---------------------------------------------------------------------------

def run_pipeline(config: RunConfig) -> RunSummary:
    """Execute all stages, persisting artifacts and a summary in out_dir."""
    config.validate()
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    summary = RunSummary()

    profile = TranslatorProfile.from_file(config.translator_profile)
    if config.repair_mode == "probability" and not profile.grey_box:
        raise ConfigError("probability repair needs a grey-box translator profile")
    cache_path = config.cache or (out_dir / "cache.jsonl")
    client = TranslatorClient(profile, TranslationCache(cache_path))
    corpus = SimilarityCorpus.load(config.similarity_corpus)
    thresholds = ThresholdSet.load(config.thresholds)
    for metric in config.metrics:
        if metric not in thresholds.thresholds:
            raise ConfigError(f"thresholds file lacks metric {metric}")
    source_tagger = (
        LexiconTagger.from_file(config.source_tagger_lexicon)
        if config.source_tagger_lexicon
        else LexiconTagger()
    )
    target_tagger = (
        LexiconTagger.from_file(config.target_tagger_lexicon)
        if config.target_tagger_lexicon
        else LexiconTagger()
    )
    numerals = (
        NumeralLexicon.from_file(config.numeral_lexicon)
        if config.numeral_lexicon
        else NumeralLexicon()
    )
    align_model = LexiconModel.load(config.align_model) if config.align_model else None

    sentences = load_sentences(config.input_path)
    summary.sentences_in = len(sentences)

    records: list[MutantRecord] = []
    reports: list[ConsistencyReport] = []
    idf: IdfTable | None = None

    def run_stage(name: str, fn) -> bool:
        start = time.monotonic()
        try:
            fn()
        except TranscheckError as exc:
            summary.stages[name] = "failed"
            summary.error = f"{name}: {exc}"
            return False
        finally:
            summary.timings[name] = round(time.monotonic() - start, 6)
        summary.stages[name] = "ok"
        return True

    def do_mutate() -> None:
        nonlocal records
        records, stats = stage_mutate(
            sentences, corpus, source_tagger,
            config.max_test_mutants, config.filter_mode, config.workers,
        )
        write_mutants(records, out_dir / "mutants.jsonl")
        summary.mutants_generated = stats.candidates
        summary.mutants_filtered_out = stats.rejected
        summary.mutants_emitted = stats.emitted

    def do_translate() -> None:
        summary.translated_texts = stage_translate(sentences, records, client)
        summary.inputs_tested = len(records)

    def do_test() -> None:
        nonlocal reports, idf
        if "TFIDF" in config.metrics:
            idf = build_idf_for_run(client, records, config.idf_corpus)
        reports = stage_test(
            records, client, thresholds, config.metrics, idf, config.workers
        )
        write_reports(reports, out_dir / "reports.jsonl")
        for metric in config.metrics:
            summary.bugs[metric] = sum(
                1 for r in reports if r.metric_name == metric and r.is_bug
            )

    def do_repair() -> None:
        rows = stage_repair(
            records, reports, corpus, client, thresholds,
            source_tagger, target_tagger,
            repair_metric=config.repair_metric,
            repair_mode=config.repair_mode,
            repair_mutants=config.repair_mutants,
            filter_mode=config.filter_mode,
            align_iterations=config.align_iterations,
            align_model=align_model,
            numerals=numerals,
            idf=idf,
            workers=config.workers,
        )
        _dump_lines([row.to_json() for row in rows], out_dir / "repairs.jsonl")
        per_status: dict[str, int] = {}
        for row in rows:
            per_status[row.outcome.status] = per_status.get(row.outcome.status, 0) + 1
        summary.repairs[config.repair_mode] = per_status

    for name, fn in (
        ("mutate", do_mutate),
        ("translate", do_translate),
        ("test", do_test),
        ("repair", do_repair),
    ):
        if not run_stage(name, fn):
            break

    with open(out_dir / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary.to_json(), fh, sort_keys=True, indent=2)
        fh.write("\n")
    return summary
