"""Command-line interface.

Verbs mirror the pipeline stages so any stage can be rerun from its
persisted artifacts.  Exit codes: 0 success, 1 validation error, 2 stage
failure.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .alignment import LexiconModel, train_lexicon
from .embeddings import build_corpus, load_embeddings
from .errors import ConfigError, TranscheckError
from .metrics import build_idf
from .oracle import ThresholdSet
from .pipeline import (
    RunConfig,
    build_idf_for_run,
    read_mutants,
    read_reports,
    report_histogram,
    run_pipeline,
    stage_mutate,
    stage_repair,
    stage_test,
    stage_translate,
    write_mutants,
    write_reports,
    _dump_lines,
    load_sentences,
)
from .repair import NumeralLexicon
from .embeddings import SimilarityCorpus
from .tagging import LexiconTagger
from .tokenization import tokenizer_for
from .translator import TranslationCache, TranslatorClient, TranslatorProfile

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_STAGE_FAILURE = 2

METRIC_CHOICES = click.Choice(
    ["LCS", "ED", "TFIDF", "BLEU", "all"], case_sensitive=False
)


@click.group()
def cli() -> None:
    """Consistency testing and repair for translation services."""


# -- corpus ----------------------------------------------------------------

@cli.group()
def corpus() -> None:
    """Context-similarity corpus commands."""


@corpus.command("build")
@click.option("--model1", required=True, type=click.Path(exists=True))
@click.option("--model2", required=True, type=click.Path(exists=True))
@click.option("--sim-threshold", default=0.9, show_default=True, type=float)
@click.option("--out", required=True, type=click.Path())
@click.option("--lowercase", is_flag=True, help="Fold both vocabularies to lowercase.")
@click.option("--workers", default=1, show_default=True, type=int)
def corpus_build(model1, model2, sim_threshold, out, lowercase, workers) -> None:
    """Intersect two embedding models into a similarity corpus TSV."""
    m1 = load_embeddings(model1, lowercase=lowercase)
    m2 = load_embeddings(model2, lowercase=lowercase)
    result = build_corpus(m1, m2, sim_threshold, workers=workers)
    result.save(out)
    click.echo(f"{len(result)} pairs -> {out}")


# -- idf -------------------------------------------------------------------

@cli.group()
def idf() -> None:
    """Inverse-document-frequency table commands."""


@idf.command("build")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@click.option("--tokenization", default="word", show_default=True,
              type=click.Choice(["word", "char"]))
def idf_build(corpus_path, out, tokenization) -> None:
    """Count document frequencies over a sentence-per-line corpus."""
    tok = tokenizer_for(tokenization)
    table = build_idf(tok(line) for line in load_sentences(corpus_path))
    table.save(out)
    click.echo(f"{len(table.doc_freq)} tokens over {table.corpus_size} sentences -> {out}")


# -- align -----------------------------------------------------------------

@cli.group()
def align() -> None:
    """Word-alignment model commands."""


@align.command("train")
@click.option("--parallel", required=True, type=click.Path(exists=True),
              help="TSV with one 'source<TAB>target' sentence pair per line.")
@click.option("--iters", default=10, show_default=True, type=int)
@click.option("--out", required=True, type=click.Path())
def align_train(parallel, iters, out) -> None:
    """Estimate lexical translation probabilities by EM."""
    pairs = []
    for line in Path(parallel).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        source, target = line.split("\t")
        pairs.append((tuple(source.split()), tuple(target.split())))
    model = train_lexicon(pairs, iters)
    model.save(out)
    click.echo(
        f"trained on {model.corpus_size} pairs, "
        f"max drift {model.max_normalization_drift():.2e} -> {out}"
    )


# -- mutate ----------------------------------------------------------------

@cli.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--max-mutants", default=5, show_default=True, type=int)
@click.option("--out", required=True, type=click.Path())
@click.option("--tagger-lexicon", type=click.Path(exists=True))
@click.option("--filter-mode", default="sentence", show_default=True,
              type=click.Choice(["sentence", "word"]))
@click.option("--workers", default=1, show_default=True, type=int)
def mutate(corpus_path, input_path, max_mutants, out, tagger_lexicon,
           filter_mode, workers) -> None:
    """Generate filter-passing context-similar mutants as JSONL."""
    sim = SimilarityCorpus.load(corpus_path)
    tagger = LexiconTagger.from_file(tagger_lexicon) if tagger_lexicon else LexiconTagger()
    sentences = load_sentences(input_path)
    records, stats = stage_mutate(sentences, sim, tagger, max_mutants,
                                  filter_mode, workers)
    write_mutants(records, out)
    click.echo(
        f"{stats.candidates} candidates, {stats.rejected} filtered out, "
        f"{stats.emitted} emitted -> {out}"
    )


# -- translate ---------------------------------------------------------------

@cli.command()
@click.option("--profile", required=True, type=click.Path(exists=True))
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--cache", required=True, type=click.Path())
@click.option("--out", type=click.Path(), help="Optional input<TAB>output TSV.")
def translate(profile, input_path, cache, out) -> None:
    """Translate each input line, filling the response cache."""
    client = TranslatorClient(
        TranslatorProfile.from_file(profile), TranslationCache(cache)
    )
    rows = []
    for line in load_sentences(input_path):
        record = client.translate(line)
        rows.append(f"{record.input_text}\t{record.output_text}")
    if out:
        Path(out).write_text("\n".join(rows) + "\n", encoding="utf-8")
    else:
        for row in rows:
            click.echo(row)


# -- test --------------------------------------------------------------------

@cli.command()
@click.option("--mutants", "mutants_path", required=True, type=click.Path(exists=True))
@click.option("--translator", "profile_path", required=True, type=click.Path(exists=True))
@click.option("--metric", default="all", show_default=True, type=METRIC_CHOICES)
@click.option("--thresholds", "thresholds_path", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@click.option("--cache", type=click.Path())
@click.option("--idf-corpus", type=click.Path(exists=True))
@click.option("--workers", default=1, show_default=True, type=int)
def test(mutants_path, profile_path, metric, thresholds_path, out, cache,
         idf_corpus, workers) -> None:
    """Score mutant translations against the originals and flag bugs."""
    records = read_mutants(mutants_path)
    client = TranslatorClient(
        TranslatorProfile.from_file(profile_path), TranslationCache(cache)
    )
    thresholds = ThresholdSet.load(thresholds_path)
    metrics = ("LCS", "ED", "TFIDF", "BLEU") if metric.lower() == "all" else (metric.upper(),)
    stage_translate([], records, client)
    table = None
    if "TFIDF" in metrics:
        table = build_idf_for_run(
            client, records, Path(idf_corpus) if idf_corpus else None
        )
    reports = stage_test(records, client, thresholds, metrics, table, workers)
    write_reports(reports, out)
    bugs = sum(1 for r in reports if r.is_bug)
    click.echo(f"{len(reports)} reports, {bugs} flagged -> {out}")


# -- repair ------------------------------------------------------------------

@cli.command()
@click.option("--reports", "reports_path", required=True, type=click.Path(exists=True))
@click.option("--mutants", "mutants_path", required=True, type=click.Path(exists=True))
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--profile", "profile_path", required=True, type=click.Path(exists=True))
@click.option("--thresholds", "thresholds_path", required=True, type=click.Path(exists=True))
@click.option("--mode", default="cross-reference", show_default=True,
              type=click.Choice(["cross-reference", "probability"]))
@click.option("--metric", default="LCS", show_default=True, type=METRIC_CHOICES)
@click.option("--repair-mutants", default=16, show_default=True, type=int)
@click.option("--out", required=True, type=click.Path())
@click.option("--cache", type=click.Path())
@click.option("--tagger-lexicon", type=click.Path(exists=True))
@click.option("--target-tagger-lexicon", type=click.Path(exists=True))
@click.option("--numeral-lexicon", type=click.Path(exists=True))
@click.option("--idf-corpus", type=click.Path(exists=True))
@click.option("--align-iters", default=10, show_default=True, type=int)
@click.option("--align-model", type=click.Path(exists=True))
@click.option("--filter-mode", default="sentence", show_default=True,
              type=click.Choice(["sentence", "word"]))
@click.option("--workers", default=1, show_default=True, type=int)
def repair(reports_path, mutants_path, corpus_path, profile_path, thresholds_path,
           mode, metric, repair_mutants, out, cache, tagger_lexicon,
           target_tagger_lexicon, numeral_lexicon, idf_corpus, align_iters,
           align_model, filter_mode, workers) -> None:
    """Repair translations of sentence groups flagged in the reports."""
    if metric.lower() == "all":
        raise click.UsageError("repair needs a single --metric")
    records = read_mutants(mutants_path)
    reports = read_reports(reports_path)
    client = TranslatorClient(
        TranslatorProfile.from_file(profile_path), TranslationCache(cache)
    )
    sim = SimilarityCorpus.load(corpus_path)
    thresholds = ThresholdSet.load(thresholds_path)
    source_tagger = (
        LexiconTagger.from_file(tagger_lexicon) if tagger_lexicon else LexiconTagger()
    )
    target_tagger = (
        LexiconTagger.from_file(target_tagger_lexicon)
        if target_tagger_lexicon
        else LexiconTagger()
    )
    numerals = (
        NumeralLexicon.from_file(numeral_lexicon) if numeral_lexicon else NumeralLexicon()
    )
    table = None
    if metric.upper() == "TFIDF":
        table = build_idf_for_run(
            client, records, Path(idf_corpus) if idf_corpus else None
        )
    rows = stage_repair(
        records, reports, sim, client, thresholds, source_tagger, target_tagger,
        repair_metric=metric.upper(),
        repair_mode=mode,
        repair_mutants=repair_mutants,
        filter_mode=filter_mode,
        align_iterations=align_iters,
        align_model=LexiconModel.load(align_model) if align_model else None,
        numerals=numerals,
        idf=table,
        workers=workers,
    )
    _dump_lines([row.to_json() for row in rows], out)
    repaired = sum(1 for r in rows if r.outcome.status == "repaired")
    click.echo(f"{len(rows)} targets, {repaired} repaired -> {out}")


# -- run and report ----------------------------------------------------------

@cli.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
def run(config_path) -> None:
    """Run the full pipeline from a key=value config file."""
    summary = run_pipeline(RunConfig.from_file(config_path))
    for stage, state in summary.stages.items():
        click.echo(f"{stage}: {state} ({summary.timings.get(stage, 0.0):.2f}s)")
    click.echo(
        f"sentences={summary.sentences_in} mutants={summary.mutants_emitted} "
        f"bugs={summary.bugs} repairs={summary.repairs}"
    )
    if summary.failed:
        raise StageFailure(summary.error)


class StageFailure(Exception):
    pass


@cli.command()
@click.option("--reports", "reports_path", required=True, type=click.Path(exists=True))
@click.option("--format", "fmt", default="text", show_default=True,
              type=click.Choice(["text", "csv"]))
@click.option("--out", type=click.Path())
def report(reports_path, fmt, out) -> None:
    """Histogram of consistency scores per metric (0.05 buckets plus 1.0)."""
    hist = report_histogram(reports_path)
    text = hist.to_csv() if fmt == "csv" else hist.to_text()
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        click.echo(text)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Abort:
        return EXIT_VALIDATION
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return EXIT_VALIDATION
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        return EXIT_VALIDATION
    except StageFailure as exc:
        click.echo(f"stage failure: {exc}", err=True)
        return EXIT_STAGE_FAILURE
    except TranscheckError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
