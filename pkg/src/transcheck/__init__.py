"""Metamorphic consistency testing and black-box repair for translators.

The library mutates sentences with context-similar word replacements,
compares the translator's outputs for the original and each mutant with
slice-aware similarity metrics, flags inconsistency bugs against learned
thresholds, and post-processes flagged translations by mapping the best
candidate translation back onto the original sentence.
"""

from .alignment import (
    AlignmentTable,
    LexiconAligner,
    LexiconModel,
    Link,
    TokenSpan,
    align,
    get_translated_word,
    train_lexicon,
)
from .embeddings import (
    EmbeddingModel,
    SimilarityCorpus,
    WordVector,
    build_corpus,
    cosine_similarity,
    load_embeddings,
)
from .errors import TranscheckError
from .metrics import (
    DiffSlices,
    IdfTable,
    Slice,
    bag_of_words,
    bleu_metric,
    build_idf,
    ed_metric,
    lcs_metric,
    modified_ngram_precision,
    tfidf_metric,
    word_diff,
)
from .mutation import (
    MutantSentence,
    TaggedSentence,
    generate_mutants,
    pos_tag,
    structural_filter,
)
from .oracle import (
    ConsistencyReport,
    LabeledSample,
    ThresholdSet,
    consistency_score,
    judge,
    learn_thresholds,
)
from .repair import (
    Candidate,
    CandidateSet,
    NumeralLexicon,
    RepairOutcome,
    build_candidate_set,
    is_numeric,
    map_back,
    rank_by_cross_reference,
    rank_by_probability,
    repair_translation,
)
from .pipeline import RunConfig, RunSummary, report_histogram, run_pipeline
from .tagging import ExternalProcessTagger, LexiconTagger
from .translator import (
    MockRules,
    TranslationCache,
    TranslationRecord,
    TranslatorClient,
    TranslatorProfile,
    mock_translator,
    translate,
)

__version__ = "0.1.0"

__all__ = [
    "AlignmentTable", "LexiconAligner", "LexiconModel", "Link", "TokenSpan",
    "align", "get_translated_word", "train_lexicon",
    "EmbeddingModel", "SimilarityCorpus", "WordVector", "build_corpus",
    "cosine_similarity", "load_embeddings",
    "TranscheckError",
    "DiffSlices", "IdfTable", "Slice", "bag_of_words", "bleu_metric",
    "build_idf", "ed_metric", "lcs_metric", "modified_ngram_precision",
    "tfidf_metric", "word_diff",
    "MutantSentence", "TaggedSentence", "generate_mutants", "pos_tag",
    "structural_filter",
    "ConsistencyReport", "LabeledSample", "ThresholdSet", "consistency_score",
    "judge", "learn_thresholds",
    "Candidate", "CandidateSet", "NumeralLexicon", "RepairOutcome",
    "build_candidate_set", "is_numeric", "map_back",
    "rank_by_cross_reference", "rank_by_probability", "repair_translation",
    "RunConfig", "RunSummary", "report_histogram", "run_pipeline",
    "ExternalProcessTagger", "LexiconTagger",
    "MockRules", "TranslationCache", "TranslationRecord", "TranslatorClient",
    "TranslatorProfile", "mock_translator", "translate",
]
