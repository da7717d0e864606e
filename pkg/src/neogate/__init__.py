"""Toolkit for neomorpheme-based gender-inclusive en->it translation
benchmarks: corpus parsing, paradigm adaptation, prompt building, endpoint
runs, and word-level scoring."""

__version__ = "0.1.0"

from .corpus import (
    Anchor,
    CorpusStats,
    Entry,
    Triplet,
    ValidationIssue,
    cohen_kappa,
    corpus_stats,
    load_corpus,
    parse_annotation,
    parse_corpus,
    serialize_corpus,
    validate_corpus,
)
from .errors import NeoGateError
from .evaluator import (
    EntryEval,
    EvalCounts,
    MetricReport,
    Outcome,
    Token,
    aggregate,
    compute_metrics,
    count_neomorphemes,
    evaluate_hypotheses,
    match_entry,
    metric_ratios,
    tokenize,
)
from .paradigm import (
    AdaptedEntry,
    AdaptedTriplet,
    TagsetDefinition,
    TagsetMapping,
    adapt_corpus,
    adapt_reference,
    load_builtin_mapping,
    load_builtin_tagset,
    parse_mapping,
)
from .promptkit import (
    ChatMessage,
    Exemplar,
    ExtractionResult,
    PromptFormat,
    PromptSpec,
    build_prompt,
    extract_translation,
    rank_exemplar_candidates,
)
from .runner import (
    ClientConfig,
    JsonlCache,
    RunRecord,
    export_hypotheses,
    prompt_hash,
    run_corpus,
)

__all__ = [name for name in dir() if not name.startswith("_")]
