"""Count-based n-gram language models."""

from seqshift.lm.arpa import load_arpa, read_arpa, save_arpa, write_arpa
from seqshift.lm.base import LN10, LanguageModel, LmState
from seqshift.lm.ngram import (
    NGramCounts,
    NGramModel,
    PerplexityResult,
    Smoothing,
    count_ngrams,
    estimate_ngram,
    evaluate_perplexity,
    lm_logprob,
    perplexity,
    renormalize_subword_ppl,
    train_ngram,
)

__all__ = [
    "LN10",
    "LanguageModel",
    "LmState",
    "NGramCounts",
    "NGramModel",
    "PerplexityResult",
    "Smoothing",
    "count_ngrams",
    "estimate_ngram",
    "evaluate_perplexity",
    "lm_logprob",
    "load_arpa",
    "perplexity",
    "read_arpa",
    "renormalize_subword_ppl",
    "save_arpa",
    "train_ngram",
    "write_arpa",
]
