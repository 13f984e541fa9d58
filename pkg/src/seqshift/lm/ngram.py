"""Count-based back-off n-gram language models."""

import logging
import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum

from seqshift.errors import EmptyCorpusError, ZeroProbabilityError
from seqshift.lm.base import LanguageModel, LmState
from seqshift.text.corpus import (
    BOS_ID,
    EOS_ID,
    SENTENCE_END,
    UNKNOWN,
    Corpus,
    Vocabulary,
)

logger = logging.getLogger(__name__)

NGram = tuple[int, ...]

# ARPA placeholder for the never-predicted sentence-begin symbol
BOS_LOGPROB = -99.0
DEFAULT_DISCOUNT = 0.7


class Smoothing(str, Enum):
    """Estimation methods."""

    MLE = "mle"
    ABSOLUTE_DISCOUNT = "absolute_discount"


@dataclass
class NGramCounts:
    """Exact n-gram counts for orders 1..order; tables[n-1] holds the n-grams."""

    order: int
    vocab: Vocabulary
    tables: list[Counter[NGram]]

    @property
    def is_empty(self) -> bool:
        return all(not table for table in self.tables)


def count_ngrams(corpus: Corpus, vocab: Vocabulary, order: int) -> NGramCounts:
    """Count n-grams with sentence boundaries, mapping OOV tokens to the unknown id."""
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")

    tables: list[Counter[NGram]] = [Counter() for _ in range(order)]
    for line in corpus.lines:
        ids = (BOS_ID, *(vocab.lookup(token) for token in line), EOS_ID)
        for n in range(1, order + 1):
            for i in range(len(ids) - n + 1):
                gram = ids[i : i + n]
                if n == 1 and gram[0] == BOS_ID:
                    continue
                tables[n - 1][gram] += 1
    return NGramCounts(order=order, vocab=vocab, tables=tables)


def _log10(p: float) -> float:
    return math.log10(p) if p > 0 else -math.inf


@dataclass(frozen=True, eq=False)
class NGramModel(LanguageModel):
    """Back-off n-gram LM with log10 probabilities (ARPA semantics)."""

    order: int
    vocab: Vocabulary
    probs: tuple[dict[NGram, float], ...]
    backoffs: dict[NGram, float]

    def initial_state(self) -> LmState:
        return (BOS_ID,) if self.order > 1 else ()

    def next_state(self, state: LmState, token_id: int) -> LmState:
        if self.order == 1:
            return ()
        return (*state, token_id)[-(self.order - 1) :]

    def score(self, context: NGram, token_id: int) -> float:
        """Back-off recursion for `token_id` after `context`."""
        context = context[-(self.order - 1) :] if self.order > 1 else ()
        total = 0.0
        while True:
            gram = (*context, token_id)
            stored = self.probs[len(gram) - 1].get(gram)
            if stored is not None:
                return total + stored
            if not context:
                return -math.inf
            total += self.backoffs.get(context, 0.0)
            context = context[1:]

    def logprob(self, state: LmState, token_id: int) -> tuple[float, LmState]:
        return self.score(state, token_id), self.next_state(state, token_id)

    @property
    def predictable_ids(self) -> list[int]:
        """Every vocabulary id except sentence-begin."""
        return [i for i in range(len(self.vocab)) if i != BOS_ID]

    @classmethod
    def uniform(cls, vocab: Vocabulary) -> "NGramModel":
        """Unigram assigning equal probability to every predictable symbol."""
        predictable = [i for i in range(len(vocab)) if i != BOS_ID]
        logp = math.log10(1.0 / len(predictable))
        table: dict[NGram, float] = {(i,): logp for i in predictable}
        table[(BOS_ID,)] = BOS_LOGPROB
        return cls(order=1, vocab=vocab, probs=(table,), backoffs={})


def lm_logprob(model: LanguageModel, state: LmState, token: int | str) -> tuple[float, LmState]:
    """Score `token` in `state`; strings outside the vocabulary map to the unknown id."""
    token_id = model.vocab.lookup(token) if isinstance(token, str) else token
    return model.logprob(state, token_id)


def estimate_ngram(
    counts: NGramCounts,
    smoothing: Smoothing | str = Smoothing.ABSOLUTE_DISCOUNT,
    discount: float = DEFAULT_DISCOUNT,
) -> NGramModel:
    """Estimate an n-gram model from counts.

    Absolute discounting is interpolated: every seen n-gram keeps its discounted
    relative frequency plus its share of the lower-order distribution, and the
    context's back-off weight is the discounted mass. MLE assigns zero mass to
    unseen events.

    Args:
        counts: Output of count_ngrams
        smoothing: Estimation method
        discount: d in (0, 1), absolute discounting only

    Returns:
        NGramModel normalized over all predictable symbols
    """
    smoothing = Smoothing(smoothing)
    if smoothing is Smoothing.ABSOLUTE_DISCOUNT and not 0.0 < discount < 1.0:
        raise ValueError(f"discount must lie in (0, 1), got {discount}")
    if not counts.tables[0]:
        raise EmptyCorpusError("n-gram counts")

    vocab = counts.vocab
    predictable = [i for i in range(len(vocab)) if i != BOS_ID]
    mle = smoothing is Smoothing.MLE

    unigrams = counts.tables[0]
    total = sum(unigrams.values())
    if mle:
        uni_probs = {w: unigrams.get((w,), 0) / total for w in predictable}
    else:
        seen = [w for w in predictable if unigrams.get((w,), 0) > 0]
        unseen = [w for w in predictable if unigrams.get((w,), 0) == 0]
        mass = discount * len(seen) / total
        receivers = unseen or predictable
        uni_probs = {w: max(unigrams.get((w,), 0) - discount, 0.0) / total for w in predictable}
        for w in receivers:
            uni_probs[w] += mass / len(receivers)

    probs: list[dict[NGram, float]] = [{(w,): _log10(p) for w, p in uni_probs.items()}]
    probs[0][(BOS_ID,)] = BOS_LOGPROB
    backoffs: dict[NGram, float] = {}

    for n in range(2, counts.order + 1):
        table = counts.tables[n - 1]
        totals: Counter[NGram] = Counter()
        types: Counter[NGram] = Counter()
        for gram, c in table.items():
            totals[gram[:-1]] += c
            types[gram[:-1]] += 1

        lower = NGramModel(order=n - 1, vocab=vocab, probs=tuple(probs), backoffs=backoffs)
        current: dict[NGram, float] = {}
        for gram, c in sorted(table.items()):
            context = gram[:-1]
            if mle:
                current[gram] = _log10(c / totals[context])
            else:
                gamma = discount * types[context] / totals[context]
                lower_p = 10.0 ** lower.score(context[1:], gram[-1])
                current[gram] = _log10((c - discount) / totals[context] + gamma * lower_p)

        for context in totals:
            if mle:
                backoffs[context] = -math.inf
            else:
                backoffs[context] = _log10(discount * types[context] / totals[context])
        probs.append(current)

    model = NGramModel(order=counts.order, vocab=vocab, probs=tuple(probs), backoffs=backoffs)
    logger.debug(
        f"Estimated {smoothing.value} {counts.order}-gram over {len(vocab)} symbols "
        f"({sum(len(p) for p in probs)} entries)"
    )
    return model


def train_ngram(
    corpus: Corpus,
    vocab: Vocabulary,
    order: int,
    smoothing: Smoothing | str = Smoothing.ABSOLUTE_DISCOUNT,
    discount: float = DEFAULT_DISCOUNT,
) -> NGramModel:
    """count_ngrams followed by estimate_ngram."""
    return estimate_ngram(count_ngrams(corpus, vocab, order), smoothing, discount)


@dataclass
class PerplexityResult:
    """Perplexity with its token statistics."""

    perplexity: float
    logprob: float  # log10 total
    num_tokens: int  # running tokens plus one sentence end per line
    num_oov: int
    num_sentences: int


def evaluate_perplexity(model: LanguageModel, corpus: Corpus) -> PerplexityResult:
    """Score a corpus sentence by sentence; OOV tokens are scored as unknown."""
    if len(corpus) == 0:
        raise EmptyCorpusError(corpus.name)

    vocab = model.vocab
    total = 0.0
    num_tokens = 0
    num_oov = 0
    for line in corpus.lines:
        state = model.initial_state()
        for token in (*line, SENTENCE_END):
            if token not in vocab or token == UNKNOWN:
                num_oov += 1
            logp, next_state = model.logprob(state, vocab.lookup(token))
            if logp == -math.inf:
                context = [vocab.word(i) for i in state]
                raise ZeroProbabilityError(token, context)
            total += logp
            num_tokens += 1
            state = next_state

    ppl = 10.0 ** (-total / num_tokens)
    return PerplexityResult(
        perplexity=ppl,
        logprob=total,
        num_tokens=num_tokens,
        num_oov=num_oov,
        num_sentences=len(corpus),
    )


def perplexity(model: LanguageModel, corpus: Corpus) -> float:
    return evaluate_perplexity(model, corpus).perplexity


def renormalize_subword_ppl(subword_ppl: float, token_count: int, word_count: int) -> float:
    """Convert a per-token perplexity into a per-word perplexity."""
    if word_count == 0:
        raise ValueError("word_count must be positive")
    if token_count <= 0 or word_count < 0 or subword_ppl <= 0:
        raise ValueError("perplexity and counts must be positive")
    return subword_ppl ** (token_count / word_count)
