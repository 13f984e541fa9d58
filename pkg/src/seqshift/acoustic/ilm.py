"""Internal language model estimates over output labels."""

import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

import numpy as np

from seqshift.acoustic.prior import DEFAULT_FLOOR, floor_and_renormalize
from seqshift.errors import EmptyCorpusError, UnknownLabelError
from seqshift.lm import LN10, NGramModel, Smoothing, load_arpa, save_arpa, train_ngram
from seqshift.lm.ngram import DEFAULT_DISCOUNT
from seqshift.text.corpus import BOS_ID, SENTENCE_END, Corpus, Vocabulary

logger = logging.getLogger(__name__)

IlmOrder = Literal["0", "1", "inf"]

DEFAULT_ILM_NGRAM_ORDER = 3


@dataclass(frozen=True, eq=False)
class IlmModel:
    """Label-level LM with history bounded by `order`.

    order "0" ignores history, "1" conditions on the previous label only, "inf" uses the
    full n-gram context of the underlying model. Scores are natural logs.
    """

    order: IlmOrder
    lm: NGramModel
    floor: float = DEFAULT_FLOOR
    _unigram: dict[str, float] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.order not in ("0", "1", "inf"):
            raise ValueError(f"ILM order must be '0', '1' or 'inf', got {self.order!r}")
        if self.order == "1" and self.lm.order < 2:
            raise ValueError("a first-order ILM needs a bigram model")
        table: dict[str, float] = {}
        if self.order == "0":
            labels = self.labels
            probs = np.array([10.0 ** self.lm.score((), self.lm.vocab.lookup(y)) for y in labels])
            probs = floor_and_renormalize(probs, self.floor)
            table = {y: float(math.log(p)) for y, p in zip(labels, probs, strict=True)}
        object.__setattr__(self, "_unigram", table)

    @property
    def labels(self) -> tuple[str, ...]:
        return self.lm.vocab.regular_words

    @property
    def context_size(self) -> int | None:
        """Number of history labels the ILM conditions on."""
        if self.order == "0":
            return 0
        if self.order == "1":
            return 1
        return self.lm.order - 1

    def _check(self, symbol: str) -> int:
        if symbol not in self.lm.vocab:
            raise UnknownLabelError(symbol)
        return self.lm.vocab.lookup(symbol)

    def logprob(self, label: str, history: Sequence[str]) -> float:
        """ln P_ILM(label | history truncated to the ILM order)."""
        if self.order == "0":
            if label == SENTENCE_END:
                return 0.0
            try:
                return self._unigram[label]
            except KeyError:
                raise UnknownLabelError(label) from None

        token = self._check(label)
        size = self.context_size or 0
        ids = [self._check(symbol) for symbol in (history[-size:] if size else ())]
        context = (BOS_ID, *ids)[-size:] if size else ()
        return self.lm.score(tuple(context), token) * LN10

    def log_distribution(self, labels: Sequence[str], history: Sequence[str]) -> np.ndarray:
        return np.array([self.logprob(label, history) for label in labels])

    def save(self, path: Path | str) -> None:
        save_arpa(self.lm, path)

    @classmethod
    def load(cls, path: Path | str, order: IlmOrder, floor: float = DEFAULT_FLOOR) -> "IlmModel":
        return cls(order=order, lm=load_arpa(path), floor=floor)


def estimate_ilm(
    transcripts: Iterable[Sequence[str]],
    order: IlmOrder,
    labels: Iterable[str] = (),
    ngram_order: int = DEFAULT_ILM_NGRAM_ORDER,
    smoothing: Smoothing | str | None = None,
    discount: float = DEFAULT_DISCOUNT,
    floor: float = DEFAULT_FLOOR,
) -> IlmModel:
    """Count-based ILM from output-label transcripts.

    Order "0" is the relative label frequency, order "1" a bigram and order "inf" an
    `ngram_order`-gram; the latter two use absolute discounting unless `smoothing` says
    otherwise. `labels` adds output labels that may be missing from the transcripts.

    Raises:
        EmptyCorpusError: no transcripts or only empty ones
    """
    corpus = Corpus(lines=tuple(tuple(t) for t in transcripts if t), name="ilm transcripts")
    if corpus.num_words == 0:
        raise EmptyCorpusError(corpus.name)

    vocab = Vocabulary.from_words(sorted({*labels, *(y for line in corpus.lines for y in line)}))
    if order == "0":
        lm = train_ngram(corpus, vocab, 1, Smoothing.MLE)
    else:
        n = 2 if order == "1" else ngram_order
        method = Smoothing(smoothing) if smoothing is not None else Smoothing.ABSOLUTE_DISCOUNT
        lm = train_ngram(corpus, vocab, n, method, discount)
    logger.debug(f"Estimated order-{order} ILM over {len(vocab.regular_words)} labels")
    return IlmModel(order=order, lm=lm, floor=floor)
