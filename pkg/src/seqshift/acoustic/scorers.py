"""Frame- and step-level scorers used by the decoders.

Table-driven scorers stand in for trained networks: a transducer scorer yields
p(y | history, t) per frame, a label scorer yields p(a_m | a_1..a_{m-1}) per step.
Either may carry an internal label-LM bias, which is what ILM subtraction removes.
"""

import logging
from abc import ABC, abstractmethod
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from seqshift.acoustic.ilm import IlmModel
from seqshift.acoustic.posteriorgram import BLANK, Posteriorgram, log_softmax
from seqshift.acoustic.prior import ContextPrior
from seqshift.errors import UnknownLabelError
from seqshift.text.corpus import SENTENCE_END

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class StepPosterior:
    """Normalized natural-log distribution over a label set for one frame or step."""

    labels: tuple[str, ...]
    log_probs: np.ndarray
    index: dict[str, int]

    def log_prob(self, label: str) -> float:
        try:
            return float(self.log_probs[self.index[label]])
        except KeyError:
            raise UnknownLabelError(label) from None


def ctc_score(pg: Posteriorgram, prior: ContextPrior, t: int, label: str, alpha: float) -> float:
    """ln p(label|t) minus alpha times the ln monophone prior (blank included)."""
    score = pg.log_prob(t, label)
    if alpha == 0:
        return score
    return score - alpha * prior.log_prob((label,))


def transducer_score(
    step: StepPosterior,
    ilm: IlmModel | None,
    label: str,
    history: Sequence[str],
    alpha: float,
    blank: str = BLANK,
) -> float:
    """ln p(label|history,t) minus alpha times ln P_ILM(label|history).

    Blank is never divided by the ILM.

    Raises:
        UnknownLabelError: `label` or a history symbol is outside the step's label set
    """
    score = step.log_prob(label)
    for symbol in history:
        if symbol not in step.index:
            raise UnknownLabelError(symbol)
    if label == blank or alpha == 0 or ilm is None:
        return score
    return score - alpha * ilm.logprob(label, history)


class TransducerScorer(ABC):
    """Per-frame label posteriors conditioned on the emitted label history."""

    labels: tuple[str, ...]
    blank: str = BLANK

    @property
    @abstractmethod
    def num_frames(self) -> int:
        """Frames of the utterance."""

    @property
    def context_size(self) -> int | None:
        """History labels the posteriors depend on; None means the full history."""
        return 0

    @abstractmethod
    def step(self, t: int, history: Sequence[str]) -> StepPosterior:
        """Posterior over labels (blank included) at frame `t`."""


class LabelScorer(ABC):
    """Label-synchronous posteriors with an end-of-sequence symbol."""

    labels: tuple[str, ...]
    end: str = SENTENCE_END

    @property
    @abstractmethod
    def expected_length(self) -> int:
        """Expected number of labels before the end symbol."""

    @property
    def context_size(self) -> int | None:
        return None

    @abstractmethod
    def step(self, history: Sequence[str]) -> StepPosterior:
        """Posterior over labels (end included) after `history`."""


class _InternalBias:
    """Weighted internal-LM log-probabilities per label, memoized by visible history.

    The memo only grows with histories of one utterance; scorers are built per utterance.
    """

    def __init__(
        self,
        labels: tuple[str, ...],
        internal_lm: IlmModel | None,
        weight: float,
        exempt: str | None,
    ):
        self.labels = labels
        self.internal_lm = internal_lm
        self.weight = weight
        self.exempt = exempt
        self._memo: dict[tuple[str, ...], np.ndarray] = {}

    @property
    def active(self) -> bool:
        return self.internal_lm is not None and self.weight != 0

    @property
    def context_size(self) -> int | None:
        if self.internal_lm is None or self.weight == 0:
            return 0
        return self.internal_lm.context_size

    def apply(self, logits: np.ndarray, history: Sequence[str]) -> np.ndarray:
        if self.internal_lm is None or not self.active:
            return logits
        size = self.context_size
        visible = tuple(history) if size is None else tuple(history[-size:] if size else ())
        bias = self._memo.get(visible)
        if bias is None:
            bias = np.array(
                [
                    0.0 if label == self.exempt else self.internal_lm.logprob(label, visible)
                    for label in self.labels
                ]
            )
            self._memo[visible] = bias
        return log_softmax(logits + self.weight * bias)


class PosteriorTransducerScorer(TransducerScorer):
    """Transducer scorer read from a blank-augmented posteriorgram.

    With an internal LM the frame posterior becomes
    softmax(ln p(y|t) + weight * ln P_int(y|history)) over non-blank labels.
    """

    def __init__(
        self,
        pg: Posteriorgram,
        internal_lm: IlmModel | None = None,
        weight: float = 0.0,
        blank: str = BLANK,
    ):
        if blank not in pg:
            raise UnknownLabelError(blank)
        self.pg = pg
        self.labels = pg.labels
        self.blank = blank
        self._bias = _InternalBias(self.labels, internal_lm, weight, exempt=blank)
        self._index = {label: i for i, label in enumerate(self.labels)}

    @property
    def num_frames(self) -> int:
        return self.pg.num_frames

    @property
    def context_size(self) -> int | None:
        return self._bias.context_size

    def step(self, t: int, history: Sequence[str]) -> StepPosterior:
        log_probs = self._bias.apply(self.pg.log_probs[t], history)
        return StepPosterior(labels=self.labels, log_probs=log_probs, index=self._index)


class PositionLabelScorer(LabelScorer):
    """Label scorer whose step m reads row min(m, rows-1) of a position table.

    The table has one row per output position, the last one expecting the end symbol.
    """

    def __init__(
        self,
        table: Posteriorgram,
        internal_lm: IlmModel | None = None,
        weight: float = 0.0,
        end: str = SENTENCE_END,
    ):
        if end not in table:
            raise UnknownLabelError(end)
        self.table = table
        self.labels = table.labels
        self.end = end
        self._bias = _InternalBias(self.labels, internal_lm, weight, exempt=None)
        self._index = {label: i for i, label in enumerate(self.labels)}

    @property
    def expected_length(self) -> int:
        return max(self.table.num_frames - 1, 1)

    @property
    def context_size(self) -> int | None:
        return self._bias.context_size

    def step(self, history: Sequence[str]) -> StepPosterior:
        row = self.table.log_probs[min(len(history), self.table.num_frames - 1)]
        log_probs = self._bias.apply(row, history)
        return StepPosterior(labels=self.labels, log_probs=log_probs, index=self._index)
