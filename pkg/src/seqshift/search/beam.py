"""Beam entries, results and pruning shared by the decoders."""

import logging
import math
from collections.abc import Hashable, Iterable, Mapping
from dataclasses import dataclass, field

from seqshift.errors import LexiconError, LmGranularityError
from seqshift.lm import LanguageModel, LmState
from seqshift.models import DecodeConfig

logger = logging.getLogger(__name__)

EMPTY_STATE: LmState = ()

LabelOrder = Mapping[str, int]


@dataclass(slots=True)
class Hypothesis:
    """One beam entry.

    `key` is the recombination key of the decoder that created the entry; entries
    with equal keys have identical futures and only the better one survives.
    """

    score: float
    labels: tuple[str, ...]
    words: tuple[str, ...]
    lm_state: LmState
    key: Hashable
    position: int = 0  # frame or label step
    parent: "Hypothesis | None" = field(default=None, repr=False)

    def sort_key(self, order: LabelOrder) -> tuple:
        """Best first: higher score, then label-id order, then shorter history."""
        ids = tuple(order[label] for label in self.labels)
        return (-self.score, ids, len(self.labels), self.words)

    def history(self) -> list["Hypothesis"]:
        """Backpointer chain from the first entry to this one."""
        chain: list[Hypothesis] = []
        node: Hypothesis | None = self
        while node is not None:
            chain.append(node)
            node = node.parent
        return chain[::-1]


@dataclass(frozen=True)
class DecodeResult:
    """Best hypothesis of a decoder run."""

    words: tuple[str, ...]
    score: float
    labels: tuple[str, ...] = ()
    normalized_score: float | None = None

    @property
    def text(self) -> str:
        return " ".join(self.words)


class Beam:
    """Recombining hypothesis container for one frame or step.

    `order` maps output labels to their ids for tie-breaking.
    """

    def __init__(self, order: LabelOrder) -> None:
        self.order = order
        self._entries: dict[Hashable, Hypothesis] = {}

    def add(self, hyp: Hypothesis) -> None:
        if math.isnan(hyp.score) or hyp.score == -math.inf:
            return
        current = self._entries.get(hyp.key)
        if current is None or hyp.sort_key(self.order) < current.sort_key(self.order):
            self._entries[hyp.key] = hyp

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries.values())

    def pruned(self, cfg: DecodeConfig) -> list[Hypothesis]:
        """Best `beam_size` entries, optionally cut at a score margin below the best."""
        ranked = sorted(self._entries.values(), key=lambda hyp: hyp.sort_key(self.order))
        ranked = ranked[: cfg.beam_size]
        if cfg.score_pruning is not None and ranked:
            threshold = ranked[0].score - cfg.score_pruning
            ranked = [hyp for hyp in ranked if hyp.score >= threshold]
        return ranked


def best_of(hyps: Iterable[Hypothesis], order: LabelOrder) -> Hypothesis | None:
    return min(hyps, key=lambda hyp: hyp.sort_key(order), default=None)


def label_order(labels: Iterable[str]) -> dict[str, int]:
    return {label: i for i, label in enumerate(labels)}


def truncate(history: tuple[str, ...], size: int | None) -> tuple[str, ...]:
    """Suffix of `history` a scorer with context `size` can see."""
    if size is None:
        return history
    return history[-size:] if size else ()


def merge_context(*sizes: int | None) -> int | None:
    """Largest of several context sizes; None is unbounded."""
    if any(size is None for size in sizes):
        return None
    return max((size for size in sizes if size is not None), default=0)


class LmScorer:
    """λ-scaled natural-log LM scores; λ=0 never touches the model."""

    def __init__(self, lm: LanguageModel, scale: float):
        self.lm = lm
        self.scale = scale

    @property
    def active(self) -> bool:
        return self.scale != 0

    def initial_state(self) -> LmState:
        return self.lm.initial_state() if self.active else EMPTY_STATE

    def score(self, state: LmState, token: str) -> tuple[float, LmState]:
        if not self.active:
            return 0.0, EMPTY_STATE
        logp, next_state = self.lm.ln_logprob(state, self.lm.vocab.lookup(token))
        return self.scale * logp, next_state


def check_word_vocab(words: Iterable[str], lm: LanguageModel) -> None:
    missing = [w for w in words if w not in lm.vocab]
    if missing:
        raise LexiconError(f"{len(missing)} lexicon words missing from the LM: {missing[:5]}")


def check_subword_vocab(lm: LanguageModel, units: Iterable[str]) -> None:
    """The LM must predict output units, not words."""
    unit_set = set(units)
    foreign = [w for w in lm.vocab.regular_words if w not in unit_set]
    if foreign:
        raise LmGranularityError(
            f"{len(foreign)} LM tokens are not output units, e.g. {foreign[:3]}"
        )
