"""Time-synchronous beam search for monotonic transducers.

Every frame emits either blank or exactly one label. In closed-vocabulary mode
labels walk the lexical prefix tree and the word LM is applied when a word is
completed; in open-vocabulary mode any subword may follow and a subword LM scores
every emitted token.
"""

import logging
import math

import numpy as np

from seqshift.acoustic import IlmModel, StepPosterior, TransducerScorer
from seqshift.errors import NoHypothesisError, SeqshiftValidationError, UnknownLabelError
from seqshift.lexicon import ROOT, PrefixTree
from seqshift.lm import LanguageModel
from seqshift.models import DecodeConfig, VocabMode
from seqshift.search.beam import (
    Beam,
    DecodeResult,
    Hypothesis,
    LmScorer,
    best_of,
    check_subword_vocab,
    check_word_vocab,
    merge_context,
    truncate,
)
from seqshift.text.bpe import END_OF_WORD, BpeModel, join_subwords
from seqshift.text.corpus import SENTENCE_END

logger = logging.getLogger(__name__)


class _TransducerSearch:
    def __init__(
        self,
        scorer: TransducerScorer,
        ilm: IlmModel | None,
        lm: LanguageModel,
        units: PrefixTree | BpeModel,
        cfg: DecodeConfig,
    ):
        self.scorer = scorer
        self.cfg = cfg
        self.alpha = cfg.prior_scale
        self.lm = LmScorer(lm, cfg.lm_scale)
        self.index = {label: i for i, label in enumerate(scorer.labels)}
        if scorer.blank not in self.index:
            raise UnknownLabelError(scorer.blank)
        self.blank = self.index[scorer.blank]

        if self.alpha != 0 and ilm is None:
            raise SeqshiftValidationError("ILM scale > 0 needs an ILM")
        self.ilm = ilm if self.alpha != 0 else None
        self.ilm_memo: dict[tuple[str, ...], np.ndarray] = {}
        ilm_size = self.ilm.context_size if self.ilm is not None else 0
        self.ilm_size = ilm_size
        self.key_size = merge_context(scorer.context_size, ilm_size)

        self.closed = cfg.vocab_mode is VocabMode.CLOSED
        if self.closed:
            if not isinstance(units, PrefixTree):
                raise SeqshiftValidationError("closed-vocabulary decoding needs a prefix tree")
            check_word_vocab(units.lexicon.words, lm)
            for node in units.nodes[1:]:
                if node.label not in self.index:
                    raise UnknownLabelError(str(node.label))
            self.tree = units
            self.pron_penalty = [
                -math.log(len(units.lexicon.pronunciations(w))) for w in units.lexicon.words
            ]
        else:
            if not isinstance(units, BpeModel):
                raise SeqshiftValidationError("open-vocabulary decoding needs a BPE model")
            check_subword_vocab(lm, units.vocab)
            self.outputs = [(label, i) for label, i in self.index.items() if i != self.blank]

    def _ilm_scores(self, labels: tuple[str, ...]) -> np.ndarray | None:
        if self.ilm is None:
            return None
        visible = truncate(labels, self.ilm_size)
        scores = self.ilm_memo.get(visible)
        if scores is None:
            scores = np.zeros(len(self.index))
            for label, i in self.index.items():
                if i != self.blank:
                    scores[i] = self.ilm.logprob(label, visible)
            self.ilm_memo[visible] = scores
        return scores

    def _combined(self, step: StepPosterior, labels: tuple[str, ...]) -> np.ndarray:
        """transducer_score for every label at once; blank keeps its posterior."""
        ilm_scores = self._ilm_scores(labels)
        if ilm_scores is None:
            return step.log_probs
        return step.log_probs - self.alpha * ilm_scores

    def _key(self, position, labels: tuple[str, ...], lm_state: tuple):
        return (position, truncate(labels, self.key_size), lm_state)

    def _extend(
        self,
        beam: Beam,
        hyp: Hypothesis,
        t: int,
        score: float,
        position,
        labels: tuple[str, ...],
        words: tuple[str, ...],
        lm_state: tuple,
    ) -> None:
        beam.add(
            Hypothesis(
                score=score,
                labels=labels,
                words=words,
                lm_state=lm_state,
                key=self._key(position, labels, lm_state),
                position=t,
                parent=hyp,
            )
        )

    def expand(
        self, hyp: Hypothesis, t: int, beam: Beam, steps: dict[tuple[str, ...], np.ndarray]
    ) -> None:
        position = hyp.key[0]
        visible = truncate(hyp.labels, self.key_size)
        scores = steps.get(visible)
        if scores is None:
            scores = self._combined(self.scorer.step(t, hyp.labels), hyp.labels)
            steps[visible] = scores

        blank_score = hyp.score + float(scores[self.blank])
        self._extend(beam, hyp, t, blank_score, position, hyp.labels, hyp.words, hyp.lm_state)

        if self.closed:
            for label, child in self.tree.children(position).items():
                score = hyp.score + float(scores[self.index[label]])
                labels = (*hyp.labels, label)
                if self.tree.children(child):
                    self._extend(beam, hyp, t, score, child, labels, hyp.words, hyp.lm_state)
                for word_id in self.tree.word_ids(child):
                    word = self.tree.lexicon.words[word_id]
                    lm_score, state = self.lm.score(hyp.lm_state, word)
                    total = score + lm_score + self.pron_penalty[word_id]
                    self._extend(beam, hyp, t, total, ROOT, labels, (*hyp.words, word), state)
        else:
            for label, i in self.outputs:
                lm_score, state = self.lm.score(hyp.lm_state, label)
                score = hyp.score + float(scores[i]) + lm_score
                boundary = label.endswith(END_OF_WORD)
                labels = (*hyp.labels, label)
                self._extend(beam, hyp, t, score, boundary, labels, hyp.words, state)

    def final(self, hyp: Hypothesis) -> Hypothesis | None:
        if self.closed:
            if hyp.key[0] != ROOT or not hyp.words:
                return None
            words = hyp.words
        else:
            # the last subword must close a word
            if not hyp.labels or hyp.key[0] is not True:
                return None
            words = tuple(join_subwords(hyp.labels))
        end_score, _ = self.lm.score(hyp.lm_state, SENTENCE_END)
        return Hypothesis(
            score=hyp.score + end_score,
            labels=hyp.labels,
            words=words,
            lm_state=hyp.lm_state,
            key=hyp.key,
            position=hyp.position,
            parent=hyp,
        )

    def run(self) -> DecodeResult:
        start_position = ROOT if self.closed else True
        state = self.lm.initial_state()
        active = [
            Hypothesis(
                score=0.0,
                labels=(),
                words=(),
                lm_state=state,
                key=self._key(start_position, (), state),
                position=-1,
            )
        ]
        for t in range(self.scorer.num_frames):
            beam = Beam(self.index)
            steps: dict[tuple[str, ...], np.ndarray] = {}
            for hyp in active:
                self.expand(hyp, t, beam, steps)
            active = beam.pruned(self.cfg)
            logger.debug(f"frame {t}: {len(beam)} hypotheses, {len(active)} kept")

        finals = [final for hyp in active if (final := self.final(hyp)) is not None]
        best = best_of(finals, self.index)
        if best is None:
            raise NoHypothesisError(self.scorer.num_frames)
        return DecodeResult(words=best.words, score=best.score, labels=best.labels)


def decode_transducer(
    scorer: TransducerScorer,
    ilm: IlmModel | None,
    lm: LanguageModel,
    units: PrefixTree | BpeModel,
    cfg: DecodeConfig,
) -> DecodeResult:
    """Decode one utterance with a monotonic transducer.

    Args:
        scorer: Frame posteriors over blank and output labels
        ilm: Internal LM estimate; only read when prior_scale > 0
        lm: Word LM (closed) or subword LM (open)
        units: Prefix tree over the output labels (closed) or the BPE model (open)
        cfg: Score exponents, pruning and vocabulary mode

    Raises:
        LmGranularityError: open mode with an LM whose tokens are not subwords
        NoHypothesisError: nothing ends at a word boundary
    """
    return _TransducerSearch(scorer, ilm, lm, units, cfg).run()
