"""Time-synchronous prefix-tree Viterbi beam search for factored hybrid and CTC models.

Hypotheses advance one frame at a time through the lexical prefix tree. The LM is
applied when a word is left, either into the next word or at the utterance end,
together with the uniform pronunciation-variant probability.
"""

import logging
import math
from collections.abc import Iterator

import numpy as np

from seqshift.acoustic import BLANK, ContextPrior, FactoredScores, Posteriorgram
from seqshift.errors import NoHypothesisError, SeqshiftValidationError
from seqshift.lexicon import ROOT, SILENCE, PrefixTree
from seqshift.lm import LanguageModel
from seqshift.models import DecodeConfig, ModelKind, VocabMode
from seqshift.search.beam import (
    Beam,
    DecodeResult,
    Hypothesis,
    LabelOrder,
    LmScorer,
    best_of,
    check_word_vocab,
    label_order,
)
from seqshift.text.corpus import SENTENCE_END
from seqshift.topology import TransitionModel

logger = logging.getLogger(__name__)

SILENCE_NODE = -1
NO_CONTEXT = -1


class _TimeSyncSearch:
    """Frame loop shared by the FH and CTC searches."""

    def __init__(
        self, tree: PrefixTree, lm: LmScorer, cfg: DecodeConfig, num_frames: int, order: LabelOrder
    ):
        self.tree = tree
        self.lm = lm
        self.cfg = cfg
        self.num_frames = num_frames
        self.order = order
        self.words = tree.lexicon.words
        self.pron_penalty = [
            -math.log(len(tree.lexicon.pronunciations(word))) for word in self.words
        ]

    def commit(self, hyp: Hypothesis, word_id: int) -> tuple[float, tuple[str, ...], tuple]:
        """Leave the word `word_id`: LM score, pronunciation penalty, new history."""
        word = self.words[word_id]
        lm_score, state = self.lm.score(hyp.lm_state, word)
        return lm_score + self.pron_penalty[word_id], (*hyp.words, word), state

    def close(self, score: float, words: tuple[str, ...], state: tuple) -> tuple[float, tuple]:
        end_score, _ = self.lm.score(state, SENTENCE_END)
        return score + end_score, words

    def initial(self, beam: Beam) -> None:
        raise NotImplementedError

    def expand(self, hyp: Hypothesis, t: int, beam: Beam) -> None:
        raise NotImplementedError

    def finals(self, hyp: Hypothesis) -> Iterator[Hypothesis]:
        raise NotImplementedError

    def run(self) -> DecodeResult:
        beam = Beam(self.order)
        self.initial(beam)
        active = beam.pruned(self.cfg)
        for t in range(1, self.num_frames):
            beam = Beam(self.order)
            for hyp in active:
                self.expand(hyp, t, beam)
            active = beam.pruned(self.cfg)
            logger.debug(f"frame {t}: {len(beam)} hypotheses, {len(active)} kept")

        best = best_of((final for hyp in active for final in self.finals(hyp)), self.order)
        if best is None:
            raise NoHypothesisError(self.num_frames)
        return DecodeResult(words=best.words, score=best.score, labels=best.labels)


class _FactoredSearch(_TimeSyncSearch):
    """Single-state HMM per phoneme; the state carries left and right phoneme context.

    The right context is fixed when a state is entered and constrains where it may go.
    """

    def __init__(
        self,
        factors: FactoredScores,
        tree: PrefixTree,
        prior: ContextPrior | None,
        trans: TransitionModel,
        cfg: DecodeConfig,
        lm: LmScorer,
        triphone: bool,
        silence: bool,
    ):
        super().__init__(tree, lm, cfg, factors.num_frames, label_order(factors.labels))
        if triphone and not factors.is_triphone:
            raise SeqshiftValidationError("triphone decoding needs a right-context factor")
        self.triphone = triphone
        self.silence = silence
        self.boundary = factors.index(SILENCE)
        self.node_ids = [
            self.boundary if node.label is None else factors.index(node.label)
            for node in tree.nodes
        ]
        self.root_ids = {child: self.node_ids[child] for child in tree.root_children.values()}

        chain = factors.left[:, :, None] + factors.center
        if triphone:
            chain = chain[..., None] + factors.right
        if cfg.prior_scale != 0:
            if prior is None:
                raise SeqshiftValidationError("prior scale > 0 needs a context prior")
            order = 3 if triphone else 2
            if prior.order != order:
                raise SeqshiftValidationError(f"{order}-label context prior required")
            idx = [prior.index(label) for label in factors.labels]
            table = prior.log_probs[np.ix_(*([idx] * order))]
            chain = chain - cfg.prior_scale * table[None]
        self.scores = chain

        scale = trans.scale
        self.loop_weight = scale * trans.loop if scale else 0.0
        self.forward_weight = scale * trans.forward if scale else 0.0

    def _label(self, node: int) -> int:
        return self.boundary if node == SILENCE_NODE else self.node_ids[node]

    def _emission(self, t: int, left: int, center: int, right: int) -> float:
        if self.triphone:
            return float(self.scores[t, left, center, right])
        return float(self.scores[t, left, center])

    def _rights(self, node: int) -> set[int]:
        if not self.triphone:
            return {NO_CONTEXT}
        if node == SILENCE_NODE:
            return {*self.root_ids.values(), self.boundary}
        rights = {self.node_ids[child] for child in self.tree.children(node).values()}
        if self.tree.word_ids(node):
            rights.update(self.root_ids.values())
            rights.add(self.boundary)
        return rights

    def _enter(
        self,
        beam: Beam,
        parent: Hypothesis | None,
        t: int,
        node: int,
        left: int,
        score: float,
        words: tuple[str, ...],
        lm_state: tuple,
    ) -> None:
        center = self._label(node)
        unit = SILENCE if node == SILENCE_NODE else self.tree.label(node)
        labels = (*parent.labels, unit) if parent else (unit,)
        for right in sorted(self._rights(node)):
            beam.add(
                Hypothesis(
                    score=score + self._emission(t, left, center, right),
                    labels=labels,
                    words=words,
                    lm_state=lm_state,
                    key=(node, left, right, lm_state),
                    position=t,
                    parent=parent,
                )
            )

    def _allows(self, right: int, target: int) -> bool:
        return not self.triphone or right == target

    def initial(self, beam: Beam) -> None:
        state = self.lm.initial_state()
        for child in self.tree.root_children.values():
            self._enter(beam, None, 0, child, self.boundary, 0.0, (), state)
        if self.silence:
            self._enter(beam, None, 0, SILENCE_NODE, self.boundary, 0.0, (), state)

    def expand(self, hyp: Hypothesis, t: int, beam: Beam) -> None:
        node, left, right, lm_state = hyp.key
        center = self._label(node)
        beam.add(
            Hypothesis(
                score=hyp.score + self.loop_weight + self._emission(t, left, center, right),
                labels=hyp.labels,
                words=hyp.words,
                lm_state=lm_state,
                key=hyp.key,
                position=t,
                parent=hyp,
            )
        )
        forward = hyp.score + self.forward_weight

        if node == SILENCE_NODE:
            for child, label_id in self.root_ids.items():
                if self._allows(right, label_id):
                    self._enter(beam, hyp, t, child, center, forward, hyp.words, lm_state)
            return

        for child in self.tree.children(node).values():
            if self._allows(right, self.node_ids[child]):
                self._enter(beam, hyp, t, child, center, forward, hyp.words, lm_state)

        for word_id in self.tree.word_ids(node):
            added, words, state = self.commit(hyp, word_id)
            for child, label_id in self.root_ids.items():
                if self._allows(right, label_id):
                    self._enter(beam, hyp, t, child, center, forward + added, words, state)
            if self.silence and self._allows(right, self.boundary):
                self._enter(beam, hyp, t, SILENCE_NODE, center, forward + added, words, state)

    def finals(self, hyp: Hypothesis) -> Iterator[Hypothesis]:
        node, _, right, lm_state = hyp.key
        if not self._allows(right, self.boundary):
            return
        exit_score = hyp.score + self.forward_weight
        if node == SILENCE_NODE:
            if hyp.words:
                score, words = self.close(exit_score, hyp.words, lm_state)
                yield Hypothesis(score, hyp.labels, words, lm_state, hyp.key, hyp.position, hyp)
            return
        for word_id in self.tree.word_ids(node):
            added, words, state = self.commit(hyp, word_id)
            score, words = self.close(exit_score + added, words, state)
            yield Hypothesis(score, hyp.labels, words, state, hyp.key, hyp.position, hyp)


class _CtcSearch(_TimeSyncSearch):
    """Blank-augmented prefix-tree search; a repeated label needs a blank in between."""

    def __init__(
        self,
        pg: Posteriorgram,
        tree: PrefixTree,
        prior: ContextPrior | None,
        cfg: DecodeConfig,
        lm: LmScorer,
        blank: str,
    ):
        super().__init__(tree, lm, cfg, pg.num_frames, label_order(pg.labels))
        scores = pg.log_probs
        if cfg.prior_scale != 0:
            if prior is None:
                raise SeqshiftValidationError("prior scale > 0 needs a label prior")
            if prior.order != 1:
                raise SeqshiftValidationError("CTC decoding needs a monophone prior")
            idx = [prior.index(label) for label in pg.labels]
            scores = scores - cfg.prior_scale * prior.log_probs[idx][None, :]
        self.scores = scores
        self.blank = pg.index(blank)
        self.node_ids = [
            self.blank if node.label is None else pg.index(node.label) for node in tree.nodes
        ]

    def _add(
        self,
        beam: Beam,
        parent: Hypothesis | None,
        t: int,
        node: int,
        in_blank: bool,
        score: float,
        words: tuple[str, ...],
        lm_state: tuple,
        labels: tuple[str, ...],
    ) -> None:
        column = self.blank if in_blank else self.node_ids[node]
        beam.add(
            Hypothesis(
                score=score + float(self.scores[t, column]),
                labels=labels,
                words=words,
                lm_state=lm_state,
                key=(node, in_blank, lm_state),
                position=t,
                parent=parent,
            )
        )

    def initial(self, beam: Beam) -> None:
        state = self.lm.initial_state()
        self._add(beam, None, 0, ROOT, True, 0.0, (), state, ())
        for label, child in self.tree.root_children.items():
            self._add(beam, None, 0, child, False, 0.0, (), state, (label,))

    def expand(self, hyp: Hypothesis, t: int, beam: Beam) -> None:
        node, in_blank, lm_state = hyp.key
        self._add(beam, hyp, t, node, in_blank, hyp.score, hyp.words, lm_state, hyp.labels)
        if not in_blank:
            self._add(beam, hyp, t, node, True, hyp.score, hyp.words, lm_state, hyp.labels)

        current = None if in_blank or node == ROOT else self.tree.label(node)
        for label, child in self.tree.children(node).items():
            if label != current:
                labels = (*hyp.labels, label)
                self._add(beam, hyp, t, child, False, hyp.score, hyp.words, lm_state, labels)

        for word_id in self.tree.word_ids(node):
            added, words, state = self.commit(hyp, word_id)
            for label, child in self.tree.root_children.items():
                if label != current:
                    labels = (*hyp.labels, label)
                    self._add(beam, hyp, t, child, False, hyp.score + added, words, state, labels)

    def finals(self, hyp: Hypothesis) -> Iterator[Hypothesis]:
        node, _, _ = hyp.key
        for word_id in self.tree.word_ids(node):
            added, words, state = self.commit(hyp, word_id)
            score, words = self.close(hyp.score + added, words, state)
            yield Hypothesis(score, hyp.labels, words, state, hyp.key, hyp.position, hyp)


def decode_time_sync(
    acoustics: Posteriorgram | FactoredScores,
    tree: PrefixTree,
    lm: LanguageModel,
    prior: ContextPrior | None,
    trans: TransitionModel,
    cfg: DecodeConfig,
    model_kind: ModelKind | str,
    *,
    silence: bool = False,
    blank: str = BLANK,
) -> DecodeResult:
    """Closed-vocabulary Viterbi decoding of one utterance.

    Args:
        acoustics: FactoredScores for fh_tri/fh_di, a blank-augmented Posteriorgram for ctc
        tree: Prefix tree of the decoding lexicon
        lm: Word-level LM covering the lexicon
        prior: Context prior (order 3, 2 or 1 by model kind); only read when prior_scale > 0
        trans: HMM transitions; the transition scale of `cfg` overrides its exponent
        cfg: Score exponents and pruning
        model_kind: fh_tri, fh_di or ctc
        silence: Let FH hypotheses pass through optional silence between words

    Raises:
        NoHypothesisError: no hypothesis ends at a word boundary on the last frame
    """
    kind = ModelKind(model_kind)
    if cfg.vocab_mode is not VocabMode.CLOSED:
        raise SeqshiftValidationError("time-synchronous decoding is closed-vocabulary only")
    check_word_vocab(tree.lexicon.words, lm)
    lm_scorer = LmScorer(lm, cfg.lm_scale)
    trans = TransitionModel(loop=trans.loop, forward=trans.forward, scale=cfg.transition_scale)

    search: _TimeSyncSearch
    if kind in (ModelKind.FH_TRI, ModelKind.FH_DI):
        if not isinstance(acoustics, FactoredScores):
            raise SeqshiftValidationError(f"{kind.value} decoding needs factored scores")
        search = _FactoredSearch(
            acoustics, tree, prior, trans, cfg, lm_scorer, kind is ModelKind.FH_TRI, silence
        )
    elif kind is ModelKind.CTC:
        if not isinstance(acoustics, Posteriorgram):
            raise SeqshiftValidationError("ctc decoding needs a posteriorgram")
        search = _CtcSearch(acoustics, tree, prior, cfg, lm_scorer, blank)
    else:
        raise SeqshiftValidationError(f"{kind.value} is not a time-synchronous HMM/CTC model")
    return search.run()
