"""Label-synchronous beam search for attention encoder-decoder models."""

import logging
import math

import numpy as np

from seqshift.acoustic import IlmModel, LabelScorer
from seqshift.errors import NoTerminatedHypothesisError, SeqshiftValidationError
from seqshift.lm import LanguageModel
from seqshift.models import DecodeConfig
from seqshift.search.beam import (
    Beam,
    DecodeResult,
    Hypothesis,
    LmScorer,
    check_subword_vocab,
    label_order,
    merge_context,
    truncate,
)
from seqshift.text.bpe import END_OF_WORD, join_subwords

logger = logging.getLogger(__name__)


def max_label_steps(cfg: DecodeConfig, expected_length: int) -> int:
    """Step limit including the end step."""
    if cfg.max_label_steps is not None:
        return cfg.max_label_steps
    return 2 + math.ceil(1.5 * expected_length)


def length_normalized(score: float, num_labels: int, length_norm: float) -> float:
    """Final comparison score: score - delta * ln(M) for M output labels."""
    if length_norm == 0:
        return score
    return score - length_norm * math.log(num_labels)


def decode_label_sync(
    scorer: LabelScorer,
    ilm: IlmModel | None,
    lm: LanguageModel,
    cfg: DecodeConfig,
) -> DecodeResult:
    """Decode one utterance label by label.

    Each step adds ln P_AM - alpha ln P_ILM + lambda ln P_LM for the next label. A
    hypothesis closes on the end symbol, which may only follow a word-final subword;
    closed hypotheses compete on their length-normalized score.

    Raises:
        LmGranularityError: the LM predicts tokens that are not output labels
        NoTerminatedHypothesisError: nothing closed within the step limit
    """
    end = scorer.end
    outputs = [label for label in scorer.labels if label != end]
    check_subword_vocab(lm, outputs)
    alpha = cfg.prior_scale
    if alpha != 0 and ilm is None:
        raise SeqshiftValidationError("ILM scale > 0 needs an ILM")
    lm_scorer = LmScorer(lm, cfg.lm_scale)
    ilm_size = ilm.context_size if ilm is not None and alpha != 0 else 0
    key_size = merge_context(scorer.context_size, ilm_size)
    ilm_memo: dict[tuple[str, ...], np.ndarray] = {}
    steps = max_label_steps(cfg, scorer.expected_length)
    order = label_order(scorer.labels)

    state = lm_scorer.initial_state()
    active = [
        Hypothesis(score=0.0, labels=(), words=(), lm_state=state, key=((), state), position=0)
    ]
    closed: list[tuple[float, Hypothesis]] = []
    for m in range(steps):
        beam = Beam(order)
        for hyp in active:
            step = scorer.step(hyp.labels)
            log_probs = step.log_probs
            if alpha != 0 and ilm is not None:
                visible = truncate(hyp.labels, ilm_size)
                ilm_scores = ilm_memo.get(visible)
                if ilm_scores is None:
                    ilm_scores = ilm.log_distribution(step.labels, visible)
                    ilm_memo[visible] = ilm_scores
                log_probs = log_probs - alpha * ilm_scores

            closable = bool(hyp.labels) and hyp.labels[-1].endswith(END_OF_WORD)
            for i, label in enumerate(step.labels):
                if label == end and not closable:
                    continue
                lm_score, lm_state = lm_scorer.score(hyp.lm_state, label)
                score = hyp.score + float(log_probs[i]) + lm_score
                if label == end:
                    final = Hypothesis(
                        score=score,
                        labels=hyp.labels,
                        words=tuple(join_subwords(hyp.labels)),
                        lm_state=lm_state,
                        key=hyp.key,
                        position=m + 1,
                        parent=hyp,
                    )
                    normalized = length_normalized(score, len(hyp.labels), cfg.length_norm)
                    closed.append((normalized, final))
                    continue
                labels = (*hyp.labels, label)
                beam.add(
                    Hypothesis(
                        score=score,
                        labels=labels,
                        words=hyp.words,
                        lm_state=lm_state,
                        key=(truncate(labels, key_size), lm_state),
                        position=m + 1,
                        parent=hyp,
                    )
                )
        active = beam.pruned(cfg)
        logger.debug(f"step {m}: {len(active)} open, {len(closed)} closed hypotheses")
        if not active:
            break

    if not closed:
        raise NoTerminatedHypothesisError(steps)
    normalized, best = min(closed, key=lambda item: (-item[0], *item[1].sort_key(order)[1:]))
    return DecodeResult(
        words=best.words, score=best.score, labels=best.labels, normalized_score=normalized
    )
