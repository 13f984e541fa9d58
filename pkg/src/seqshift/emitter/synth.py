"""Temperature-controlled synthetic acoustics.

Each frame's logits are g * onehot(reference) + tau * noise with standard normal
noise drawn from a per-utterance generator seeded by (seed, utterance index).
"""

import logging
import math
from collections.abc import Sequence

import numpy as np

from seqshift.acoustic import BLANK, FactoredScores, Posteriorgram, log_softmax
from seqshift.errors import UnknownLabelError
from seqshift.lexicon import SILENCE
from seqshift.models import AcousticKind, EmitterConfig
from seqshift.text.corpus import SENTENCE_END

logger = logging.getLogger(__name__)


def utterance_rng(seed: int, utt_index: int) -> np.random.Generator:
    return np.random.default_rng([seed, utt_index])


def sample_durations(labels: Sequence[str], cfg: EmitterConfig) -> list[int]:
    """Frames per label: table lookup when configured, otherwise frames_per_label."""
    table = cfg.duration_table or {}
    return [table.get(label, cfg.frames_per_label) for label in labels]


def _frame_references(
    labels: Sequence[str], durations: Sequence[int], blank: str | None
) -> list[str]:
    frames: list[str] = []
    for label, duration in zip(labels, durations, strict=True):
        if blank is None:
            frames.extend([label] * duration)
        else:
            frames.extend([label] + [blank] * (duration - 1))
    return frames


def _gain(cfg: EmitterConfig, rng: np.random.Generator) -> float:
    if cfg.gain_jitter == 0:
        return cfg.gain
    return cfg.gain * math.exp(cfg.gain_jitter * rng.standard_normal())


def _onehot(references: Sequence[str], label_set: Sequence[str]) -> np.ndarray:
    index = {label: i for i, label in enumerate(label_set)}
    onehot = np.zeros((len(references), len(label_set)))
    for t, label in enumerate(references):
        if label not in index:
            raise UnknownLabelError(label)
        onehot[t, index[label]] = 1.0
    return onehot


def synth_posteriorgram(
    labels: Sequence[str],
    cfg: EmitterConfig,
    label_set: Sequence[str],
    *,
    blank: str | None = None,
    utt_index: int = 0,
) -> Posteriorgram:
    """Synthesize a posteriorgram for a reference label sequence.

    Without `blank` every frame of a label's duration references it; with `blank` the
    label takes the first frame and blank the rest, the peaky shape of CTC and
    transducer posteriors.
    """
    if not labels:
        raise ValueError("cannot synthesize an empty label sequence")
    rng = utterance_rng(cfg.seed, utt_index)
    gain = _gain(cfg, rng)
    references = _frame_references(labels, sample_durations(labels, cfg), blank)
    onehot = _onehot(references, label_set)
    noise = rng.standard_normal(onehot.shape)
    return Posteriorgram.from_logits(label_set, gain * onehot + cfg.tau * noise)


def synth_label_table(
    tokens: Sequence[str],
    cfg: EmitterConfig,
    label_set: Sequence[str],
    *,
    end: str = SENTENCE_END,
    utt_index: int = 0,
) -> Posteriorgram:
    """Position table for label-synchronous scoring: one row per token plus the end row."""
    if not tokens:
        raise ValueError("cannot synthesize an empty token sequence")
    rng = utterance_rng(cfg.seed, utt_index)
    gain = _gain(cfg, rng)
    onehot = _onehot([*tokens, end], label_set)
    noise = rng.standard_normal(onehot.shape)
    return Posteriorgram.from_logits(label_set, gain * onehot + cfg.tau * noise)


def frame_contexts(
    labels: Sequence[str], durations: Sequence[int], boundary: str = SILENCE
) -> list[tuple[str, str, str]]:
    """Reference (left, center, right) per frame."""
    contexts: list[tuple[str, str, str]] = []
    for k, (label, duration) in enumerate(zip(labels, durations, strict=True)):
        left = labels[k - 1] if k > 0 else boundary
        right = labels[k + 1] if k + 1 < len(labels) else boundary
        contexts.extend([(left, label, right)] * duration)
    return contexts


def synth_factored_scores(
    labels: Sequence[str],
    cfg: EmitterConfig,
    label_set: Sequence[str],
    *,
    triphone: bool = True,
    boundary: str = SILENCE,
    utt_index: int = 0,
) -> FactoredScores:
    """Factor tables sharing one noise draw per frame.

    The left factor peaks on the reference left context, the center factor on the
    reference phoneme for every conditioning left, and the right factor on the
    reference right context for every (left, center).
    """
    if not labels:
        raise ValueError("cannot synthesize an empty label sequence")
    rng = utterance_rng(cfg.seed, utt_index)
    gain = _gain(cfg, rng)
    contexts = frame_contexts(labels, sample_durations(labels, cfg), boundary)
    size = len(label_set)
    noise = cfg.tau * rng.standard_normal((len(contexts), size))

    def factor(position: int) -> np.ndarray:
        onehot = _onehot([context[position] for context in contexts], label_set)
        return log_softmax(gain * onehot + noise)

    left = factor(0)
    frames = len(contexts)
    center = np.broadcast_to(factor(1)[:, None, :], (frames, size, size))
    right = None
    if triphone:
        right = np.broadcast_to(factor(2)[:, None, None, :], (frames, size, size, size))
    return FactoredScores(labels=tuple(label_set), left=left, center=center, right=right)


def acoustic_labels(
    kind: AcousticKind | str, phonemes: Sequence[str], subwords: Sequence[str]
) -> tuple[str, ...]:
    """Label set of each acoustic kind."""
    kind = AcousticKind(kind)
    if kind is AcousticKind.FACTORED:
        return tuple(phonemes)
    if kind is AcousticKind.PHON_BLANK:
        return (BLANK, *phonemes)
    if kind is AcousticKind.BPE_BLANK:
        return (BLANK, *subwords)
    return (*subwords, SENTENCE_END)
