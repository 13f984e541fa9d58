"""Bind a model description to its decoder and the artifacts it reads."""

import logging
from dataclasses import dataclass
from pathlib import Path

from seqshift.acoustic import (
    ContextPrior,
    FactoredScores,
    IlmModel,
    PositionLabelScorer,
    Posteriorgram,
    PosteriorTransducerScorer,
)
from seqshift.errors import SeqshiftValidationError
from seqshift.lexicon import Lexicon, PrefixTree, build_prefix_tree
from seqshift.lm import LanguageModel
from seqshift.models import DecodeConfig, LabelUnit, ModelKind, ModelSpec, VocabMode
from seqshift.search import DecodeResult, decode_label_sync, decode_time_sync, decode_transducer
from seqshift.text import BpeModel
from seqshift.topology import TransitionModel

logger = logging.getLogger(__name__)


def _resolve(base_dir: Path, path: str | None) -> Path | None:
    if path is None:
        return None
    resolved = Path(path)
    return resolved if resolved.is_absolute() else base_dir / resolved


@dataclass(frozen=True, eq=False)
class ModelDecoder:
    """A model of the comparative scenario, ready to decode utterances.

    Scorers are rebuilt per utterance; everything held here is read-only and shared
    across decoding threads.
    """

    spec: ModelSpec
    tree: PrefixTree | None
    bpe: BpeModel | None
    prior: ContextPrior | None
    ilm: IlmModel | None
    internal_lm: IlmModel | None
    transitions: TransitionModel

    @classmethod
    def load(
        cls,
        spec: ModelSpec,
        lexicon: Lexicon,
        bpe: BpeModel | None,
        base_dir: Path | str = ".",
    ) -> "ModelDecoder":
        base_dir = Path(base_dir)
        prior_path = _resolve(base_dir, spec.prior)
        ilm_path = _resolve(base_dir, spec.ilm)
        internal_path = _resolve(base_dir, spec.internal_lm)
        return cls.build(
            spec,
            lexicon,
            bpe,
            prior=ContextPrior.load(prior_path) if prior_path else None,
            ilm=IlmModel.load(ilm_path, spec.ilm_order) if ilm_path else None,
            internal_lm=(
                IlmModel.load(internal_path, spec.internal_lm_order) if internal_path else None
            ),
        )

    @classmethod
    def build(
        cls,
        spec: ModelSpec,
        lexicon: Lexicon,
        bpe: BpeModel | None,
        prior: ContextPrior | None = None,
        ilm: IlmModel | None = None,
        internal_lm: IlmModel | None = None,
    ) -> "ModelDecoder":
        if spec.unit is LabelUnit.BPE and bpe is None:
            raise SeqshiftValidationError(f"model {spec.name} needs a BPE model")
        tree: PrefixTree | None = None
        if spec.kind is not ModelKind.AED and spec.vocab_mode is VocabMode.CLOSED:
            if spec.unit is LabelUnit.PHON:
                tree = build_prefix_tree(lexicon)
            elif bpe is not None:
                tree = build_prefix_tree(Lexicon.from_bpe(lexicon.words, bpe))
        logger.debug(f"Loaded model {spec.name} ({spec.kind.value}, {spec.unit.value})")
        return cls(
            spec=spec,
            tree=tree,
            bpe=bpe,
            prior=prior,
            ilm=ilm,
            internal_lm=internal_lm,
            transitions=TransitionModel.from_loop_prob(spec.transition_loop),
        )

    @property
    def uses_subword_lm(self) -> bool:
        return self.spec.kind is ModelKind.AED or self.spec.vocab_mode is VocabMode.OPEN

    def decode(
        self,
        acoustics: Posteriorgram | FactoredScores,
        lm: LanguageModel,
        cfg: DecodeConfig,
    ) -> DecodeResult:
        """Decode one utterance; `lm` is the word LM, or the subword LM for open/AED models."""
        spec = self.spec
        if spec.kind in (ModelKind.CTC, ModelKind.FH_DI, ModelKind.FH_TRI):
            assert self.tree is not None
            return decode_time_sync(
                acoustics,
                self.tree,
                lm,
                self.prior,
                self.transitions,
                cfg,
                spec.kind,
                silence=spec.silence,
            )

        if not isinstance(acoustics, Posteriorgram):
            raise SeqshiftValidationError(f"{spec.kind.value} decoding needs a posteriorgram")
        if spec.kind is ModelKind.TRANSDUCER:
            scorer = PosteriorTransducerScorer(
                acoustics, self.internal_lm, spec.internal_lm_weight
            )
            units = self.tree if self.tree is not None else self.bpe
            assert units is not None
            return decode_transducer(scorer, self.ilm, lm, units, cfg)

        label_scorer = PositionLabelScorer(acoustics, self.internal_lm, spec.internal_lm_weight)
        return decode_label_sync(label_scorer, self.ilm, lm, cfg)
