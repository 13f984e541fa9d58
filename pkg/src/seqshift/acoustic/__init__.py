"""Posteriorgrams, priors, internal LMs and the frame/step scorers."""

from seqshift.acoustic.factored import FactoredScores, fh_score
from seqshift.acoustic.ilm import IlmModel, IlmOrder, estimate_ilm
from seqshift.acoustic.posteriorgram import (
    BLANK,
    Posteriorgram,
    load_posteriorgram,
    log_softmax,
    save_posteriorgram,
)
from seqshift.acoustic.prior import ContextPrior, estimate_context_prior, floor_and_renormalize
from seqshift.acoustic.scorers import (
    LabelScorer,
    PositionLabelScorer,
    PosteriorTransducerScorer,
    StepPosterior,
    TransducerScorer,
    ctc_score,
    transducer_score,
)

__all__ = [
    "BLANK",
    "ContextPrior",
    "FactoredScores",
    "IlmModel",
    "IlmOrder",
    "LabelScorer",
    "PositionLabelScorer",
    "Posteriorgram",
    "PosteriorTransducerScorer",
    "StepPosterior",
    "TransducerScorer",
    "ctc_score",
    "estimate_context_prior",
    "estimate_ilm",
    "fh_score",
    "floor_and_renormalize",
    "load_posteriorgram",
    "log_softmax",
    "save_posteriorgram",
    "transducer_score",
]
