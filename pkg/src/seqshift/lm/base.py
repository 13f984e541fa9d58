"""Pluggable language-model scorer interface.

Decoders only see this interface, so count-based n-grams and any other
label-sequence model can be fused the same way.
"""

import math
from abc import ABC, abstractmethod

from seqshift.text.corpus import Vocabulary

LmState = tuple[int, ...]

LN10 = math.log(10.0)


class LanguageModel(ABC):
    """Incremental token scorer over a vocabulary."""

    vocab: Vocabulary

    @abstractmethod
    def initial_state(self) -> LmState:
        """State before the first token of a sentence."""

    @abstractmethod
    def logprob(self, state: LmState, token_id: int) -> tuple[float, LmState]:
        """Score one token.

        Args:
            state: Current context
            token_id: Token to score

        Returns:
            (log10 probability, next state)
        """

    def ln_logprob(self, state: LmState, token_id: int) -> tuple[float, LmState]:
        """Natural-log variant used by the search module."""
        logp, next_state = self.logprob(state, token_id)
        return logp * LN10, next_state
