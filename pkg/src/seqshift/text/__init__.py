"""Text corpora, vocabularies and BPE subwords."""

from seqshift.text.bpe import (
    END_OF_WORD,
    BpeModel,
    bpe_apply,
    bpe_apply_corpus,
    bpe_learn,
    join_subwords,
    token_word_ratio,
)
from seqshift.text.corpus import (
    BOS_ID,
    EOS_ID,
    SENTENCE_BEGIN,
    SENTENCE_END,
    UNK_ID,
    UNKNOWN,
    Corpus,
    Vocabulary,
    build_vocabulary,
    oov_rate,
)

__all__ = [
    "BOS_ID",
    "EOS_ID",
    "END_OF_WORD",
    "SENTENCE_BEGIN",
    "SENTENCE_END",
    "UNKNOWN",
    "UNK_ID",
    "BpeModel",
    "Corpus",
    "Vocabulary",
    "bpe_apply",
    "bpe_apply_corpus",
    "bpe_learn",
    "build_vocabulary",
    "join_subwords",
    "oov_rate",
    "token_word_ratio",
]
