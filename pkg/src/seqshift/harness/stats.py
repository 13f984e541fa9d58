"""Domain statistics: OOV rate and perplexity of every LM on every corpus."""

import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

from seqshift.lm import NGramModel, evaluate_perplexity, renormalize_subword_ppl
from seqshift.text import BpeModel, Corpus, bpe_apply_corpus, oov_rate, token_word_ratio

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CorpusInfo:
    name: str
    running_words: int
    vocab_size: int
    token_word_ratio: float | None = None


@dataclass(frozen=True)
class DomainStatsRow:
    lm: str
    corpus: str
    oov: float  # fraction in [0, 1]
    ppl: float


@dataclass
class DomainStats:
    """Cross product of LMs and corpora; rows keep LM-major declaration order."""

    lms: list[str]
    corpora: list[CorpusInfo]
    rows: list[DomainStatsRow] = field(default_factory=list)

    def get(self, lm: str, corpus: str) -> DomainStatsRow:
        for row in self.rows:
            if (row.lm, row.corpus) == (lm, corpus):
                return row
        raise KeyError((lm, corpus))


def domain_stats(
    lms: Mapping[str, NGramModel],
    corpora: Sequence[Corpus],
    bpe: BpeModel | None = None,
) -> DomainStats:
    """OOV fraction and PPL per (LM, corpus), plus corpus sizes.

    With `bpe` the corpus info also carries the subword token-to-word ratio.
    Zero-probability errors from perplexity propagate.
    """
    infos = [
        CorpusInfo(
            name=corpus.name,
            running_words=corpus.num_words,
            vocab_size=len(corpus.word_counts()),
            token_word_ratio=token_word_ratio(bpe, corpus) if bpe is not None else None,
        )
        for corpus in corpora
    ]
    stats = DomainStats(lms=list(lms), corpora=infos)
    for lm_name, lm in lms.items():
        for corpus in corpora:
            result = evaluate_perplexity(lm, corpus)
            stats.rows.append(
                DomainStatsRow(
                    lm=lm_name,
                    corpus=corpus.name,
                    oov=oov_rate(corpus, lm.vocab),
                    ppl=result.perplexity,
                )
            )
            logger.debug(f"{lm_name} on {corpus.name}: PPL {result.perplexity:.1f}")
    return stats


@dataclass(frozen=True)
class SubwordPplRow:
    lm: str
    corpus: str
    word_ppl: float
    subword_ppl: float
    renormalized_ppl: float


def subword_ppl_rows(
    lms: Mapping[str, tuple[NGramModel, NGramModel]],
    corpora: Sequence[Corpus],
    bpe: BpeModel,
) -> list[SubwordPplRow]:
    """Word-level PPL next to the word-renormalized PPL of the BPE-level twin LM.

    `lms` maps a name to (word LM, subword LM). Sentence ends count as tokens on both
    levels.
    """
    rows: list[SubwordPplRow] = []
    for name, (word_lm, subword_lm) in lms.items():
        for corpus in corpora:
            word_result = evaluate_perplexity(word_lm, corpus)
            subword_result = evaluate_perplexity(subword_lm, bpe_apply_corpus(bpe, corpus))
            rows.append(
                SubwordPplRow(
                    lm=name,
                    corpus=corpus.name,
                    word_ppl=word_result.perplexity,
                    subword_ppl=subword_result.perplexity,
                    renormalized_ppl=renormalize_subword_ppl(
                        subword_result.perplexity,
                        subword_result.num_tokens,
                        word_result.num_tokens,
                    ),
                )
            )
    return rows
