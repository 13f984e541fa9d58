"""Byte-pair-encoding subword units."""

import logging
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from pathlib import Path

from seqshift.errors import EmptyCorpusError, SeqshiftValidationError
from seqshift.text.corpus import UNKNOWN, Corpus

logger = logging.getLogger(__name__)

END_OF_WORD = "</w>"
BPE_HEADER = "#bpe v1"
ALPHABET_TAG = "#alphabet"

Pair = tuple[str, str]


def split_word(word: str) -> tuple[str, ...]:
    """Characters of `word`, the end-of-word marker fused onto the last one."""
    if not word:
        return ()
    chars = list(word)
    chars[-1] = chars[-1] + END_OF_WORD
    return tuple(chars)


def _merge_pair(symbols: tuple[str, ...], pair: Pair) -> tuple[str, ...]:
    first, second = pair
    out: list[str] = []
    i = 0
    while i < len(symbols):
        if i + 1 < len(symbols) and symbols[i] == first and symbols[i + 1] == second:
            out.append(first + second)
            i += 2
        else:
            out.append(symbols[i])
            i += 1
    return tuple(out)


@dataclass(frozen=True)
class BpeModel:
    """Ordered merges plus the subword inventory they produce."""

    merges: tuple[Pair, ...]
    vocab: frozenset[str]

    def __post_init__(self) -> None:
        if len(set(self.merges)) != len(self.merges):
            raise SeqshiftValidationError("duplicate BPE merge")

    @property
    def alphabet(self) -> frozenset[str]:
        """Initial symbols, i.e. the vocabulary minus merge products."""
        products = {a + b for a, b in self.merges}
        return frozenset(s for s in self.vocab if s not in products)

    def segment(self, word: str) -> tuple[str, ...]:
        """Replay merges in learned order over one word."""
        symbols = split_word(word)
        for pair in self.merges:
            if len(symbols) < 2:
                break
            symbols = _merge_pair(symbols, pair)
        return tuple(s if s in self.vocab else UNKNOWN for s in symbols)

    def save(self, path: Path | str) -> None:
        with open(path, "w", encoding="utf-8") as f:
            f.write(BPE_HEADER + "\n")
            f.write(ALPHABET_TAG + "\t" + " ".join(sorted(self.alphabet)) + "\n")
            for first, second in self.merges:
                f.write(f"{first}\t{second}\n")

    @classmethod
    def load(cls, path: Path | str) -> "BpeModel":
        with open(path, encoding="utf-8") as f:
            lines = [line.rstrip("\n") for line in f]
        if not lines or lines[0].strip() != BPE_HEADER:
            raise SeqshiftValidationError(f"missing '{BPE_HEADER}' header in {path}")

        alphabet: set[str] = set()
        merges: list[Pair] = []
        for line_no, line in enumerate(lines[1:], start=2):
            if not line.strip():
                continue
            if line.startswith(ALPHABET_TAG):
                alphabet.update(line[len(ALPHABET_TAG) :].split())
                continue
            if line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not all(parts):
                raise SeqshiftValidationError(f"malformed merge at line {line_no} of {path}")
            merges.append((parts[0], parts[1]))

        vocab = set(alphabet)
        for first, second in merges:
            if not alphabet:
                vocab.update((first, second))
            vocab.add(first + second)
        return cls(merges=tuple(merges), vocab=frozenset(vocab))


def bpe_learn(corpus: Corpus, num_merges: int) -> BpeModel:
    """Greedy most-frequent-pair merging.

    Pair-count ties go to the lexicographically smallest pair.

    Args:
        corpus: Training text
        num_merges: Maximum number of merges; learning stops early when no pair is left

    Returns:
        BpeModel whose vocabulary is the initial alphabet plus every merge product
    """
    if corpus.num_words == 0:
        raise EmptyCorpusError(corpus.name)
    if num_merges < 0:
        raise ValueError(f"num_merges must be >= 0, got {num_merges}")

    words: dict[tuple[str, ...], int] = Counter()
    for word, count in corpus.word_counts().items():
        words[split_word(word)] += count
    vocab: set[str] = {s for symbols in words for s in symbols}

    merges: list[Pair] = []
    for _ in range(num_merges):
        pairs: Counter[Pair] = Counter()
        for symbols, count in words.items():
            for pair in zip(symbols, symbols[1:], strict=False):
                pairs[pair] += count
        if not pairs:
            break
        best = min(pairs.items(), key=lambda item: (-item[1], item[0]))[0]
        merges.append(best)
        vocab.add(best[0] + best[1])

        merged: dict[tuple[str, ...], int] = Counter()
        for symbols, count in words.items():
            merged[_merge_pair(symbols, best)] += count
        words = merged

    logger.info(f"Learned {len(merges)} BPE merges, {len(vocab)} subwords from {corpus.name}")
    return BpeModel(merges=tuple(merges), vocab=frozenset(vocab))


def bpe_apply(model: BpeModel, words: Sequence[str]) -> list[str]:
    """Segment a word sequence into subword tokens."""
    tokens: list[str] = []
    for word in words:
        tokens.extend(model.segment(word))
    return tokens


def bpe_apply_corpus(model: BpeModel, corpus: Corpus) -> Corpus:
    return Corpus(
        lines=tuple(tuple(bpe_apply(model, line)) for line in corpus.lines),
        name=f"{corpus.name}.bpe",
    )


def join_subwords(tokens: Iterable[str]) -> list[str]:
    """Inverse segmentation: concatenate tokens and split at end-of-word markers.

    A trailing piece without marker is returned as a word of its own.
    """
    words: list[str] = []
    current = ""
    for token in tokens:
        if token.endswith(END_OF_WORD):
            words.append(current + token[: -len(END_OF_WORD)])
            current = ""
        else:
            current += token
    if current:
        words.append(current)
    return words


def token_word_ratio(model: BpeModel, corpus: Corpus) -> float:
    """Subword tokens per running word."""
    num_words = corpus.num_words
    if num_words == 0:
        raise EmptyCorpusError(corpus.name)
    num_tokens = sum(len(bpe_apply(model, line)) for line in corpus.lines)
    return num_tokens / num_words
