"""Corpora, vocabularies and OOV statistics."""

import logging
from collections import Counter
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from pathlib import Path

from seqshift.errors import EmptyCorpusError, SeqshiftValidationError

logger = logging.getLogger(__name__)

SENTENCE_BEGIN = "<s>"
SENTENCE_END = "</s>"
UNKNOWN = "<unk>"
RESERVED = (SENTENCE_BEGIN, SENTENCE_END, UNKNOWN)
BOS_ID, EOS_ID, UNK_ID = 0, 1, 2


@dataclass(frozen=True)
class Corpus:
    """Whitespace-tokenized sentences."""

    lines: tuple[tuple[str, ...], ...]
    name: str = "corpus"

    def __post_init__(self) -> None:
        for line in self.lines:
            for token in line:
                if not token or any(ch.isspace() for ch in token):
                    raise SeqshiftValidationError(f"invalid token {token!r} in {self.name}")

    @classmethod
    def from_texts(cls, texts: Iterable[str], name: str = "corpus") -> "Corpus":
        """Build a corpus from raw lines; blank lines are skipped."""
        lines = tuple(tuple(text.split()) for text in texts if text.strip())
        return cls(lines=lines, name=name)

    @classmethod
    def load(cls, path: Path | str, name: str | None = None) -> "Corpus":
        path = Path(path)
        with open(path, encoding="utf-8") as f:
            return cls.from_texts(f, name=name or path.stem)

    def save(self, path: Path | str) -> None:
        with open(path, "w", encoding="utf-8") as f:
            for line in self.lines:
                f.write(" ".join(line) + "\n")

    @property
    def num_words(self) -> int:
        """Running words."""
        return sum(len(line) for line in self.lines)

    def __len__(self) -> int:
        return len(self.lines)

    def __iter__(self) -> Iterator[tuple[str, ...]]:
        return iter(self.lines)

    def word_counts(self) -> Counter[str]:
        return Counter(token for line in self.lines for token in line)


@dataclass(frozen=True)
class Vocabulary:
    """Dense word ids with the reserved symbols fixed at 0, 1, 2."""

    words: tuple[str, ...]
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.words[: len(RESERVED)] != RESERVED:
            raise SeqshiftValidationError("vocabulary must start with the reserved symbols")
        index = {word: i for i, word in enumerate(self.words)}
        if len(index) != len(self.words):
            raise SeqshiftValidationError("vocabulary entries must be unique")
        object.__setattr__(self, "_index", index)

    @classmethod
    def from_words(cls, words: Iterable[str]) -> "Vocabulary":
        """Reserved symbols followed by `words` in order, duplicates and reserved dropped."""
        seen: dict[str, None] = dict.fromkeys(RESERVED)
        for word in words:
            seen.setdefault(word, None)
        return cls(words=tuple(seen))

    @classmethod
    def load(cls, path: Path | str) -> "Vocabulary":
        with open(path, encoding="utf-8") as f:
            return cls.from_words(line.strip() for line in f if line.strip())

    def save(self, path: Path | str) -> None:
        with open(path, "w", encoding="utf-8") as f:
            for word in self.words[len(RESERVED) :]:
                f.write(word + "\n")

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: object) -> bool:
        return word in self._index

    def lookup(self, word: str) -> int:
        """Id of `word`, or the unknown id."""
        return self._index.get(word, UNK_ID)

    def word(self, word_id: int) -> str:
        return self.words[word_id]

    @property
    def regular_words(self) -> tuple[str, ...]:
        """Entries without the reserved symbols."""
        return self.words[len(RESERVED) :]


def build_vocabulary(corpus: Corpus, max_size: int | None = None) -> Vocabulary:
    """Most frequent words of a corpus, ties broken lexicographically.

    Args:
        corpus: Training text
        max_size: Number of regular words to keep; None keeps all

    Returns:
        Vocabulary with the reserved symbols first
    """
    if corpus.num_words == 0:
        raise EmptyCorpusError(corpus.name)
    if max_size is not None and max_size < 1:
        raise ValueError(f"max_size must be positive, got {max_size}")

    counts = corpus.word_counts()
    for reserved in RESERVED:
        counts.pop(reserved, None)
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    if max_size is not None:
        ranked = ranked[:max_size]
    vocab = Vocabulary.from_words(word for word, _ in ranked)
    logger.debug(f"Built vocabulary of {len(vocab)} entries from {corpus.name}")
    return vocab


def oov_rate(corpus: Corpus | Sequence[Sequence[str]], vocab: Vocabulary) -> float:
    """Fraction of running tokens not covered by `vocab`."""
    total = 0
    missing = 0
    for line in corpus:
        for token in line:
            total += 1
            if token not in vocab or token == UNKNOWN:
                missing += 1
    return missing / total if total else 0.0
