"""Phoneme inventory, pronunciation lexicon and lexical prefix tree."""

import logging
import re
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path

from seqshift.errors import LexiconError
from seqshift.text.bpe import END_OF_WORD, BpeModel
from seqshift.text.corpus import UNKNOWN, Vocabulary

logger = logging.getLogger(__name__)

WORD_END = "#"
SILENCE = "[SILENCE]"

_STRESS = re.compile(r"^(.+?)[012]$")

Pronunciation = tuple[str, ...]


def strip_stress(phoneme: str) -> str:
    """Remove a trailing stress digit (0-2)."""
    match = _STRESS.match(phoneme)
    return match.group(1) if match else phoneme


@dataclass(frozen=True)
class PhonemeInventory:
    """Base phonemes, their end-of-word twins and a silence symbol."""

    bases: tuple[str, ...]
    silence: str = SILENCE

    def __post_init__(self) -> None:
        if len(set(self.bases)) != len(self.bases):
            raise LexiconError("duplicate base phonemes")
        if any(b.endswith(WORD_END) or b == self.silence for b in self.bases):
            raise LexiconError("base phonemes must not carry the end-of-word flag")

    @property
    def symbols(self) -> tuple[str, ...]:
        out: list[str] = []
        for base in self.bases:
            out.extend((base, base + WORD_END))
        out.append(self.silence)
        return tuple(out)

    def __contains__(self, symbol: object) -> bool:
        return symbol in self.symbols

    def __len__(self) -> int:
        return len(self.symbols)


def normalize_inventory(raw_phonemes: Iterable[str], silence: str = SILENCE) -> PhonemeInventory:
    """Merge stress variants and add end-of-word twins."""
    bases = {
        strip_stress(p.removesuffix(WORD_END)).removesuffix(WORD_END)
        for p in raw_phonemes
        if p and p != silence
    }
    return PhonemeInventory(bases=tuple(sorted(bases)), silence=silence)


def add_word_end(pronunciation: Sequence[str], marker: str = WORD_END) -> Pronunciation:
    """Flag the final unit of a pronunciation."""
    units = list(pronunciation)
    if units and not units[-1].endswith(marker):
        units[-1] += marker
    return tuple(units)


@dataclass(frozen=True, eq=False)
class Lexicon:
    """Word to pronunciation mapping; word ids follow insertion order.

    Phoneme lexica flag word ends with '#', subword lexica with the BPE marker.
    """

    entries: dict[str, tuple[Pronunciation, ...]]
    units: frozenset[str] | None = None
    end_marker: str = WORD_END
    inventory: PhonemeInventory | None = None
    _ids: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        for word, prons in self.entries.items():
            if not prons:
                raise LexiconError(f"word {word!r} has no pronunciation")
            for pron in prons:
                self._validate(word, pron)
        object.__setattr__(self, "_ids", {w: i for i, w in enumerate(self.entries)})

    def _validate(self, word: str, pron: Pronunciation) -> None:
        if not pron:
            raise LexiconError(f"empty pronunciation for {word!r}")
        if not pron[-1].endswith(self.end_marker):
            raise LexiconError(f"final unit of {word!r} lacks the end-of-word flag")
        if any(unit.endswith(self.end_marker) for unit in pron[:-1]):
            raise LexiconError(f"internal unit of {word!r} carries the end-of-word flag")
        if self.units is not None:
            unknown = [unit for unit in pron if unit not in self.units]
            if unknown:
                raise LexiconError(f"unit {unknown[0]!r} of {word!r} not in inventory")

    @classmethod
    def from_pronunciations(
        cls,
        pronunciations: Mapping[str, Sequence[Sequence[str]]],
        inventory: PhonemeInventory | None = None,
    ) -> "Lexicon":
        """Phoneme lexicon; stress digits are stripped and word ends flagged."""
        entries: dict[str, tuple[Pronunciation, ...]] = {}
        for word, prons in pronunciations.items():
            normalized = []
            for pron in prons:
                pron = add_word_end([strip_stress(p) for p in pron])
                if pron not in normalized:
                    normalized.append(pron)
            entries[word] = tuple(normalized)
        if inventory is None:
            inventory = normalize_inventory(
                unit for prons in entries.values() for pron in prons for unit in pron
            )
        return cls(entries=entries, units=frozenset(inventory.symbols), inventory=inventory)

    @classmethod
    def from_bpe(cls, words: Iterable[str], bpe: BpeModel) -> "Lexicon":
        """Subword lexicon: each word spelled by its BPE segmentation."""
        entries: dict[str, tuple[Pronunciation, ...]] = {}
        for word in words:
            pron = bpe.segment(word)
            if UNKNOWN in pron:
                raise LexiconError(f"word {word!r} has characters unknown to the BPE model")
            entries[word] = (pron,)
        return cls(entries=entries, units=bpe.vocab, end_marker=END_OF_WORD)

    @classmethod
    def load(cls, path: Path | str, inventory: PhonemeInventory | None = None) -> "Lexicon":
        """Read 'WORD<TAB>PH1 PH2 ...' lines; repeated words add pronunciation variants."""
        pronunciations: dict[str, list[list[str]]] = {}
        with open(path, encoding="utf-8") as f:
            for line_no, line in enumerate(f, start=1):
                if not line.strip():
                    continue
                word, sep, pron = line.rstrip("\n").partition("\t")
                if not sep or not word.strip() or not pron.split():
                    raise LexiconError(f"malformed lexicon line {line_no} in {path}")
                pronunciations.setdefault(word.strip(), []).append(pron.split())
        return cls.from_pronunciations(pronunciations, inventory)

    def save(self, path: Path | str) -> None:
        with open(path, "w", encoding="utf-8") as f:
            for word, prons in self.entries.items():
                for pron in prons:
                    f.write(f"{word}\t{' '.join(pron)}\n")

    @property
    def words(self) -> tuple[str, ...]:
        return tuple(self.entries)

    @property
    def vocab(self) -> Vocabulary:
        return Vocabulary.from_words(self.entries)

    def word_id(self, word: str) -> int:
        return self._ids[word]

    def pronunciations(self, word: str) -> tuple[Pronunciation, ...]:
        return self.entries[word]

    def check_vocab(self, vocab: Vocabulary) -> None:
        """Every regular vocabulary word must have a pronunciation."""
        missing = [w for w in vocab.regular_words if w not in self.entries]
        if missing:
            raise LexiconError(
                f"{len(missing)} vocabulary words lack pronunciations: {missing[:5]}"
            )

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class TreeNode:
    label: str | None
    parent: int
    children: dict[str, int]
    word_ids: tuple[int, ...]


ROOT = 0


@dataclass(frozen=True, eq=False)
class PrefixTree:
    """Trie over pronunciation units; word ids sit on the node that completes them."""

    nodes: tuple[TreeNode, ...]
    lexicon: Lexicon

    def __len__(self) -> int:
        return len(self.nodes)

    def label(self, node: int) -> str:
        label = self.nodes[node].label
        if label is None:
            raise LexiconError("the root carries no label")
        return label

    def children(self, node: int) -> dict[str, int]:
        return self.nodes[node].children

    def word_ids(self, node: int) -> tuple[int, ...]:
        return self.nodes[node].word_ids

    @property
    def root_children(self) -> dict[str, int]:
        return self.nodes[ROOT].children

    def paths(self) -> set[tuple[str, Pronunciation]]:
        """(word, pronunciation) for every root-to-word-end path."""
        found: set[tuple[str, Pronunciation]] = set()
        stack: list[tuple[int, Pronunciation]] = [(ROOT, ())]
        words = self.lexicon.words
        while stack:
            node, prefix = stack.pop()
            for word_id in self.nodes[node].word_ids:
                found.add((words[word_id], prefix))
            for label, child in self.nodes[node].children.items():
                stack.append((child, (*prefix, label)))
        return found


def build_prefix_tree(lexicon: Lexicon) -> PrefixTree:
    """Collapse shared pronunciation prefixes into shared nodes."""
    if len(lexicon) == 0:
        raise LexiconError("empty lexicon")

    labels: list[str | None] = [None]
    parents: list[int] = [-1]
    children: list[dict[str, int]] = [{}]
    word_ids: list[list[int]] = [[]]
    for word_id, word in enumerate(lexicon.words):
        for pron in lexicon.pronunciations(word):
            node = ROOT
            for unit in pron:
                child = children[node].get(unit)
                if child is None:
                    child = len(labels)
                    labels.append(unit)
                    parents.append(node)
                    children.append({})
                    word_ids.append([])
                    children[node][unit] = child
                node = child
            if word_id not in word_ids[node]:
                word_ids[node].append(word_id)

    nodes = tuple(
        TreeNode(
            label=labels[i],
            parent=parents[i],
            children=children[i],
            word_ids=tuple(word_ids[i]),
        )
        for i in range(len(labels))
    )
    logger.debug(f"Built prefix tree with {len(nodes)} nodes for {len(lexicon)} words")
    return PrefixTree(nodes=nodes, lexicon=lexicon)
