"""Synthetic data sets and their manifests.

A manifest line is "utt_id<TAB>path<TAB>reference words"; paths are relative to the
manifest. Factored acoustics are referenced by the stem of their three factor files.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

from seqshift.acoustic import (
    BLANK,
    FactoredScores,
    Posteriorgram,
    load_posteriorgram,
    save_posteriorgram,
)
from seqshift.acoustic.factored import factor_paths
from seqshift.emitter.synth import (
    acoustic_labels,
    synth_factored_scores,
    synth_label_table,
    synth_posteriorgram,
)
from seqshift.errors import SeqshiftValidationError
from seqshift.lexicon import Lexicon
from seqshift.models import AcousticKind, EmitterConfig
from seqshift.text.bpe import BpeModel, bpe_apply

logger = logging.getLogger(__name__)

Acoustics = Posteriorgram | FactoredScores


@dataclass(frozen=True)
class ManifestEntry:
    utt_id: str
    path: Path
    words: tuple[str, ...]


@dataclass(frozen=True, eq=False)
class SynthItem:
    utt_id: str
    words: tuple[str, ...]
    acoustics: Acoustics


@dataclass(frozen=True, eq=False)
class SynthSet:
    """Synthesized utterances of one data set and acoustic kind."""

    name: str
    kind: AcousticKind
    items: tuple[SynthItem, ...]
    seed: int
    tau: float

    def __len__(self) -> int:
        return len(self.items)

    @property
    def references(self) -> list[tuple[str, ...]]:
        return [item.words for item in self.items]


def read_manifest(path: Path | str) -> list[ManifestEntry]:
    path = Path(path)
    entries: list[ManifestEntry] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            fields = line.rstrip("\n").split("\t")
            if len(fields) != 3 or not fields[0] or not fields[1]:
                raise SeqshiftValidationError(f"malformed manifest line {line_no} in {path}")
            utt_id, rel, words = fields
            if utt_id in seen:
                raise SeqshiftValidationError(
                    f"duplicate utterance id {utt_id} on manifest line {line_no} in {path}"
                )
            seen.add(utt_id)
            entries.append(ManifestEntry(utt_id, path.parent / rel, tuple(words.split())))
    return entries


def write_manifest(path: Path | str, entries: Sequence[ManifestEntry]) -> None:
    path = Path(path)
    with open(path, "w", encoding="utf-8") as f:
        for entry in entries:
            rel = Path(entry.path)
            if rel.is_absolute():
                rel = rel.relative_to(path.parent)
            f.write(f"{entry.utt_id}\t{rel.as_posix()}\t{' '.join(entry.words)}\n")


def reference_units(
    words: Sequence[str], kind: AcousticKind, lexicon: Lexicon, bpe: BpeModel | None
) -> list[str]:
    """Reference label sequence of an utterance: first pronunciations or BPE tokens."""
    if kind in (AcousticKind.FACTORED, AcousticKind.PHON_BLANK):
        units: list[str] = []
        for word in words:
            units.extend(lexicon.pronunciations(word)[0])
        return units
    if bpe is None:
        raise SeqshiftValidationError(f"{kind.value} acoustics need a BPE model")
    return bpe_apply(bpe, words)


def synthesize(
    kind: AcousticKind,
    units: Sequence[str],
    cfg: EmitterConfig,
    label_set: Sequence[str],
    utt_index: int,
) -> Acoustics:
    if kind is AcousticKind.FACTORED:
        return synth_factored_scores(units, cfg, label_set, utt_index=utt_index)
    if kind is AcousticKind.BPE_LABEL:
        return synth_label_table(units, cfg, label_set, utt_index=utt_index)
    return synth_posteriorgram(units, cfg, label_set, blank=BLANK, utt_index=utt_index)


def generate_synth_set(
    name: str,
    references: Sequence[Sequence[str]],
    kind: AcousticKind | str,
    cfg: EmitterConfig,
    lexicon: Lexicon,
    bpe: BpeModel | None = None,
) -> SynthSet:
    """Synthesize one data set; utterance i uses the generator stream (seed, i)."""
    kind = AcousticKind(kind)
    if lexicon.inventory is None:
        raise SeqshiftValidationError("synthesis needs a phoneme lexicon")
    subwords = sorted(bpe.vocab) if bpe is not None else []
    label_set = acoustic_labels(kind, lexicon.inventory.symbols, subwords)
    items = []
    for i, words in enumerate(references):
        units = reference_units(words, kind, lexicon, bpe)
        items.append(
            SynthItem(
                utt_id=f"{name}-{i:04d}",
                words=tuple(words),
                acoustics=synthesize(kind, units, cfg, label_set, i),
            )
        )
    logger.debug(f"Synthesized {len(items)} {kind.value} utterances for {name} (tau={cfg.tau})")
    return SynthSet(name=name, kind=kind, items=tuple(items), seed=cfg.seed, tau=cfg.tau)


def save_synth_set(synth_set: SynthSet, directory: Path | str) -> Path:
    """Write acoustics and manifest under `directory`; returns the manifest path."""
    directory = Path(directory)
    data_dir = directory / f"{synth_set.name}.{synth_set.kind.value}"
    data_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for item in synth_set.items:
        if isinstance(item.acoustics, FactoredScores):
            path = data_dir / item.utt_id
            item.acoustics.save(path)
        else:
            path = data_dir / f"{item.utt_id}.pgrm"
            save_posteriorgram(item.acoustics, path)
        entries.append(ManifestEntry(item.utt_id, path.relative_to(directory), item.words))
    manifest = directory / f"{synth_set.name}.{synth_set.kind.value}.tsv"
    write_manifest(manifest, entries)
    return manifest


def acoustic_files(
    entry: ManifestEntry, kind: AcousticKind | str, triphone: bool = False
) -> list[Path]:
    """Files `load_acoustics` reads for an entry."""
    if AcousticKind(kind) is AcousticKind.FACTORED:
        return factor_paths(entry.path, triphone=triphone)
    return [entry.path]


def load_acoustics(entry: ManifestEntry, kind: AcousticKind | str) -> Acoustics:
    if AcousticKind(kind) is AcousticKind.FACTORED:
        return FactoredScores.load(entry.path)
    return load_posteriorgram(entry.path)
