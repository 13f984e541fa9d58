"""Seeded two-domain toy world for domain-shift experiments.

Both domains share one phoneme inventory. Words are spelled with their phonemes, each
domain has its own dominant vocabulary plus a few shared words, and text is drawn from
a per-domain word Markov chain. The source domain provides the BPE model, the context
priors and the internal LMs; the target domain only contributes text for its LM.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

import numpy as np

from seqshift.acoustic import (
    BLANK,
    ContextPrior,
    IlmModel,
    estimate_context_prior,
    estimate_ilm,
)
from seqshift.emitter import (
    SynthSet,
    generate_synth_set,
    reference_units,
    save_synth_set,
    synth_posteriorgram,
)
from seqshift.lexicon import Lexicon, PhonemeInventory
from seqshift.lm import NGramModel, save_arpa, train_ngram
from seqshift.models import (
    EXPERIMENT_SCHEMA,
    AcousticKind,
    DatasetSpec,
    DecodeGrid,
    EmitterConfig,
    ExperimentSpec,
    LabelUnit,
    LmSpec,
    ModelKind,
    ModelSpec,
    VocabMode,
)
from seqshift.text import (
    UNKNOWN,
    BpeModel,
    Corpus,
    Vocabulary,
    bpe_apply,
    bpe_apply_corpus,
    bpe_learn,
)
from seqshift.topology import Topology, alignment_contexts, force_align

logger = logging.getLogger(__name__)

TOY_BASES = ("a", "e", "i", "k", "o", "t")
SOURCE = "source"
TARGET = "target"
DOMAINS = (SOURCE, TARGET)
EVAL_ROLES: tuple[Literal["dev", "test"], ...] = ("dev", "test")
MAX_ATTEMPTS = 100


@dataclass(frozen=True)
class ToySettings:
    bases: tuple[str, ...] = TOY_BASES
    domain_words: int = 10
    shared_words: int = 3
    word_length: tuple[int, int] = (2, 4)
    sentence_length: tuple[int, int] = (2, 5)
    concentration: float = 0.3  # Dirichlet concentration of the Markov chain rows
    train_sentences: int = 300
    eval_sentences: int = 20
    prior_sentences: int = 60
    bpe_merges: int = 12
    word_lm_order: int = 2
    subword_lm_order: int = 3
    emitter: EmitterConfig = field(
        default_factory=lambda: EmitterConfig(tau=3.0, gain=4.0, frames_per_label=2)
    )
    full_context_bias: float = 1.5
    first_order_bias: float = 0.5
    grid: DecodeGrid = field(
        default_factory=lambda: DecodeGrid(
            lm_scale=[0.5, 1.0], prior_scale=[0.0, 0.3], length_norm=[0.0, 1.0], beam_size=8
        )
    )


@dataclass(eq=False)
class ToyWorld:
    seed: int
    settings: ToySettings
    words: dict[str, tuple[str, ...]]  # domain -> dominant words; "shared" -> shared words
    corpora: dict[str, Corpus]  # "<domain>-<split>"
    lexicon: Lexicon
    bpe: BpeModel
    word_lms: dict[str, NGramModel]
    subword_lms: dict[str, NGramModel]
    priors: dict[str, ContextPrior]  # by model name
    ilms: dict[str, IlmModel]  # by model name
    models: list[ModelSpec]
    synth_sets: dict[tuple[str, AcousticKind], SynthSet]  # (dataset, kind)

    @property
    def inventory(self) -> PhonemeInventory:
        assert self.lexicon.inventory is not None
        return self.lexicon.inventory


def _random_words(
    rng: np.random.Generator, count: int, settings: ToySettings, taken: set[str]
) -> tuple[str, ...]:
    low, high = settings.word_length
    words: list[str] = []
    while len(words) < count:
        length = int(rng.integers(low, high + 1))
        word = "".join(rng.choice(settings.bases, size=length))
        if word not in taken:
            taken.add(word)
            words.append(word)
    return tuple(words)


class _MarkovText:
    """First-order word chain with Dirichlet rows."""

    def __init__(self, words: tuple[str, ...], rng: np.random.Generator, concentration: float):
        self.words = words
        alpha = np.full(len(words), concentration)
        self.start = rng.dirichlet(alpha)
        self.rows = rng.dirichlet(alpha, size=len(words))

    def sentences(
        self, rng: np.random.Generator, count: int, length: tuple[int, int]
    ) -> list[tuple[str, ...]]:
        out = []
        for _ in range(count):
            n = int(rng.integers(length[0], length[1] + 1))
            k = int(rng.choice(len(self.words), p=self.start))
            sentence = [self.words[k]]
            for _ in range(n - 1):
                k = int(rng.choice(len(self.words), p=self.rows[k]))
                sentence.append(self.words[k])
            out.append(tuple(sentence))
        return out


def _draw_text(
    rng: np.random.Generator, settings: ToySettings
) -> tuple[dict[str, tuple[str, ...]], dict[str, Corpus]]:
    taken: set[str] = set()
    words = {
        SOURCE: _random_words(rng, settings.domain_words, settings, taken),
        TARGET: _random_words(rng, settings.domain_words, settings, taken),
        "shared": _random_words(rng, settings.shared_words, settings, taken),
    }
    corpora: dict[str, Corpus] = {}
    for domain in DOMAINS:
        chain = _MarkovText(words[domain] + words["shared"], rng, settings.concentration)
        splits = {
            "train": settings.train_sentences,
            "dev": settings.eval_sentences,
            "test": settings.eval_sentences,
        }
        for split, count in splits.items():
            lines = chain.sentences(rng, count, settings.sentence_length)
            corpora[f"{domain}-{split}"] = Corpus(lines=tuple(lines), name=f"{domain}-{split}")
    return words, corpora


def _segmentable(bpe: BpeModel, words: tuple[str, ...]) -> bool:
    return all(UNKNOWN not in bpe.segment(word) for word in words)


def _estimate_priors(
    seed: int,
    lexicon: Lexicon,
    references: list[tuple[str, ...]],
    settings: ToySettings,
) -> dict[int, ContextPrior]:
    """Priors of order 1 (CTC, over blank + phonemes), 2 and 3 (phonemes) from alignments."""
    assert lexicon.inventory is not None
    phonemes = lexicon.inventory.symbols
    cfg = settings.emitter.model_copy(update={"seed": seed})
    hmm_contexts: dict[int, list[list[tuple[str, ...]]]] = {2: [], 3: []}
    ctc_contexts: list[list[tuple[str, ...]]] = []
    ctc_labels = (BLANK, *phonemes)
    for i, words in enumerate(references):
        units = reference_units(words, AcousticKind.FACTORED, lexicon, None)
        pg = synth_posteriorgram(units, cfg, phonemes, utt_index=i)
        segments = force_align(Topology.HMM, units, pg)
        for order in (2, 3):
            hmm_contexts[order].append(alignment_contexts(segments, order))
        peaky = synth_posteriorgram(units, cfg, ctc_labels, blank=BLANK, utt_index=i)
        ctc_segments = force_align(Topology.CTC, units, peaky)
        ctc_contexts.append(alignment_contexts(ctc_segments, 1))
    return {
        1: estimate_context_prior(ctc_contexts, 1, labels=ctc_labels),
        2: estimate_context_prior(hmm_contexts[2], 2, labels=phonemes),
        3: estimate_context_prior(hmm_contexts[3], 3, labels=phonemes),
    }


def toy_models(settings: ToySettings) -> list[ModelSpec]:
    """The comparative scenario; artifact paths follow write_toy_world's layout."""
    full, first = settings.full_context_bias, settings.first_order_bias
    return [
        ModelSpec(name="fh-tri", kind=ModelKind.FH_TRI, context="1", prior="priors/fh-tri.prior"),
        ModelSpec(name="fh-di", kind=ModelKind.FH_DI, context="1", prior="priors/fh-di.prior"),
        ModelSpec(name="ctc-phon", kind=ModelKind.CTC, context="0", prior="priors/ctc-phon.prior"),
        ModelSpec(
            name="transducer-phon",
            kind=ModelKind.TRANSDUCER,
            unit=LabelUnit.PHON,
            context="1",
            ilm="ilms/transducer-phon.arpa",
            ilm_order="1",
            internal_lm="ilms/transducer-phon.arpa",
            internal_lm_order="1",
            internal_lm_weight=first,
        ),
        ModelSpec(
            name="transducer-bpe",
            kind=ModelKind.TRANSDUCER,
            unit=LabelUnit.BPE,
            context="∞",
            ilm="ilms/transducer-bpe.arpa",
            internal_lm="ilms/transducer-bpe.arpa",
            internal_lm_weight=full,
        ),
        ModelSpec(
            name="transducer-bpe-open",
            kind=ModelKind.TRANSDUCER,
            unit=LabelUnit.BPE,
            context="∞",
            vocab_mode=VocabMode.OPEN,
            ilm="ilms/transducer-bpe.arpa",
            internal_lm="ilms/transducer-bpe.arpa",
            internal_lm_weight=full,
        ),
        ModelSpec(
            name="aed-bpe",
            kind=ModelKind.AED,
            unit=LabelUnit.BPE,
            context="∞",
            ilm="ilms/aed-bpe.arpa",
            internal_lm="ilms/aed-bpe.arpa",
            internal_lm_weight=full,
        ),
    ]


def build_toy_world(seed: int = 0, settings: ToySettings | None = None) -> ToyWorld:
    """Generate every artifact of a toy experiment in memory.

    Raises:
        RuntimeError: no draw yielded a source BPE model covering all words
    """
    settings = settings or ToySettings()
    rng = np.random.default_rng(seed)
    for attempt in range(MAX_ATTEMPTS):
        words, corpora = _draw_text(rng, settings)
        all_words = words[SOURCE] + words["shared"] + words[TARGET]
        bpe = bpe_learn(corpora[f"{SOURCE}-train"], settings.bpe_merges)
        if _segmentable(bpe, all_words):
            break
        logger.debug(f"Toy draw {attempt} not covered by the source BPE model, redrawing")
    else:
        raise RuntimeError(f"no BPE-coverable toy world within {MAX_ATTEMPTS} draws")

    inventory = PhonemeInventory(bases=tuple(sorted(settings.bases)))
    lexicon = Lexicon.from_pronunciations({w: [list(w)] for w in all_words}, inventory)
    word_vocab = Vocabulary.from_words(sorted(all_words))
    subwords = sorted(bpe.vocab)
    subword_vocab = Vocabulary.from_words(subwords)

    word_lms: dict[str, NGramModel] = {}
    subword_lms: dict[str, NGramModel] = {}
    for domain in DOMAINS:
        train = corpora[f"{domain}-train"]
        word_lms[domain] = train_ngram(train, word_vocab, settings.word_lm_order)
        subword_lms[domain] = train_ngram(
            bpe_apply_corpus(bpe, train), subword_vocab, settings.subword_lm_order
        )

    source_train = corpora[f"{SOURCE}-train"].lines
    by_order = _estimate_priors(
        seed + 1, lexicon, list(source_train[: settings.prior_sentences]), settings
    )
    priors = {"fh-tri": by_order[3], "fh-di": by_order[2], "ctc-phon": by_order[1]}

    phone_transcripts = [
        reference_units(line, AcousticKind.PHON_BLANK, lexicon, None) for line in source_train
    ]
    bpe_transcripts = [bpe_apply(bpe, line) for line in source_train]
    ilms = {
        "transducer-phon": estimate_ilm(phone_transcripts, "1", labels=inventory.symbols),
        "transducer-bpe": estimate_ilm(bpe_transcripts, "inf", labels=subwords),
        "aed-bpe": estimate_ilm(bpe_transcripts, "inf", labels=subwords),
    }

    models = toy_models(settings)
    synth_sets: dict[tuple[str, AcousticKind], SynthSet] = {}
    for k, domain in enumerate(DOMAINS):
        for j, role in enumerate(EVAL_ROLES):
            name = f"{domain}-{role}"
            emitter = settings.emitter.model_copy(update={"seed": seed * 100 + 10 * k + j})
            for kind in AcousticKind:
                synth_sets[(name, kind)] = generate_synth_set(
                    name, corpora[name].lines, kind, emitter, lexicon, bpe
                )

    logger.info(
        f"Built toy world (seed {seed}): {len(all_words)} words, {len(bpe.vocab)} subwords"
    )
    return ToyWorld(
        seed=seed,
        settings=settings,
        words=words,
        corpora=corpora,
        lexicon=lexicon,
        bpe=bpe,
        word_lms=word_lms,
        subword_lms=subword_lms,
        priors=priors,
        ilms=ilms,
        models=models,
        synth_sets=synth_sets,
    )


def toy_experiment_spec(
    world: ToyWorld, manifests: dict[str, dict[AcousticKind, str]]
) -> ExperimentSpec:
    """Experiment over the toy files; `manifests` maps dataset name to manifest paths."""
    datasets = [
        DatasetSpec(
            name=f"{domain}-{role}",
            domain=domain,
            role=role,
            manifests=manifests[f"{domain}-{role}"],
        )
        for domain in DOMAINS
        for role in EVAL_ROLES
    ]
    return ExperimentSpec(
        schema=EXPERIMENT_SCHEMA,
        lexicon="lexicon.txt",
        bpe="bpe.txt",
        models=world.models,
        lms=[
            LmSpec(
                name=domain,
                domain=domain,
                word=f"lms/{domain}.word.arpa",
                subword=f"lms/{domain}.bpe.arpa",
            )
            for domain in DOMAINS
        ],
        datasets=datasets,
        grid=world.settings.grid,
        seeds=[world.seed],
    )


def write_toy_world(world: ToyWorld, directory: Path | str) -> Path:
    """Write the toy world as files; returns the path of its experiment.json."""
    directory = Path(directory)
    for sub in ("corpora", "lms", "priors", "ilms", "data"):
        (directory / sub).mkdir(parents=True, exist_ok=True)

    world.lexicon.save(directory / "lexicon.txt")
    world.bpe.save(directory / "bpe.txt")
    for name, corpus in world.corpora.items():
        corpus.save(directory / "corpora" / f"{name}.txt")
    for domain in DOMAINS:
        save_arpa(world.word_lms[domain], directory / "lms" / f"{domain}.word.arpa")
        save_arpa(world.subword_lms[domain], directory / "lms" / f"{domain}.bpe.arpa")
    for name, prior in world.priors.items():
        prior.save(directory / "priors" / f"{name}.prior")
    for name, ilm in world.ilms.items():
        ilm.save(directory / "ilms" / f"{name}.arpa")

    manifests: dict[str, dict[AcousticKind, str]] = {}
    for (name, kind), synth_set in world.synth_sets.items():
        manifest = save_synth_set(synth_set, directory / "data")
        manifests.setdefault(name, {})[kind] = manifest.relative_to(directory).as_posix()

    spec = toy_experiment_spec(world, manifests)
    path = directory / "experiment.json"
    with open(path, "w", encoding="utf-8") as f:
        f.write(spec.model_dump_json(by_alias=True, indent=2) + "\n")
    logger.info(f"Wrote toy world to {directory}")
    return path
