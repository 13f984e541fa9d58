"""Comparative domain-shift experiment: tune on dev, apply to test, collect WERs."""

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path

from seqshift.emitter import SynthItem, acoustic_files, generate_synth_set, read_manifest
from seqshift.errors import MissingArtifactError, SeqshiftValidationError
from seqshift.harness.decoders import ModelDecoder
from seqshift.harness.runner import decode_dataset, load_items
from seqshift.harness.wer import WerReport, aggregate
from seqshift.lexicon import Lexicon
from seqshift.lm import LanguageModel, NGramModel, load_arpa
from seqshift.models import (
    AcousticKind,
    CellResult,
    DatasetSpec,
    DecodeConfig,
    EmitterConfig,
    ExperimentResults,
    ExperimentSpec,
    LmSpec,
    ModelKind,
    ModelRow,
    ModelSpec,
)
from seqshift.text import BpeModel

logger = logging.getLogger(__name__)


def read_experiment_spec(path: Path | str) -> ExperimentSpec:
    with open(path, encoding="utf-8") as f:
        return ExperimentSpec.model_validate_json(f.read())


def _relative(path: Path, base_dir: Path) -> str:
    try:
        return path.relative_to(base_dir).as_posix()
    except ValueError:
        return str(path)


def check_artifacts(spec: ExperimentSpec, base_dir: Path | str) -> None:
    """Raise MissingArtifactError listing every referenced path that does not exist.

    Manifests of the acoustic kinds some model decodes are opened and every utterance
    file they list is checked as well.
    """
    base_dir = Path(base_dir)
    missing = [p for p in spec.referenced_paths() if not (base_dir / p).exists()]
    used = {m.acoustic_kind for m in spec.models}
    triphone = any(m.kind is ModelKind.FH_TRI for m in spec.models)
    for dataset in spec.datasets:
        for kind, rel in dataset.manifests.items():
            manifest = base_dir / rel
            if kind not in used or not manifest.exists():
                continue
            for entry in read_manifest(manifest):
                missing.extend(
                    _relative(p, base_dir)
                    for p in acoustic_files(entry, kind, triphone=triphone)
                    if not p.exists()
                )
    if missing:
        raise MissingArtifactError(missing)


def select_config(candidates: Sequence[tuple[DecodeConfig, WerReport]]) -> DecodeConfig:
    """Dev-WER argmin; ties go to the smaller lambda, then alpha, then delta."""
    if not candidates:
        raise SeqshiftValidationError("no tuning candidates")
    best, _ = min(
        candidates,
        key=lambda item: (
            item[1].wer,
            item[0].lm_scale,
            item[0].prior_scale,
            item[0].length_norm,
        ),
    )
    return best


@dataclass(frozen=True, eq=False)
class LoadedLm:
    spec: LmSpec
    word: NGramModel
    subword: NGramModel | None


@dataclass(eq=False)
class Experiment:
    """An experiment spec with its artifacts loaded."""

    spec: ExperimentSpec
    base_dir: Path
    decoders: dict[str, ModelDecoder]
    lms: dict[str, LoadedLm]
    threads: int = 1
    _items: dict[tuple[str, AcousticKind], list[SynthItem]] = field(default_factory=dict)
    _reports: dict[tuple[str, str, str, str], WerReport] = field(default_factory=dict)

    def items(self, dataset: DatasetSpec, kind: AcousticKind) -> list[SynthItem]:
        key = (dataset.name, kind)
        if key not in self._items:
            manifest = self.base_dir / dataset.manifests[kind]
            self._items[key] = load_items(read_manifest(manifest), kind)
        return self._items[key]

    def lm_for(self, decoder: ModelDecoder, lm: LoadedLm) -> LanguageModel:
        if decoder.uses_subword_lm:
            if lm.subword is None:
                raise SeqshiftValidationError(f"model {decoder.spec.name} needs a subword LM")
            return lm.subword
        return lm.word

    def evaluate(
        self, model: ModelSpec, lm: LoadedLm, dataset: DatasetSpec, cfg: DecodeConfig
    ) -> WerReport:
        key = (model.name, lm.spec.name, dataset.name, cfg.model_dump_json())
        report = self._reports.get(key)
        if report is None:
            decoder = self.decoders[model.name]
            decode = partial(decoder.decode, lm=self.lm_for(decoder, lm), cfg=cfg)
            items = self.items(dataset, model.acoustic_kind)
            report = decode_dataset(decode, items, self.threads).report
            self._reports[key] = report
        return report

    def tune(self, model: ModelSpec, lm: LoadedLm, devs: Sequence[DatasetSpec]) -> DecodeConfig:
        """Grid search on dev data only."""
        configs = self.spec.grid.configs(model)
        if not devs:
            logger.warning(f"No dev set for {model.name}/{lm.spec.name}, using the first config")
            return configs[0]
        candidates = [
            (cfg, aggregate(self.evaluate(model, lm, dev, cfg) for dev in devs)) for cfg in configs
        ]
        selected = select_config(candidates)
        logger.info(
            f"{model.name}/{lm.spec.name}: lambda={selected.lm_scale} "
            f"alpha={selected.prior_scale} delta={selected.length_norm}"
        )
        return selected


def load_experiment(path: Path | str, threads: int = 1) -> Experiment:
    """Read and validate an experiment file and load everything it references.

    Relative paths resolve against the directory of the experiment file.

    Raises:
        MissingArtifactError: before anything is loaded, if a referenced file is missing
    """
    path = Path(path)
    spec = read_experiment_spec(path)
    base_dir = path.parent
    check_artifacts(spec, base_dir)

    lexicon = Lexicon.load(base_dir / spec.lexicon)
    bpe = BpeModel.load(base_dir / spec.bpe) if spec.bpe else None
    decoders = {m.name: ModelDecoder.load(m, lexicon, bpe, base_dir) for m in spec.models}
    lms = {
        lm.name: LoadedLm(
            spec=lm,
            word=load_arpa(base_dir / lm.word),
            subword=load_arpa(base_dir / lm.subword) if lm.subword else None,
        )
        for lm in spec.lms
    }
    logger.info(
        f"Loaded experiment with {len(decoders)} models, {len(lms)} LMs, "
        f"{len(spec.datasets)} datasets"
    )
    return Experiment(spec=spec, base_dir=base_dir, decoders=decoders, lms=lms, threads=threads)


def run_experiment(experiment: Experiment) -> ExperimentResults:
    """Decode every (model, LM, dataset) cell.

    Each (model, LM) pair is tuned separately per domain on that domain's dev sets; the
    selected config then decodes all datasets of the domain. Test sets never take part
    in tuning.
    """
    spec = experiment.spec
    cells: list[CellResult] = []
    for model in spec.models:
        for lm_spec in spec.lms:
            lm = experiment.lms[lm_spec.name]
            selected: dict[str, DecodeConfig] = {}
            for dataset in spec.datasets:
                if dataset.domain not in selected:
                    devs = [
                        d for d in spec.datasets if d.domain == dataset.domain and d.role == "dev"
                    ]
                    selected[dataset.domain] = experiment.tune(model, lm, devs)
                cfg = selected[dataset.domain]
                report = experiment.evaluate(model, lm, dataset, cfg)
                cells.append(
                    CellResult(
                        model=model.name,
                        lm=lm_spec.name,
                        dataset=dataset.name,
                        role=dataset.role,
                        config=cfg,
                        substitutions=report.substitutions,
                        insertions=report.insertions,
                        deletions=report.deletions,
                        ref_length=report.ref_length,
                    )
                )
                logger.info(
                    f"{model.name} | {lm_spec.name} | {dataset.name}: WER {report.wer * 100:.1f}"
                )
    return ExperimentResults(
        models=[ModelRow(name=m.name, unit=m.unit.value, context=m.context) for m in spec.models],
        lms=[lm.name for lm in spec.lms],
        datasets=[d.name for d in spec.datasets],
        cells=cells,
    )


def save_results(results: ExperimentResults, path: Path | str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(results.model_dump_json(by_alias=True, indent=2) + "\n")


def load_results(path: Path | str) -> ExperimentResults:
    with open(path, encoding="utf-8") as f:
        return ExperimentResults.model_validate_json(f.read())


class CtcTauEvaluator:
    """WER of the CTC decoder on phoneme-blank data synthesized at a given tau and seed.

    Every evaluated report is kept so callers can inspect the error profile at the
    selected temperature.
    """

    def __init__(
        self,
        lexicon: Lexicon,
        lm: LanguageModel,
        references: Sequence[Sequence[str]],
        emitter: EmitterConfig | None = None,
        decode_cfg: DecodeConfig | None = None,
        threads: int = 1,
    ):
        self.lexicon = lexicon
        self.lm = lm
        self.references = [tuple(r) for r in references]
        self.emitter = emitter or EmitterConfig()
        self.decode_cfg = decode_cfg or DecodeConfig()
        self.threads = threads
        self.decoder = ModelDecoder.build(ModelSpec(name="ctc", kind=ModelKind.CTC), lexicon, None)
        self.reports: dict[tuple[float, int], WerReport] = {}

    def __call__(self, tau: float, seed: int) -> float:
        cfg = self.emitter.model_copy(update={"tau": tau, "seed": seed})
        synth = generate_synth_set(
            "calibration", self.references, AcousticKind.PHON_BLANK, cfg, self.lexicon
        )
        decode = partial(self.decoder.decode, lm=self.lm, cfg=self.decode_cfg)
        report = decode_dataset(decode, synth.items, self.threads).report
        self.reports[(tau, seed)] = report
        return report.wer

    def report_at(self, tau: float) -> WerReport:
        """Counts aggregated over the seeds evaluated at `tau`."""
        return aggregate(r for (t, _), r in self.reports.items() if t == tau)
