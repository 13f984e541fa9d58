"""Pydantic models for decoder, emitter and experiment configuration."""

import itertools
from enum import Enum
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

EXPERIMENT_SCHEMA = "seqshift-exp/1"
RESULTS_SCHEMA = "seqshift-results/1"


class VocabMode(str, Enum):
    """Search space of a decoder."""

    CLOSED = "closed"
    OPEN = "open"


class ModelKind(str, Enum):
    """Decision rules supported by the search module."""

    CTC = "ctc"
    FH_DI = "fh_di"
    FH_TRI = "fh_tri"
    TRANSDUCER = "transducer"
    AED = "aed"


class LabelUnit(str, Enum):
    """Output label unit of a model."""

    PHON = "phon"
    BPE = "bpe"


class AcousticKind(str, Enum):
    """Kinds of synthetic acoustic artifacts a dataset provides."""

    FACTORED = "factored"
    PHON_BLANK = "phon-blank"
    BPE_BLANK = "bpe-blank"
    BPE_LABEL = "bpe-label"


class DecodeConfig(BaseModel):
    """Score combination exponents and pruning for one decoding run."""

    model_config = ConfigDict(frozen=True)

    lm_scale: float = Field(default=1.0, ge=0.0, allow_inf_nan=False, description="lambda")
    prior_scale: float = Field(
        default=0.0, ge=0.0, allow_inf_nan=False, description="alpha, prior or ILM exponent"
    )
    transition_scale: float = Field(default=1.0, ge=0.0, allow_inf_nan=False, description="beta")
    length_norm: float = Field(default=0.0, ge=0.0, allow_inf_nan=False, description="delta")
    beam_size: int = Field(default=16, ge=1)
    score_pruning: float | None = Field(default=None, gt=0.0, allow_inf_nan=False)
    vocab_mode: VocabMode = VocabMode.CLOSED
    max_label_steps: int | None = Field(
        default=None, ge=1, description="Label-synchronous step limit, end step included"
    )


class EmitterConfig(BaseModel):
    """Synthetic posteriorgram generation parameters."""

    model_config = ConfigDict(frozen=True)

    tau: float = Field(default=0.0, ge=0.0, allow_inf_nan=False, description="Noise temperature")
    gain: float = Field(default=4.0, ge=0.0, allow_inf_nan=False, description="Reference gain g")
    frames_per_label: int = Field(default=2, ge=1)
    duration_table: dict[str, int] | None = Field(
        default=None, description="Per-label frame counts overriding frames_per_label"
    )
    seed: int = 0
    gain_jitter: float = Field(
        default=0.0, ge=0.0, allow_inf_nan=False, description="Log-normal per-utterance gain spread"
    )

    @field_validator("duration_table")
    @classmethod
    def _durations_positive(cls, value: dict[str, int] | None) -> dict[str, int] | None:
        if value is not None and any(d < 1 for d in value.values()):
            raise ValueError("durations must be >= 1")
        return value


class ModelSpec(BaseModel):
    """One acoustic model of the comparative scenario."""

    name: str
    kind: ModelKind
    unit: LabelUnit = LabelUnit.PHON
    context: str = Field(default="0", description="Label context shown in reports")
    vocab_mode: VocabMode = VocabMode.CLOSED
    prior: str | None = Field(default=None, description="Context prior file (ctc, fh)")
    ilm: str | None = Field(default=None, description="ILM estimate (ARPA over labels)")
    ilm_order: Literal["0", "1", "inf"] = "inf"
    internal_lm: str | None = Field(
        default=None, description="Label LM biasing the toy scorer (ARPA over labels)"
    )
    internal_lm_order: Literal["0", "1", "inf"] = "inf"
    internal_lm_weight: float = Field(default=0.0, ge=0.0)
    transition_loop: float = Field(default=0.5, gt=0.0, lt=1.0)
    silence: bool = Field(default=False, description="Optional silence between words (fh)")

    @model_validator(mode="after")
    def _check_units(self) -> "ModelSpec":
        if self.kind in (ModelKind.CTC, ModelKind.FH_DI, ModelKind.FH_TRI):
            if self.unit is not LabelUnit.PHON:
                raise ValueError(f"{self.kind.value} models use phoneme labels")
            if self.vocab_mode is not VocabMode.CLOSED:
                raise ValueError(f"{self.kind.value} models decode with a closed vocabulary")
        if self.kind is ModelKind.AED and self.unit is not LabelUnit.BPE:
            raise ValueError("aed models use BPE labels")
        if (
            self.kind is ModelKind.TRANSDUCER
            and self.vocab_mode is VocabMode.OPEN
            and self.unit is not LabelUnit.BPE
        ):
            raise ValueError("open-vocabulary transducers use BPE labels")
        return self

    @property
    def acoustic_kind(self) -> AcousticKind:
        if self.kind in (ModelKind.FH_DI, ModelKind.FH_TRI):
            return AcousticKind.FACTORED
        if self.kind is ModelKind.AED:
            return AcousticKind.BPE_LABEL
        if self.unit is LabelUnit.BPE:
            return AcousticKind.BPE_BLANK
        return AcousticKind.PHON_BLANK


class LmSpec(BaseModel):
    """An external LM, word level plus an optional subword version."""

    name: str
    domain: str
    word: str = Field(description="Word-level ARPA file")
    subword: str | None = Field(default=None, description="BPE-level ARPA file")


class DatasetSpec(BaseModel):
    """A synthetic dev or test set."""

    name: str
    domain: str
    role: Literal["dev", "test"]
    manifests: dict[AcousticKind, str] = Field(default_factory=dict)


class DecodeGrid(BaseModel):
    """Tuning grid searched on dev data."""

    lm_scale: list[float] = Field(default_factory=lambda: [0.4, 0.6, 0.8, 1.0, 1.2])
    prior_scale: list[float] = Field(default_factory=lambda: [0.0, 0.2, 0.4, 0.6])
    length_norm: list[float] = Field(default_factory=lambda: [0.0, 0.5, 1.0])
    transition_scale: float = 1.0
    beam_size: int = Field(default=16, ge=1)
    score_pruning: float | None = None

    @field_validator("lm_scale", "prior_scale", "length_norm")
    @classmethod
    def _non_empty(cls, value: list[float]) -> list[float]:
        if not value:
            raise ValueError("grid axes must be non-empty")
        if any(v < 0 for v in value):
            raise ValueError("grid values must be >= 0")
        return value

    def configs(self, model: ModelSpec) -> list[DecodeConfig]:
        """Expand the grid for a model; axes the model does not use collapse to 0."""
        uses_alpha = bool(model.prior or model.ilm)
        alphas = self.prior_scale if uses_alpha else [0.0]
        deltas = self.length_norm if model.kind is ModelKind.AED else [0.0]
        return [
            DecodeConfig(
                lm_scale=lm,
                prior_scale=alpha,
                transition_scale=self.transition_scale,
                length_norm=delta,
                beam_size=self.beam_size,
                score_pruning=self.score_pruning,
                vocab_mode=model.vocab_mode,
            )
            for lm, alpha, delta in itertools.product(
                sorted(set(self.lm_scale)), sorted(set(alphas)), sorted(set(deltas))
            )
        ]


class ExperimentSpec(BaseModel):
    """Comparative domain-shift experiment."""

    schema_version: Literal["seqshift-exp/1"] = Field(alias="schema")
    lexicon: str
    bpe: str | None = None
    models: list[ModelSpec]
    lms: list[LmSpec]
    datasets: list[DatasetSpec]
    grid: DecodeGrid = Field(default_factory=DecodeGrid)
    seeds: list[int] = Field(default_factory=lambda: [0])

    model_config = ConfigDict(populate_by_name=True)

    @model_validator(mode="after")
    def _check_references(self) -> "ExperimentSpec":
        if not self.models or not self.lms or not self.datasets:
            raise ValueError("models, lms and datasets must be non-empty")
        names = [m.name for m in self.models]
        if len(set(names)) != len(names):
            raise ValueError("model names must be unique")
        for dataset in self.datasets:
            for model in self.models:
                if model.acoustic_kind not in dataset.manifests:
                    raise ValueError(
                        f"dataset {dataset.name} lacks {model.acoustic_kind.value} "
                        f"acoustics for model {model.name}"
                    )
        needs_bpe = any(m.unit is LabelUnit.BPE for m in self.models)
        if needs_bpe and self.bpe is None:
            raise ValueError("BPE models require a bpe model file")
        needs_subword = any(
            m.kind is ModelKind.AED or m.vocab_mode is VocabMode.OPEN for m in self.models
        )
        if needs_subword and any(lm.subword is None for lm in self.lms):
            raise ValueError("open-vocabulary models require subword LMs")
        return self

    def referenced_paths(self) -> list[str]:
        """All file paths the experiment reads, in declaration order."""
        paths = [self.lexicon]
        if self.bpe:
            paths.append(self.bpe)
        for model in self.models:
            paths.extend(p for p in (model.prior, model.ilm, model.internal_lm) if p)
        for lm in self.lms:
            paths.append(lm.word)
            if lm.subword:
                paths.append(lm.subword)
        for dataset in self.datasets:
            paths.extend(dataset.manifests.values())
        return paths


class CellResult(BaseModel):
    """Aggregated WER of one (model, LM, dataset) cell."""

    model: str
    lm: str
    dataset: str
    role: Literal["dev", "test"]
    config: DecodeConfig
    substitutions: int = Field(ge=0)
    insertions: int = Field(ge=0)
    deletions: int = Field(ge=0)
    ref_length: int = Field(ge=0)

    @property
    def wer(self) -> float:
        errors = self.substitutions + self.insertions + self.deletions
        if self.ref_length == 0:
            return 0.0 if errors == 0 else float("inf")
        return errors / self.ref_length


class ModelRow(BaseModel):
    """Row header of a result table."""

    name: str
    unit: str
    context: str


class ExperimentResults(BaseModel):
    """Serialized result matrix of an experiment."""

    schema_version: Literal["seqshift-results/1"] = Field(default=RESULTS_SCHEMA, alias="schema")
    models: list[ModelRow]
    lms: list[str]
    datasets: list[str]
    cells: list[CellResult]

    model_config = ConfigDict(populate_by_name=True)

    def cell(self, model: str, lm: str, dataset: str) -> CellResult | None:
        for cell in self.cells:
            if (cell.model, cell.lm, cell.dataset) == (model, lm, dataset):
                return cell
        return None
