"""Synthetic acoustics standing in for a TTS front end, plus tau calibration."""

from seqshift.emitter.calibrate import (
    CalibrationResult,
    TauEvaluator,
    TauMeasurement,
    calibrate_tau,
    measure_tau,
)
from seqshift.emitter.synth import (
    acoustic_labels,
    frame_contexts,
    sample_durations,
    synth_factored_scores,
    synth_label_table,
    synth_posteriorgram,
    utterance_rng,
)
from seqshift.emitter.synth_set import (
    Acoustics,
    ManifestEntry,
    SynthItem,
    SynthSet,
    acoustic_files,
    generate_synth_set,
    load_acoustics,
    read_manifest,
    reference_units,
    save_synth_set,
    write_manifest,
)

__all__ = [
    "Acoustics",
    "CalibrationResult",
    "ManifestEntry",
    "SynthItem",
    "SynthSet",
    "TauEvaluator",
    "TauMeasurement",
    "acoustic_files",
    "acoustic_labels",
    "calibrate_tau",
    "frame_contexts",
    "generate_synth_set",
    "load_acoustics",
    "measure_tau",
    "read_manifest",
    "reference_units",
    "sample_durations",
    "save_synth_set",
    "synth_factored_scores",
    "synth_label_table",
    "synth_posteriorgram",
    "utterance_rng",
    "write_manifest",
]
