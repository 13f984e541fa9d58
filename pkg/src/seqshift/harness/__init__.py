"""Evaluation and experiment orchestration."""

from seqshift.harness.decoders import ModelDecoder
from seqshift.harness.experiment import (
    CtcTauEvaluator,
    Experiment,
    check_artifacts,
    load_experiment,
    load_results,
    read_experiment_spec,
    run_experiment,
    save_results,
    select_config,
)
from seqshift.harness.report import (
    ReportFormat,
    emit_corpus_info,
    emit_domain_stats,
    emit_profile_report,
    emit_report,
    emit_subword_ppl,
    format_wer,
    parse_tsv_report,
)
from seqshift.harness.runner import (
    DatasetResult,
    UtteranceResult,
    UtteranceRunner,
    decode_dataset,
    load_items,
)
from seqshift.harness.stats import DomainStats, domain_stats, subword_ppl_rows
from seqshift.harness.toy import ToySettings, ToyWorld, build_toy_world, write_toy_world
from seqshift.harness.wer import (
    WerReport,
    aggregate,
    compute_wer,
    corpus_wer,
    error_profile,
    error_profile_delta,
)

__all__ = [
    "CtcTauEvaluator",
    "DatasetResult",
    "DomainStats",
    "Experiment",
    "ModelDecoder",
    "ReportFormat",
    "ToySettings",
    "ToyWorld",
    "UtteranceResult",
    "UtteranceRunner",
    "WerReport",
    "aggregate",
    "build_toy_world",
    "check_artifacts",
    "compute_wer",
    "corpus_wer",
    "decode_dataset",
    "domain_stats",
    "emit_corpus_info",
    "emit_domain_stats",
    "emit_profile_report",
    "emit_report",
    "emit_subword_ppl",
    "error_profile",
    "error_profile_delta",
    "format_wer",
    "load_experiment",
    "load_items",
    "load_results",
    "parse_tsv_report",
    "read_experiment_spec",
    "run_experiment",
    "save_results",
    "select_config",
    "subword_ppl_rows",
    "write_toy_world",
]
