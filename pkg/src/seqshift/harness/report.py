"""Result tables as markdown or TSV.

Output is byte-deterministic: column order follows declaration order in the results,
numbers use fixed formats and lines end with a single newline.
"""

from collections.abc import Sequence
from enum import Enum

from seqshift.errors import ProfileUndefinedError, SeqshiftValidationError
from seqshift.harness.stats import DomainStats, SubwordPplRow
from seqshift.harness.wer import WerReport, error_profile
from seqshift.models import CellResult, ExperimentResults

MISSING = "-"
WER_COLUMNS = ("model", "unit", "ctx", "lm")


class ReportFormat(str, Enum):
    MARKDOWN = "markdown"
    TSV = "tsv"


def format_wer(wer: float) -> str:
    """WER as a percentage with one decimal: 0.059 -> '5.9'."""
    return f"{wer * 100:.1f}"


def format_rate(fraction: float) -> str:
    return f"{fraction * 100:.1f}"


def format_ppl(ppl: float) -> str:
    return f"{ppl:.0f}"


def render_table(
    header: Sequence[str],
    rows: Sequence[Sequence[str]],
    fmt: ReportFormat | str,
    numeric_from: int = 0,
) -> str:
    """Render rows; in markdown, columns from `numeric_from` on are right-aligned."""
    fmt = ReportFormat(fmt)
    if fmt is ReportFormat.TSV:
        lines = ["\t".join(header), *("\t".join(row) for row in rows)]
        return "\n".join(lines) + "\n"
    rule = ["---:" if i >= numeric_from else "---" for i in range(len(header))]
    lines = [
        "| " + " | ".join(header) + " |",
        "|" + "|".join(rule) + "|",
        *("| " + " | ".join(row) + " |" for row in rows),
    ]
    return "\n".join(lines) + "\n"


def _cell_report(cell: CellResult) -> WerReport:
    return WerReport(
        substitutions=cell.substitutions,
        insertions=cell.insertions,
        deletions=cell.deletions,
        ref_length=cell.ref_length,
    )


def emit_report(results: ExperimentResults, fmt: ReportFormat | str = ReportFormat.MARKDOWN) -> str:
    """WER table: one row per (model, LM), one column per dataset."""
    if not results.cells:
        raise SeqshiftValidationError("no results to report")
    header = [*WER_COLUMNS, *results.datasets]
    rows = []
    for model in results.models:
        for lm in results.lms:
            if not any(c.model == model.name and c.lm == lm for c in results.cells):
                continue
            row = [model.name, model.unit, model.context, lm]
            for dataset in results.datasets:
                cell = results.cell(model.name, lm, dataset)
                row.append(format_wer(cell.wer) if cell is not None else MISSING)
            rows.append(row)
    return render_table(header, rows, fmt, numeric_from=len(WER_COLUMNS))


def parse_tsv_report(text: str) -> dict[tuple[str, str, str], float]:
    """Read an emitted TSV report back into {(model, lm, dataset): WER fraction}."""
    lines = [line for line in text.splitlines() if line]
    if not lines:
        raise SeqshiftValidationError("empty report")
    header = lines[0].split("\t")
    if tuple(header[: len(WER_COLUMNS)]) != WER_COLUMNS:
        raise SeqshiftValidationError(f"unexpected report header: {header}")
    datasets = header[len(WER_COLUMNS) :]
    values: dict[tuple[str, str, str], float] = {}
    for line_no, line in enumerate(lines[1:], start=2):
        fields = line.split("\t")
        if len(fields) != len(header):
            raise SeqshiftValidationError(f"malformed report line {line_no}")
        model, lm = fields[0], fields[3]
        for dataset, value in zip(datasets, fields[len(WER_COLUMNS) :], strict=True):
            if value != MISSING:
                values[(model, lm, dataset)] = float(value) / 100
    return values


def emit_profile_report(
    results: ExperimentResults, fmt: ReportFormat | str = ReportFormat.MARKDOWN
) -> str:
    """S/I/D shares of the errors in every cell."""
    header = ["model", "lm", "dataset", "wer", "sub", "ins", "del"]
    rows = []
    for cell in results.cells:
        report = _cell_report(cell)
        try:
            shares = [format_rate(share) for share in error_profile(report)]
        except ProfileUndefinedError:
            shares = [MISSING] * 3
        rows.append([cell.model, cell.lm, cell.dataset, format_wer(report.wer), *shares])
    return render_table(header, rows, fmt, numeric_from=3)


def emit_domain_stats(stats: DomainStats, fmt: ReportFormat | str = ReportFormat.MARKDOWN) -> str:
    """OOV [%] and PPL column pairs per corpus, one row per LM."""
    header = ["lm"]
    for info in stats.corpora:
        header.extend([f"{info.name} OOV", f"{info.name} PPL"])
    rows = []
    for lm in stats.lms:
        row = [lm]
        for info in stats.corpora:
            entry = stats.get(lm, info.name)
            row.extend([format_rate(entry.oov), format_ppl(entry.ppl)])
        rows.append(row)
    return render_table(header, rows, fmt, numeric_from=1)


def emit_corpus_info(stats: DomainStats, fmt: ReportFormat | str = ReportFormat.MARKDOWN) -> str:
    """Running words, vocabulary size and, when known, subword tokens per word."""
    with_ratio = any(info.token_word_ratio is not None for info in stats.corpora)
    header = ["corpus", "words", "vocab"] + (["tokens/word"] if with_ratio else [])
    rows = []
    for info in stats.corpora:
        row = [info.name, str(info.running_words), str(info.vocab_size)]
        if with_ratio:
            ratio = info.token_word_ratio
            row.append(f"{ratio:.2f}" if ratio is not None else MISSING)
        rows.append(row)
    return render_table(header, rows, fmt, numeric_from=1)


def emit_subword_ppl(
    rows: Sequence[SubwordPplRow], fmt: ReportFormat | str = ReportFormat.MARKDOWN
) -> str:
    header = ["lm", "corpus", "word PPL", "subword PPL", "renormalized PPL"]
    body = [
        [
            row.lm,
            row.corpus,
            format_ppl(row.word_ppl),
            f"{row.subword_ppl:.2f}",
            format_ppl(row.renormalized_ppl),
        ]
        for row in rows
    ]
    return render_table(header, body, fmt, numeric_from=2)
