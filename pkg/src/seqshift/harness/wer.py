"""Word error rate with substitution/insertion/deletion breakdown."""

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import Enum

from seqshift.errors import ProfileUndefinedError

logger = logging.getLogger(__name__)


class EditOp(str, Enum):
    MATCH = "match"
    SUBSTITUTION = "sub"
    INSERTION = "ins"
    DELETION = "del"


@dataclass(frozen=True)
class UtteranceErrors:
    utt_id: str
    substitutions: int
    insertions: int
    deletions: int
    ref_length: int

    @property
    def errors(self) -> int:
        return self.substitutions + self.insertions + self.deletions


@dataclass
class WerReport:
    """Aggregated error counts; `utterances` keeps the per-utterance breakdown."""

    substitutions: int = 0
    insertions: int = 0
    deletions: int = 0
    ref_length: int = 0
    utterances: list[UtteranceErrors] = field(default_factory=list)
    alignment: list[tuple[EditOp, str | None, str | None]] = field(default_factory=list)

    @property
    def errors(self) -> int:
        return self.substitutions + self.insertions + self.deletions

    @property
    def wer(self) -> float:
        if self.ref_length == 0:
            return 0.0 if self.errors == 0 else float("inf")
        return self.errors / self.ref_length

    def add(self, other: "WerReport", utt_id: str | None = None) -> None:
        self.substitutions += other.substitutions
        self.insertions += other.insertions
        self.deletions += other.deletions
        self.ref_length += other.ref_length
        if utt_id is not None:
            self.utterances.append(
                UtteranceErrors(
                    utt_id,
                    other.substitutions,
                    other.insertions,
                    other.deletions,
                    other.ref_length,
                )
            )
        else:
            self.utterances.extend(other.utterances)


def compute_wer(reference: Sequence[str], hypothesis: Sequence[str]) -> WerReport:
    """Levenshtein alignment with unit costs.

    Among minimal-cost alignments the one with fewer insertions plus deletions wins.
    The alignment is traced from the left end with the diagonal move preferred, which
    places substitutions leftmost.
    """
    # aligned back to front so the trace below walks the original order
    ref, hyp = reference[::-1], hypothesis[::-1]
    n, m = len(ref), len(hyp)
    # cost[i][j] = (edits, insertions + deletions)
    cost = [[(0, 0)] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        cost[i][0] = (i, i)
    for j in range(1, m + 1):
        cost[0][j] = (j, j)
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            e, g = cost[i - 1][j - 1]
            diagonal = (e, g) if ref[i - 1] == hyp[j - 1] else (e + 1, g)
            e, g = cost[i - 1][j]
            deletion = (e + 1, g + 1)
            e, g = cost[i][j - 1]
            insertion = (e + 1, g + 1)
            cost[i][j] = min(diagonal, deletion, insertion)

    report = WerReport(ref_length=n)
    ops: list[tuple[EditOp, str | None, str | None]] = []
    i, j = n, m
    while i > 0 or j > 0:
        here = cost[i][j]
        if i > 0 and j > 0:
            same = ref[i - 1] == hyp[j - 1]
            e, g = cost[i - 1][j - 1]
            if (e if same else e + 1, g) == here:
                op = EditOp.MATCH if same else EditOp.SUBSTITUTION
                ops.append((op, ref[i - 1], hyp[j - 1]))
                if not same:
                    report.substitutions += 1
                i, j = i - 1, j - 1
                continue
        if i > 0:
            e, g = cost[i - 1][j]
            if (e + 1, g + 1) == here:
                ops.append((EditOp.DELETION, ref[i - 1], None))
                report.deletions += 1
                i -= 1
                continue
        ops.append((EditOp.INSERTION, None, hyp[j - 1]))
        report.insertions += 1
        j -= 1
    report.alignment = ops
    return report


def corpus_wer(
    references: Sequence[Sequence[str]],
    hypotheses: Sequence[Sequence[str]],
    utt_ids: Sequence[str] | None = None,
) -> WerReport:
    """Aggregate counts over utterances; the WER is total errors over total words."""
    if len(references) != len(hypotheses):
        raise ValueError(f"{len(references)} references but {len(hypotheses)} hypotheses")
    ids = utt_ids if utt_ids is not None else [str(i) for i in range(len(references))]
    total = WerReport()
    for utt_id, ref, hyp in zip(ids, references, hypotheses, strict=True):
        total.add(compute_wer(ref, hyp), utt_id=utt_id)
    logger.debug(f"WER {total.wer:.4f} over {len(references)} utterances")
    return total


def aggregate(reports: Iterable[WerReport]) -> WerReport:
    total = WerReport()
    for report in reports:
        total.add(report)
    return total


def error_profile(report: WerReport) -> tuple[float, float, float]:
    """(substitution, insertion, deletion) shares of all errors."""
    if report.errors == 0:
        raise ProfileUndefinedError()
    errors = report.errors
    return (
        report.substitutions / errors,
        report.insertions / errors,
        report.deletions / errors,
    )


def error_profile_delta(first: WerReport, second: WerReport) -> float:
    """Largest absolute difference between the two error profiles."""
    return max(abs(a - b) for a, b in zip(error_profile(first), error_profile(second), strict=True))
