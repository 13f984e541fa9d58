"""Concurrent utterance decoding with deterministic result order."""

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from functools import partial

import anyio
import anyio.to_thread

from seqshift.emitter import Acoustics, ManifestEntry, SynthItem, load_acoustics
from seqshift.errors import SeqshiftRuntimeError
from seqshift.harness.wer import WerReport, corpus_wer
from seqshift.models import AcousticKind
from seqshift.search import DecodeResult

logger = logging.getLogger(__name__)

DecodeFn = Callable[[Acoustics], DecodeResult]


@dataclass(frozen=True)
class UtteranceResult:
    """Decoding outcome of one utterance; `error` is set when the decoder gave up."""

    utt_id: str
    reference: tuple[str, ...]
    hypothesis: tuple[str, ...]
    score: float | None = None
    error: str | None = None


@dataclass
class DatasetResult:
    results: list[UtteranceResult]
    report: WerReport

    @property
    def wer(self) -> float:
        return self.report.wer


class UtteranceRunner:
    """Decodes the utterances of a dataset on worker threads.

    At most `threads` utterances are in flight; results come back sorted by utterance
    id whatever the completion order. A decoder runtime error on one utterance is
    recorded as an empty hypothesis and does not stop the others.
    """

    def __init__(self, decode: DecodeFn, threads: int = 1):
        if threads < 1:
            raise ValueError(f"threads must be >= 1, got {threads}")
        self.decode = decode
        self.threads = threads

    def _decode_one(self, item: SynthItem) -> UtteranceResult:
        try:
            result = self.decode(item.acoustics)
        except SeqshiftRuntimeError as e:
            logger.warning(f"{item.utt_id}: {e}")
            return UtteranceResult(item.utt_id, item.words, (), error=str(e))
        logger.debug(f"{item.utt_id}: {result.text!r} ({result.score:.3f})")
        return UtteranceResult(item.utt_id, item.words, result.words, result.score)

    async def run(self, items: Sequence[SynthItem]) -> list[UtteranceResult]:
        limiter = anyio.CapacityLimiter(self.threads)
        results: dict[str, UtteranceResult] = {}

        async def worker(item: SynthItem) -> None:
            results[item.utt_id] = await anyio.to_thread.run_sync(
                partial(self._decode_one, item), limiter=limiter
            )

        async with anyio.create_task_group() as tg:
            for item in items:
                tg.start_soon(worker, item)
        return [results[utt_id] for utt_id in sorted(results)]


def score_results(results: Sequence[UtteranceResult]) -> WerReport:
    return corpus_wer(
        [r.reference for r in results],
        [r.hypothesis for r in results],
        [r.utt_id for r in results],
    )


def decode_dataset(decode: DecodeFn, items: Sequence[SynthItem], threads: int = 1) -> DatasetResult:
    """Synchronous wrapper: decode every item and score the hypotheses."""
    runner = UtteranceRunner(decode, threads)
    results = anyio.run(runner.run, items)
    return DatasetResult(results=results, report=score_results(results))


def load_items(entries: Sequence[ManifestEntry], kind: AcousticKind | str) -> list[SynthItem]:
    return [
        SynthItem(utt_id=entry.utt_id, words=entry.words, acoustics=load_acoustics(entry, kind))
        for entry in entries
    ]
