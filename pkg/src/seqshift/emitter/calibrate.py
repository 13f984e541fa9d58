"""Temperature calibration: find the tau whose mean decoding WER matches a target."""

import logging
import statistics
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

from seqshift.errors import CalibrationError

logger = logging.getLogger(__name__)

# (tau, seed) -> WER of the decoder on data synthesized with that tau and seed
TauEvaluator = Callable[[float, int], float]

DEFAULT_SEEDS = (0, 1, 2, 3, 4)
DEFAULT_MAX_ITERATIONS = 30


@dataclass(frozen=True)
class TauMeasurement:
    tau: float
    mean_wer: float
    spread: float


@dataclass
class CalibrationResult:
    """Selected tau with its mean WER and the across-seed WER spread (max - min)."""

    tau: float
    mean_wer: float
    spread: float
    measurements: list[TauMeasurement] = field(default_factory=list)


def measure_tau(evaluate: TauEvaluator, tau: float, seeds: Sequence[int]) -> TauMeasurement:
    wers = [evaluate(tau, seed) for seed in seeds]
    measured = TauMeasurement(
        tau=tau, mean_wer=statistics.fmean(wers), spread=max(wers) - min(wers)
    )
    logger.debug(f"tau={tau:.4f}: mean WER {measured.mean_wer:.4f} (spread {measured.spread:.4f})")
    return measured


def calibrate_tau(
    evaluate: TauEvaluator,
    target_wer: float,
    tolerance: float,
    tau_max: float = 8.0,
    seeds: Sequence[int] = DEFAULT_SEEDS,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> CalibrationResult:
    """Bisection on tau over [0, tau_max] using the mean WER over `seeds`.

    Raises:
        CalibrationError: the target lies outside the WERs reachable in the bracket, or
            bisection did not reach the tolerance
    """
    if not 0.0 <= target_wer < 1.0:
        raise ValueError(f"target WER must lie in [0, 1), got {target_wer}")
    if tolerance <= 0 or tau_max <= 0 or not seeds:
        raise ValueError("tolerance, tau_max and seeds must be positive / non-empty")

    measurements: list[TauMeasurement] = []

    def measure(tau: float) -> TauMeasurement:
        result = measure_tau(evaluate, tau, seeds)
        measurements.append(result)
        return result

    def accept(result: TauMeasurement) -> CalibrationResult:
        logger.info(
            f"Calibrated tau={result.tau:.4f}: mean WER {result.mean_wer:.4f} "
            f"(target {target_wer:.4f}, spread {result.spread:.4f})"
        )
        return CalibrationResult(result.tau, result.mean_wer, result.spread, measurements)

    low = measure(0.0)
    if abs(low.mean_wer - target_wer) <= tolerance:
        return accept(low)
    high = measure(tau_max)
    if abs(high.mean_wer - target_wer) <= tolerance:
        return accept(high)
    if not low.mean_wer < target_wer < high.mean_wer:
        raise CalibrationError(target_wer, (0.0, tau_max), (low.mean_wer, high.mean_wer))

    for _ in range(max_iterations):
        mid = measure((low.tau + high.tau) / 2)
        if abs(mid.mean_wer - target_wer) <= tolerance:
            return accept(mid)
        if mid.mean_wer < target_wer:
            low = mid
        else:
            high = mid
    raise CalibrationError(target_wer, (low.tau, high.tau), (low.mean_wer, high.mean_wer))
