"""Exception hierarchy.

Validation errors signal bad input or malformed artifacts (CLI exit code 2);
runtime errors signal a well-formed run that cannot complete (exit code 3).
"""

from collections.abc import Sequence


class SeqshiftError(Exception):
    """Base class for all seqshift errors."""


class SeqshiftValidationError(SeqshiftError):
    """Raised for invalid user input or malformed artifacts."""


class SeqshiftRuntimeError(SeqshiftError):
    """Raised when a valid run cannot produce a result."""


class EmptyCorpusError(SeqshiftValidationError):
    """Raised when an operation needs running words but the corpus has none."""

    def __init__(self, name: str = "corpus"):
        self.name = name
        super().__init__(f"empty corpus: {name}")


class ArpaParseError(SeqshiftValidationError):
    """Raised for malformed ARPA text."""

    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        self.message = message
        super().__init__(f"ARPA parse error at line {line_no}: {message}")


class ZeroProbabilityError(SeqshiftRuntimeError):
    """Raised when a model assigns probability 0 to an observed token."""

    def __init__(self, token: str, context: Sequence[str]):
        self.token = token
        self.context = tuple(context)
        super().__init__(f"zero probability for {token!r} after {' '.join(self.context)!r}")


class PosteriorgramFormatError(SeqshiftValidationError):
    """Raised when a posteriorgram file or matrix is malformed."""

    def __init__(self, reason: str, path: str | None = None):
        self.reason = reason
        self.path = path
        where = f" ({path})" if path else ""
        super().__init__(f"{reason}{where}")


class UnknownLabelError(SeqshiftValidationError):
    """Raised when a label is not part of a scorer's label set."""

    def __init__(self, label: str):
        self.label = label
        super().__init__(f"unknown label: {label!r}")


class LexiconError(SeqshiftValidationError):
    """Raised for invalid lexica or lexicon/vocabulary mismatches."""


class LmGranularityError(SeqshiftValidationError):
    """Raised when a word LM is used where subword units are decoded."""

    def __init__(self, detail: str):
        self.detail = detail
        super().__init__(f"LM granularity mismatch: {detail}")


class NoHypothesisError(SeqshiftRuntimeError):
    """Raised when no hypothesis ends at a word boundary."""

    def __init__(self, frames: int):
        self.frames = frames
        super().__init__(f"no hypothesis reached a word boundary after {frames} frames")


class NoTerminatedHypothesisError(SeqshiftRuntimeError):
    """Raised when label-synchronous search ends without a closed hypothesis."""

    def __init__(self, max_steps: int):
        self.max_steps = max_steps
        super().__init__(f"no terminated hypothesis within {max_steps} steps")


class CalibrationError(SeqshiftRuntimeError):
    """Raised when the target WER lies outside the reachable temperature bracket."""

    def __init__(self, target: float, bracket: tuple[float, float], wers: tuple[float, float]):
        self.target = target
        self.bracket = bracket
        self.wers = wers
        super().__init__(
            f"target WER {target:.4f} unreachable: tau in [{bracket[0]}, {bracket[1]}] "
            f"gives WER [{wers[0]:.4f}, {wers[1]:.4f}]"
        )


class ProfileUndefinedError(SeqshiftValidationError):
    """Raised when an error profile is requested for a report without errors."""

    def __init__(self) -> None:
        super().__init__("profile undefined: report has no errors")


class MissingArtifactError(SeqshiftValidationError):
    """Raised before a run when referenced files do not exist."""

    def __init__(self, paths: Sequence[str]):
        self.paths = list(paths)
        super().__init__(f"missing artifacts: {', '.join(self.paths)}")
