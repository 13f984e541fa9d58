"""Context-dependent label priors."""

import itertools
import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from seqshift.errors import SeqshiftValidationError, UnknownLabelError

logger = logging.getLogger(__name__)

DEFAULT_FLOOR = 1e-8
PRIOR_HEADER = "#prior v1"
LABELS_TAG = "#labels"
SUM_TOLERANCE = 1e-6

Context = tuple[str, ...]


def floor_and_renormalize(probs: np.ndarray, floor: float) -> np.ndarray:
    """Raise entries below `floor` to it and rescale the rest so the table sums to 1."""
    probs = np.asarray(probs, dtype=np.float64)
    total = probs.sum()
    if total <= 0:
        raise SeqshiftValidationError("prior table has no mass")
    probs = probs / total
    low = probs < floor
    if low.all() or floor * probs.size >= 1.0:
        return np.full_like(probs, 1.0 / probs.size)
    out = probs.copy()
    out[low] = floor
    out[~low] *= (1.0 - floor * low.sum()) / probs[~low].sum()
    return out


@dataclass(frozen=True, eq=False)
class ContextPrior:
    """Prior over label tuples of length `order` (1 monophone, 2 diphone, 3 triphone).

    probs is indexed [l, c, r] for triphones, [l, c] for diphones and [c] for monophones.
    """

    labels: tuple[str, ...]
    order: int
    probs: np.ndarray
    floor: float = DEFAULT_FLOOR
    log_probs: np.ndarray = field(init=False, repr=False)
    _index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.order not in (1, 2, 3):
            raise SeqshiftValidationError(f"prior order must be 1, 2 or 3, got {self.order}")
        if self.floor <= 0:
            raise SeqshiftValidationError("prior floor must be positive")
        probs = np.array(self.probs, dtype=np.float64)
        if probs.shape != (len(self.labels),) * self.order:
            raise SeqshiftValidationError(f"prior table shape {probs.shape} does not match labels")
        if abs(probs.sum() - 1.0) > SUM_TOLERANCE:
            raise SeqshiftValidationError(f"prior sums to {probs.sum():.8f}, not 1")
        if probs.min() < self.floor * (1.0 - 1e-6):
            raise SeqshiftValidationError("prior entry below floor")
        probs.flags.writeable = False
        log_probs = np.log(probs)
        log_probs.flags.writeable = False
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "log_probs", log_probs)
        object.__setattr__(self, "_index", {label: i for i, label in enumerate(self.labels)})

    @classmethod
    def uniform(
        cls, labels: Sequence[str], order: int, floor: float = DEFAULT_FLOOR
    ) -> "ContextPrior":
        size = len(labels)
        probs = np.full((size,) * order, 1.0 / size**order)
        return cls(labels=tuple(labels), order=order, probs=probs, floor=floor)

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise UnknownLabelError(label) from None

    def ids(self, context: Context) -> tuple[int, ...]:
        if len(context) != self.order:
            raise ValueError(f"order-{self.order} prior queried with {len(context)} labels")
        return tuple(self.index(label) for label in context)

    def prob(self, context: Context) -> float:
        return float(self.probs[self.ids(context)])

    def log_prob(self, context: Context) -> float:
        return float(self.log_probs[self.ids(context)])

    def save(self, path: Path | str) -> None:
        lines = [
            f"{PRIOR_HEADER} order={self.order} floor={self.floor!r}",
            f"{LABELS_TAG}\t{' '.join(self.labels)}",
        ]
        for ids in itertools.product(range(len(self.labels)), repeat=self.order):
            context = " ".join(self.labels[i] for i in ids)
            lines.append(f"{context}\t{float(self.probs[ids])!r}")
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: Path | str) -> "ContextPrior":
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        if not lines or not lines[0].startswith(PRIOR_HEADER):
            raise SeqshiftValidationError(f"{path}: missing '{PRIOR_HEADER}' header")
        try:
            params = dict(item.split("=", 1) for item in lines[0].split()[2:])
            order, floor = int(params["order"]), float(params["floor"])
        except (KeyError, ValueError):
            raise SeqshiftValidationError(f"{path}: malformed prior header") from None
        if len(lines) < 2 or not lines[1].startswith(LABELS_TAG):
            raise SeqshiftValidationError(f"{path}: missing label line")
        labels = tuple(lines[1].split("\t", 1)[1].split()) if "\t" in lines[1] else ()
        index = {label: i for i, label in enumerate(labels)}

        probs = np.zeros((len(labels),) * order)
        seen = 0
        for line_no, line in enumerate(lines[2:], start=3):
            if not line.strip():
                continue
            context, _, value = line.partition("\t")
            names = context.split()
            if len(names) != order or any(n not in index for n in names):
                raise SeqshiftValidationError(f"{path}:{line_no}: bad context {context!r}")
            try:
                probs[tuple(index[n] for n in names)] = float(value)
            except ValueError:
                raise SeqshiftValidationError(f"{path}:{line_no}: bad probability") from None
            seen += 1
        if seen != probs.size:
            raise SeqshiftValidationError(f"{path}: expected {probs.size} entries, found {seen}")
        return cls(labels=labels, order=order, probs=probs, floor=floor)


def estimate_context_prior(
    alignments: Iterable[Sequence[Context | str]],
    order: int,
    labels: Sequence[str] | None = None,
    floor: float = DEFAULT_FLOOR,
) -> ContextPrior:
    """Relative frequency of per-frame context tuples, floored and renormalized.

    Args:
        alignments: One sequence per utterance of per-frame context tuples; plain strings
            are read as monophone contexts
        order: Tuple length
        labels: Label set of the prior; defaults to the sorted labels seen
        floor: Minimum probability of any tuple

    Raises:
        SeqshiftValidationError: no frames, or tuples of the wrong length
    """
    frames: list[Context] = []
    for alignment in alignments:
        for item in alignment:
            context = (item,) if isinstance(item, str) else tuple(item)
            if len(context) != order:
                raise SeqshiftValidationError(
                    f"context {context} does not match prior order {order}"
                )
            frames.append(context)
    if not frames:
        raise SeqshiftValidationError("cannot estimate a prior from empty alignments")

    if labels is None:
        labels = sorted({label for context in frames for label in context})
    index = {label: i for i, label in enumerate(labels)}
    counts = np.zeros((len(labels),) * order)
    for context in frames:
        try:
            counts[tuple(index[label] for label in context)] += 1
        except KeyError as e:
            raise UnknownLabelError(str(e.args[0])) from None

    probs = floor_and_renormalize(counts, floor)
    logger.debug(f"Estimated order-{order} prior from {len(frames)} frames")
    return ContextPrior(labels=tuple(labels), order=order, probs=probs, floor=floor)
