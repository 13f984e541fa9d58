"""Factored hybrid label posteriors.

The joint context posterior of a frame is the chain p(l|t) p(c|l,t) p(r|c,l,t).
Diphone models drop the right factor.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from seqshift.acoustic.posteriorgram import read_pgrm, rows_normalized, write_pgrm
from seqshift.acoustic.prior import ContextPrior
from seqshift.errors import PosteriorgramFormatError, UnknownLabelError

logger = logging.getLogger(__name__)

LEFT_SUFFIX = ".left.pgrm"
CENTER_SUFFIX = ".center.pgrm"
RIGHT_SUFFIX = ".right.pgrm"


def center_labels(labels: tuple[str, ...]) -> list[str]:
    return [f"{c}|{left}" for left in labels for c in labels]


def right_labels(labels: tuple[str, ...]) -> list[str]:
    return [f"{r}|{c},{left}" for left in labels for c in labels for r in labels]


def factor_paths(stem: Path | str, triphone: bool = True) -> list[Path]:
    """Files a factored utterance is stored in; the right factor only for triphones."""
    suffixes = [LEFT_SUFFIX, CENTER_SUFFIX] + ([RIGHT_SUFFIX] if triphone else [])
    return [Path(f"{stem}{suffix}") for suffix in suffixes]


@dataclass(frozen=True, eq=False)
class FactoredScores:
    """Per-frame factor tables over a shared label set.

    left[t, l] = ln p(l|t), center[t, l, c] = ln p(c|l,t),
    right[t, l, c, r] = ln p(r|c,l,t); right is None for diphone models.
    """

    labels: tuple[str, ...]
    left: np.ndarray
    center: np.ndarray
    right: np.ndarray | None = None
    _index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        size = len(self.labels)
        left = np.array(self.left, dtype=np.float64)
        center = np.array(self.center, dtype=np.float64)
        if left.ndim != 2 or left.shape[0] < 1 or left.shape[1] != size:
            raise PosteriorgramFormatError(f"left factor must be T x {size}")
        frames = left.shape[0]
        if center.shape != (frames, size, size):
            raise PosteriorgramFormatError(f"center factor must be {frames} x {size} x {size}")
        tables = [("left", left), ("center", center)]
        right = None
        if self.right is not None:
            right = np.array(self.right, dtype=np.float64)
            if right.shape != (frames, size, size, size):
                raise PosteriorgramFormatError(
                    f"right factor must be {frames} x {size} x {size} x {size}"
                )
            tables.append(("right", right))
        for name, table in tables:
            if not rows_normalized(table):
                raise PosteriorgramFormatError(f"{name} factor row not normalized")
            table.flags.writeable = False
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "right", right)
        object.__setattr__(self, "_index", {label: i for i, label in enumerate(self.labels)})

    @property
    def num_frames(self) -> int:
        return int(self.left.shape[0])

    @property
    def is_triphone(self) -> bool:
        return self.right is not None

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise UnknownLabelError(label) from None

    def chain(self, t: int, left: int, center: int, right: int | None = None) -> float:
        """ln of the factor chain for label ids."""
        score = self.left[t, left] + self.center[t, left, center]
        if right is not None:
            if self.right is None:
                raise ValueError("diphone scores have no right factor")
            score += self.right[t, left, center, right]
        return float(score)

    def save(self, stem: Path | str) -> None:
        """Write the factors as posteriorgram files with composite labels."""
        frames, size = self.num_frames, len(self.labels)
        write_pgrm(self.labels, self.left, f"{stem}{LEFT_SUFFIX}")
        write_pgrm(
            center_labels(self.labels),
            self.center.reshape(frames, size * size),
            f"{stem}{CENTER_SUFFIX}",
        )
        if self.right is not None:
            write_pgrm(
                right_labels(self.labels),
                self.right.reshape(frames, size**3),
                f"{stem}{RIGHT_SUFFIX}",
            )

    @classmethod
    def load(cls, stem: Path | str) -> "FactoredScores":
        """Read the factor files; the right file is optional."""
        labels, left = read_pgrm(f"{stem}{LEFT_SUFFIX}")
        frames, size = left.shape

        def composite(suffix: str, expected: list[str], width: int) -> np.ndarray:
            path = f"{stem}{suffix}"
            names, matrix = read_pgrm(path)
            if list(names) != expected:
                raise PosteriorgramFormatError(
                    "composite labels do not match the left factor", path
                )
            if matrix.shape != (frames, width):
                raise PosteriorgramFormatError("factor frame count mismatch", path)
            return matrix

        center = composite(CENTER_SUFFIX, center_labels(labels), size * size)
        right = None
        if Path(f"{stem}{RIGHT_SUFFIX}").exists():
            right = composite(RIGHT_SUFFIX, right_labels(labels), size**3)
            right = right.reshape(frames, size, size, size)
        return cls(
            labels=labels,
            left=left,
            center=center.reshape(frames, size, size),
            right=right,
        )


def fh_score(
    factors: FactoredScores,
    prior: ContextPrior,
    t: int,
    left: str,
    center: str,
    right: str | None,
    alpha: float,
) -> float:
    """Factored hybrid score: ln of the factor chain minus alpha times the ln context prior."""
    right_id = None if right is None else factors.index(right)
    score = factors.chain(t, factors.index(left), factors.index(center), right_id)
    if alpha == 0:
        return score
    context = (left, center) if right is None else (left, center, right)
    return score - alpha * prior.log_prob(context)
