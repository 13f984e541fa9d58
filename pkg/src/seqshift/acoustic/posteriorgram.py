"""Posteriorgrams and the PGRM binary format.

Layout: magic "PGRM", u32 version, u32 T, u32 V, V null-terminated UTF-8
labels, then T*V little-endian float32 natural-log probabilities, row-major.
"""

import logging
import struct
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from seqshift.errors import PosteriorgramFormatError, UnknownLabelError

logger = logging.getLogger(__name__)

BLANK = "<blank>"

PGRM_MAGIC = b"PGRM"
PGRM_VERSION = 1
MAX_DIMENSION = 1 << 24
ROW_TOLERANCE = 1e-5

_HEADER = struct.Struct("<III")


def log_softmax(logits: np.ndarray, axis: int = -1) -> np.ndarray:
    shifted = logits - np.max(logits, axis=axis, keepdims=True)
    return shifted - np.log(np.sum(np.exp(shifted), axis=axis, keepdims=True))


def rows_normalized(log_probs: np.ndarray, tolerance: float = ROW_TOLERANCE) -> bool:
    """True when the exponentials along the last axis sum to 1."""
    sums = np.exp(log_probs).sum(axis=-1)
    return bool(np.all(np.abs(sums - 1.0) <= tolerance))


@dataclass(frozen=True, eq=False)
class Posteriorgram:
    """T x V matrix of per-frame natural-log label probabilities."""

    labels: tuple[str, ...]
    log_probs: np.ndarray
    _index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        matrix = np.array(self.log_probs, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] < 1:
            raise PosteriorgramFormatError("posteriorgram needs at least one frame")
        if matrix.shape[1] != len(self.labels):
            raise PosteriorgramFormatError(
                f"{matrix.shape[1]} columns for {len(self.labels)} labels"
            )
        if len(set(self.labels)) != len(self.labels):
            raise PosteriorgramFormatError("duplicate labels")
        if not rows_normalized(matrix):
            raise PosteriorgramFormatError("row not normalized")
        matrix.flags.writeable = False
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "log_probs", matrix)
        object.__setattr__(self, "_index", {label: i for i, label in enumerate(self.labels)})

    @classmethod
    def from_logits(cls, labels: Sequence[str], logits: np.ndarray) -> "Posteriorgram":
        return cls(labels=tuple(labels), log_probs=log_softmax(np.asarray(logits, dtype=float)))

    @property
    def num_frames(self) -> int:
        return int(self.log_probs.shape[0])

    @property
    def num_labels(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise UnknownLabelError(label) from None

    def __contains__(self, label: object) -> bool:
        return label in self._index

    def log_prob(self, t: int, label: str) -> float:
        return float(self.log_probs[t, self.index(label)])


def write_pgrm(labels: Sequence[str], matrix: np.ndarray, path: Path | str) -> None:
    """Write a raw T x V matrix; no normalization check."""
    matrix = np.asarray(matrix)
    frames, size = matrix.shape
    header = PGRM_MAGIC + _HEADER.pack(PGRM_VERSION, frames, size)
    names = b"".join(label.encode("utf-8") + b"\0" for label in labels)
    body = np.ascontiguousarray(matrix, dtype="<f4").tobytes()
    Path(path).write_bytes(header + names + body)


def read_pgrm(path: Path | str) -> tuple[tuple[str, ...], np.ndarray]:
    """Read a raw matrix and its labels."""
    where = str(path)
    data = Path(path).read_bytes()
    if len(data) < len(PGRM_MAGIC) + _HEADER.size:
        raise PosteriorgramFormatError("unexpected end of header", where)
    if data[: len(PGRM_MAGIC)] != PGRM_MAGIC:
        raise PosteriorgramFormatError("magic mismatch", where)
    version, frames, size = _HEADER.unpack_from(data, len(PGRM_MAGIC))
    if version != PGRM_VERSION:
        raise PosteriorgramFormatError(f"unsupported version {version}", where)
    if not 0 < frames <= MAX_DIMENSION or not 0 < size <= MAX_DIMENSION:
        raise PosteriorgramFormatError(f"dimension overflow ({frames} x {size})", where)

    offset = len(PGRM_MAGIC) + _HEADER.size
    labels: list[str] = []
    for _ in range(size):
        end = data.find(b"\0", offset)
        if end < 0:
            raise PosteriorgramFormatError("unexpected end in label table", where)
        try:
            labels.append(data[offset:end].decode("utf-8"))
        except UnicodeDecodeError:
            raise PosteriorgramFormatError("label is not UTF-8", where) from None
        offset = end + 1

    expected = frames * size * 4
    remaining = len(data) - offset
    if remaining < expected:
        raise PosteriorgramFormatError("unexpected end of matrix data", where)
    if remaining > expected:
        raise PosteriorgramFormatError("trailing bytes after matrix data", where)
    matrix = np.frombuffer(data, dtype="<f4", count=frames * size, offset=offset)
    return tuple(labels), matrix.reshape(frames, size).astype(np.float64)


def save_posteriorgram(pg: Posteriorgram, path: Path | str) -> None:
    write_pgrm(pg.labels, pg.log_probs, path)


def load_posteriorgram(path: Path | str) -> Posteriorgram:
    labels, matrix = read_pgrm(path)
    try:
        return Posteriorgram(labels=labels, log_probs=matrix)
    except PosteriorgramFormatError as e:
        raise PosteriorgramFormatError(e.reason, str(path)) from None
