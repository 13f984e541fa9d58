"""ARPA serialization of n-gram models."""

import logging
import math
import re
from pathlib import Path

from seqshift.errors import ArpaParseError
from seqshift.lm.ngram import NGram, NGramModel
from seqshift.text.corpus import Vocabulary

logger = logging.getLogger(__name__)

_COUNT_RE = re.compile(r"^ngram\s+(\d+)\s*=\s*(\d+)$")
_SECTION_RE = re.compile(r"^\\(\d+)-grams:$")


def write_arpa(model: NGramModel) -> str:
    """Render `model` as ARPA text with six-decimal log10 values."""
    vocab = model.vocab
    lines = ["\\data\\"]
    for n, table in enumerate(model.probs, start=1):
        lines.append(f"ngram {n}={len(table)}")
    lines.append("")

    for n, table in enumerate(model.probs, start=1):
        lines.append(f"\\{n}-grams:")
        for gram in sorted(table):
            words = " ".join(vocab.word(i) for i in gram)
            entry = f"{table[gram]:.6f} {words}"
            if n < model.order and gram in model.backoffs:
                entry += f" {model.backoffs[gram]:.6f}"
            lines.append(entry)
        lines.append("")
    lines.append("\\end\\")
    return "\n".join(lines) + "\n"


def _parse_float(text: str, line_no: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ArpaParseError(line_no, f"not a number: {text!r}") from None
    if math.isnan(value):
        raise ArpaParseError(line_no, "NaN value")
    return value


def read_arpa(text: str) -> NGramModel:
    """Parse ARPA text.

    The vocabulary is rebuilt from the unigram section in listing order, with the
    reserved symbols first.

    Raises:
        ArpaParseError: malformed headers, bad entries or count mismatches
    """
    lines = text.splitlines()
    pos = 0

    def skip_blank() -> None:
        nonlocal pos
        while pos < len(lines) and not lines[pos].strip():
            pos += 1

    skip_blank()
    if pos >= len(lines) or lines[pos].strip() != "\\data\\":
        raise ArpaParseError(pos + 1, "expected \\data\\ header")
    data_line = pos + 1
    pos += 1

    declared: dict[int, int] = {}
    while pos < len(lines) and lines[pos].strip():
        match = _COUNT_RE.match(lines[pos].strip())
        if not match:
            raise ArpaParseError(pos + 1, f"malformed count line {lines[pos].strip()!r}")
        declared[int(match.group(1))] = int(match.group(2))
        pos += 1
    if not declared:
        raise ArpaParseError(data_line, "empty \\data\\ section")
    order = max(declared)
    if sorted(declared) != list(range(1, order + 1)):
        raise ArpaParseError(data_line, "\\data\\ section must declare orders 1..n")

    raw: list[list[tuple[float, list[str], float | None, int]]] = []
    for n in range(1, order + 1):
        skip_blank()
        if pos >= len(lines):
            raise ArpaParseError(pos, f"missing \\{n}-grams: section")
        match = _SECTION_RE.match(lines[pos].strip())
        if not match or int(match.group(1)) != n:
            raise ArpaParseError(pos + 1, f"expected \\{n}-grams: header")
        header_line = pos + 1
        pos += 1

        entries: list[tuple[float, list[str], float | None, int]] = []
        while pos < len(lines) and lines[pos].strip() and not lines[pos].startswith("\\"):
            fields = lines[pos].split()
            if len(fields) == n + 1:
                backoff = None
            elif len(fields) == n + 2 and n < order:
                backoff = _parse_float(fields[-1], pos + 1)
            else:
                raise ArpaParseError(pos + 1, f"expected {n} words in \\{n}-grams: entry")
            entries.append((_parse_float(fields[0], pos + 1), fields[1 : n + 1], backoff, pos + 1))
            pos += 1
        if len(entries) != declared[n]:
            raise ArpaParseError(
                header_line,
                f"section \\{n}-grams: declares {declared[n]} entries, found {len(entries)}",
            )
        raw.append(entries)

    skip_blank()
    if pos >= len(lines) or lines[pos].strip() != "\\end\\":
        raise ArpaParseError(pos + 1, "expected \\end\\")

    vocab = Vocabulary.from_words(words[0] for _, words, _, _ in raw[0])
    probs: list[dict[NGram, float]] = []
    backoffs: dict[NGram, float] = {}
    for entries in raw:
        table: dict[NGram, float] = {}
        for logp, words, backoff, line_no in entries:
            missing = [w for w in words if w not in vocab]
            if missing:
                raise ArpaParseError(line_no, f"word {missing[0]!r} missing from unigrams")
            gram = tuple(vocab.lookup(w) for w in words)
            table[gram] = logp
            if backoff is not None:
                backoffs[gram] = backoff
        probs.append(table)

    logger.debug(f"Read {order}-gram ARPA model with {len(vocab)} unigrams")
    return NGramModel(order=order, vocab=vocab, probs=tuple(probs), backoffs=backoffs)


def save_arpa(model: NGramModel, path: Path | str) -> None:
    Path(path).write_text(write_arpa(model), encoding="utf-8")


def load_arpa(path: Path | str) -> NGramModel:
    return read_arpa(Path(path).read_text(encoding="utf-8"))
