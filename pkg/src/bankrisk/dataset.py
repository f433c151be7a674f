"""Parsing, validation, and numeric encoding of qualitative bankruptcy records.

A record is six expert ratings (Industrial Risk, Management Risk, Financial
Flexibility, Credibility, Competitiveness, Operating Risk), each one of
Positive/Average/Negative, plus an optional Bankrupt/Non-bankrupt class.
Ratings encode to 1.0 / 0.5 / 0.0 and the class to 1 (bankrupt) / 0.
"""

from __future__ import annotations

import enum
import io
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import IO, Iterable, Optional, Union

import numpy as np

from .errors import (
    ArityError,
    EmptyDataset,
    LineParseError,
    MissingLabel,
    UnknownLabel,
    UnknownRating,
)

FEATURE_NAMES = ("IR", "MR", "FF", "CR", "CO", "OR")

# lowercase request/JSON field names; "opr" because "or" is a reserved word
FIELD_KEYS = ("ir", "mr", "ff", "cr", "co", "opr")

CORPUS_RESOURCE = "qualitative_bankruptcy.csv"


class Rating(enum.Enum):
    POSITIVE = "P"
    AVERAGE = "A"
    NEGATIVE = "N"

    @property
    def encoded(self) -> float:
        return _RATING_VALUE[self]

    def __str__(self) -> str:
        return self.value


_RATING_VALUE = {Rating.POSITIVE: 1.0, Rating.AVERAGE: 0.5, Rating.NEGATIVE: 0.0}


class Label(enum.Enum):
    BANKRUPT = "B"
    NON_BANKRUPT = "NB"

    @property
    def encoded(self) -> int:
        return 1 if self is Label.BANKRUPT else 0

    def __str__(self) -> str:
        return self.value


def parse_rating(token: str) -> Rating:
    """Map a P/A/N token (trimmed, case-insensitive) to a Rating."""
    cleaned = token.strip().upper()
    if cleaned == "P":
        return Rating.POSITIVE
    if cleaned == "A":
        return Rating.AVERAGE
    if cleaned == "N":
        return Rating.NEGATIVE
    raise UnknownRating(token)


def parse_label(token: str) -> Label:
    cleaned = token.strip().upper()
    if cleaned == "B":
        return Label.BANKRUPT
    if cleaned == "NB":
        return Label.NON_BANKRUPT
    raise UnknownLabel(token)


@dataclass(frozen=True)
class Record:
    """One company's six ratings in IR,MR,FF,CR,CO,OR column order."""

    ir: Rating
    mr: Rating
    ff: Rating
    cr: Rating
    co: Rating
    opr: Rating
    label: Optional[Label] = None

    def ratings(self) -> tuple[Rating, ...]:
        return (self.ir, self.mr, self.ff, self.cr, self.co, self.opr)

    def encoded(self) -> np.ndarray:
        return np.array([r.encoded for r in self.ratings()])


def parse_record(line: str) -> Record:
    """Parse one comma-separated row; a 7th field is the class label."""
    fields = line.split(",")
    if len(fields) not in (6, 7):
        raise ArityError(len(fields))
    ratings = [parse_rating(tok) for tok in fields[:6]]
    label = parse_label(fields[6]) if len(fields) == 7 else None
    return Record(*ratings, label=label)


def format_record(record: Record) -> str:
    """Inverse of parse_record."""
    tokens = [r.value for r in record.ratings()]
    if record.label is not None:
        tokens.append(record.label.value)
    return ",".join(tokens)


@dataclass(frozen=True)
class Dataset:
    records: tuple[Record, ...]
    source: str = ""

    def __post_init__(self):
        if not self.records:
            raise EmptyDataset(f"no records in {self.source or 'input'}")

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def class_counts(self) -> tuple[int, int]:
        """(non-bankrupt, bankrupt) counts over labeled records."""
        n_b = sum(1 for r in self.records if r.label is Label.BANKRUPT)
        n_nb = sum(1 for r in self.records if r.label is Label.NON_BANKRUPT)
        return n_nb, n_b

    def subset(self, indices: Iterable[int], source_suffix: str = "subset") -> "Dataset":
        picked = tuple(self.records[i] for i in indices)
        return Dataset(picked, source=f"{self.source}#{source_suffix}")


@dataclass(frozen=True)
class EncodedMatrix:
    """Numeric view of a labeled dataset: cells in {0.0, 0.5, 1.0}, y in {0, 1}."""

    x: np.ndarray
    y: np.ndarray
    feature_names: tuple[str, ...] = FEATURE_NAMES

    def __post_init__(self):
        if self.x.shape[0] != self.y.shape[0]:
            raise ValueError("row count of x must equal length of y")

    @property
    def n(self) -> int:
        return self.x.shape[0]


def _iter_text_lines(source) -> Iterable[str]:
    if isinstance(source, (str, Path)):
        with open(source, "rb") as fh:
            yield from io.TextIOWrapper(fh, encoding="utf-8")
        return
    if isinstance(source, bytes):
        yield from io.StringIO(source.decode("utf-8"))
        return
    first = True
    for raw in source:
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8")
        elif first and not isinstance(raw, str):
            raise TypeError(f"unsupported stream element: {type(raw)!r}")
        first = False
        yield raw


def load_dataset(source: Union[str, Path, bytes, IO], name: str = "") -> Dataset:
    """Parse a newline-delimited P/A/N CSV stream into a Dataset.

    Blank lines are skipped. If the first non-blank row fails rating parsing
    it is treated as a header and dropped; every later failure propagates as
    LineParseError with its 1-based line number.
    """
    records = []
    seen_data = False
    for lineno, raw in enumerate(_iter_text_lines(source), start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            records.append(parse_record(line))
        except (UnknownRating, UnknownLabel, ArityError) as exc:
            if not seen_data:
                seen_data = True  # header row: skip once, only at the top
                continue
            raise LineParseError(lineno, exc) from exc
        seen_data = True
    if not records:
        raise EmptyDataset(f"no records in {name or 'input'}")
    return Dataset(tuple(records), source=name or getattr(source, "name", "stream"))


def encode(dataset: Dataset) -> EncodedMatrix:
    """Encode a fully labeled dataset to its numeric matrix, order preserved."""
    rows = np.empty((len(dataset), 6))
    y = np.empty(len(dataset), dtype=int)
    for i, record in enumerate(dataset):
        if record.label is None:
            raise MissingLabel(i)
        rows[i] = record.encoded()
        y[i] = record.label.encoded
    return EncodedMatrix(x=rows, y=y)


def bundled_corpus_path() -> Path:
    """Path of the 250-row corpus fixture shipped with the package."""
    return Path(resources.files("bankrisk.data") / CORPUS_RESOURCE)


def load_bundled_corpus() -> Dataset:
    return load_dataset(bundled_corpus_path(), name=CORPUS_RESOURCE)
