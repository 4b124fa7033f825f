"""Waveform records, fixed-length segments, and dataset assembly.

Two plain-text formats, both UTF-8 with LF line endings:

* records CSV, header ``subject_id,label,fs,samples...`` where each data
  row carries one whole recording and may have its own sample count;
* segments CSV, header ``label,s0,s1,...,s{L-1}`` where every row has
  exactly L sample columns.

Floats are written with ``repr`` so a save/load round trip reproduces the
values bit for bit.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from typing import Iterable

import numpy as np

from .errors import (
    ArgumentError,
    DegenerateSignalError,
    EmptyDatasetError,
    OutOfRangeError,
    ParseError,
    SchemaError,
)
from .rng import STREAM_SPLIT, XorShift64Star, derive_seed

RECORDS_HEADER = "subject_id,label,fs,samples..."


@dataclass(eq=False)
class SignalRecord:
    """One single-lead recording with its subject id, label, and rate."""

    subject_id: str
    samples: np.ndarray
    fs: float
    label: int

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1 or self.samples.size == 0:
            raise ArgumentError("samples must be a non-empty 1-D array")
        if not self.fs > 0:
            raise ArgumentError(f"sampling rate must be positive, got {self.fs}")
        if self.label not in (0, 1):
            raise ArgumentError(f"label must be 0 or 1, got {self.label}")
        if not self.subject_id:
            raise ArgumentError("subject_id must be non-empty")

    def __len__(self) -> int:
        return self.samples.size


@dataclass(eq=False)
class Segment:
    """A contiguous run of samples with the label of its source record."""

    values: np.ndarray
    label: int
    source_id: str
    normalized: bool = False

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 1 or self.values.size == 0:
            raise ArgumentError("values must be a non-empty 1-D array")
        if self.label not in (0, 1):
            raise ArgumentError(f"label must be 0 or 1, got {self.label}")

    def __len__(self) -> int:
        return self.values.size


@dataclass(eq=False)
class SegmentDataset:
    """Equal-length segments plus free-form provenance metadata."""

    segments: list[Segment]
    segment_length: int
    metadata: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        for seg in self.segments:
            if len(seg) != self.segment_length:
                raise ArgumentError(
                    f"segment of length {len(seg)} in a dataset of length "
                    f"{self.segment_length}"
                )

    def __len__(self) -> int:
        return len(self.segments)

    def labels(self) -> np.ndarray:
        return np.array([seg.label for seg in self.segments], dtype=np.int64)

    def as_arrays(self, dtype=np.float32) -> tuple[np.ndarray, np.ndarray]:
        """Stack into a (n, 1, L) batch and an int label vector."""
        if not self.segments:
            raise EmptyDatasetError("dataset has no segments to stack")
        x = np.stack([seg.values for seg in self.segments]).astype(dtype)
        return x[:, None, :], self.labels()


def save_records(records: Iterable[SignalRecord], path: str | os.PathLike) -> None:
    records = list(records)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(RECORDS_HEADER + "\n")
        for rec in records:
            if "," in rec.subject_id or "\n" in rec.subject_id:
                raise ArgumentError(f"subject_id {rec.subject_id!r} contains a delimiter")
            samples = ",".join(repr(float(v)) for v in rec.samples)
            fh.write(f"{rec.subject_id},{rec.label},{repr(float(rec.fs))},{samples}\n")


def load_records(path: str | os.PathLike) -> list[SignalRecord]:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise SchemaError("empty file, expected a records header")
    header = [h.strip() for h in lines[0].split(",")]
    if header[:3] != ["subject_id", "label", "fs"]:
        raise SchemaError(f"unrecognized records header {lines[0]!r}")
    records = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) < 4:
            raise SchemaError(f"line {lineno}: expected at least 4 fields, got {len(fields)}")
        subject_id = fields[0]
        if fields[1] not in ("0", "1"):
            raise SchemaError(f"line {lineno}: label must be 0 or 1, got {fields[1]!r}")
        try:
            fs = float(fields[2])
            samples = np.array([float(v) for v in fields[3:]], dtype=np.float64)
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno) from None
        if not fs > 0:
            raise SchemaError(f"line {lineno}: sampling rate must be positive, got {fs}")
        records.append(SignalRecord(subject_id, samples, fs, int(fields[1])))
    return records


def save_segments(dataset: SegmentDataset, path: str | os.PathLike) -> None:
    if not dataset.segments:
        raise EmptyDatasetError("refusing to save a dataset with no segments")
    header = "label," + ",".join(f"s{i}" for i in range(dataset.segment_length))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for seg in dataset.segments:
            values = ",".join(repr(float(v)) for v in seg.values)
            fh.write(f"{seg.label},{values}\n")


def load_segments(
    path: str | os.PathLike, normalized: bool = False
) -> SegmentDataset:
    """Load a segments CSV; ``normalized`` marks how the values were made."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise SchemaError("empty file, expected a segments header")
    header = lines[0].split(",")
    if len(header) < 2 or header[0] != "label" or header[1] != "s0":
        raise SchemaError(f"unrecognized segments header {lines[0]!r}")
    length = len(header) - 1
    if header != ["label"] + [f"s{i}" for i in range(length)]:
        raise SchemaError("segments header columns must be label,s0,s1,...")
    name = os.fspath(path)
    segments = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) != length + 1:
            raise SchemaError(
                f"line {lineno}: expected {length + 1} fields, got {len(fields)}"
            )
        if fields[0] not in ("0", "1"):
            raise SchemaError(f"line {lineno}: label must be 0 or 1, got {fields[0]!r}")
        try:
            values = np.array([float(v) for v in fields[1:]], dtype=np.float64)
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno) from None
        segments.append(Segment(values, int(fields[0]), name, normalized=normalized))
    if not segments:
        raise EmptyDatasetError(f"{name} contains no segments")
    return SegmentDataset(segments, length, metadata={"source": name})


def extract_window(record: SignalRecord, start: int, end: int) -> Segment:
    """Copy samples [start, end) of a record into a new segment."""
    if not (0 <= start < end <= len(record)):
        raise OutOfRangeError(
            f"window [{start}, {end}) outside record of {len(record)} samples"
        )
    return Segment(record.samples[start:end].copy(), record.label, record.subject_id)


def resegment(segments: Iterable[Segment], length: int) -> SegmentDataset:
    """Cut each segment into consecutive non-overlapping length-L pieces.

    The tail shorter than L is dropped; an input shorter than L simply
    contributes nothing. Labels and source ids carry over unchanged.
    """
    if length < 1:
        raise ArgumentError(f"segment length must be >= 1, got {length}")
    pieces = []
    for seg in segments:
        for k in range(len(seg) // length):
            pieces.append(
                Segment(
                    seg.values[k * length : (k + 1) * length].copy(),
                    seg.label,
                    seg.source_id,
                    normalized=seg.normalized,
                )
            )
    if not pieces:
        raise EmptyDatasetError(f"no input segment is at least {length} samples long")
    return SegmentDataset(pieces, length, metadata={"segment_length": str(length)})


def _zscore(values: np.ndarray, what: str) -> np.ndarray:
    if values.size < 2:
        raise DegenerateSignalError(f"{what} has fewer than two samples")
    mean = values.mean()
    std = values.std(ddof=1)
    if not std > 0:
        raise DegenerateSignalError(f"{what} has no amplitude variation")
    return (values - mean) / std


def normalize_segment(segment: Segment) -> Segment:
    """Z-score a segment (sample std, N-1 denominator) in float64."""
    values = _zscore(segment.values, "segment")
    return replace(segment, values=values, normalized=True)


def normalize_record(record: SignalRecord) -> SignalRecord:
    """Z-score a whole record; used by the per-record normalization mode."""
    return replace(record, samples=_zscore(record.samples, "record"))


def normalize_dataset(dataset: SegmentDataset, drop_degenerate: bool = True) -> SegmentDataset:
    """Z-score every segment; flat segments are dropped (or raise)."""
    out = []
    for seg in dataset.segments:
        try:
            out.append(normalize_segment(seg))
        except DegenerateSignalError:
            if not drop_degenerate:
                raise
    if not out:
        raise EmptyDatasetError("every segment was degenerate")
    return SegmentDataset(out, dataset.segment_length, dict(dataset.metadata))


def split(
    dataset: SegmentDataset,
    train_fraction: float,
    seed: int,
    by_subject: bool = False,
) -> tuple[SegmentDataset, SegmentDataset]:
    """Deterministic shuffled split into train and test datasets.

    The segment order is shuffled under the seed, then the first
    ``round(train_fraction * n)`` segments (Python round, ties to even)
    form the train set. With ``by_subject`` the same rounding is applied
    to the shuffled list of distinct source ids instead, so all segments
    of one subject land on one side.
    """
    if not 0.0 <= train_fraction <= 1.0:
        raise ArgumentError(f"train_fraction must be in [0, 1], got {train_fraction}")
    order = list(range(len(dataset.segments)))
    rng = XorShift64Star(derive_seed(seed, STREAM_SPLIT))
    rng.shuffle(order)
    shuffled = [dataset.segments[i] for i in order]
    if by_subject:
        subjects = []
        for seg in shuffled:
            if seg.source_id not in subjects:
                subjects.append(seg.source_id)
        rng.shuffle(subjects)
        chosen = set(subjects[: round(train_fraction * len(subjects))])
        train = [seg for seg in shuffled if seg.source_id in chosen]
        test = [seg for seg in shuffled if seg.source_id not in chosen]
    else:
        n_train = round(train_fraction * len(shuffled))
        train, test = shuffled[:n_train], shuffled[n_train:]
    meta = dict(dataset.metadata)
    meta.update(train_fraction=repr(train_fraction), split_seed=str(seed))
    return (
        SegmentDataset(train, dataset.segment_length, {**meta, "split": "train"}),
        SegmentDataset(test, dataset.segment_length, {**meta, "split": "test"}),
    )


def prepare(
    records: Iterable[SignalRecord],
    length: int,
    train_fraction: float,
    seed: int,
    window: tuple[int, int] | None = (0, 1000),
    per_record: bool = False,
    by_subject: bool = False,
) -> tuple[SegmentDataset, SegmentDataset]:
    """Records to train/test datasets: window, cut, normalize, split.

    ``window`` restricts each record to [start, end) first; pass None to
    use whole records. Normalization is per segment by default; with
    ``per_record`` each record is z-scored once instead and the cut
    segments are used as-is.
    """
    records = list(records)
    if per_record:
        records = [normalize_record(rec) for rec in records]
    if window is None:
        windows = [
            Segment(rec.samples.copy(), rec.label, rec.subject_id) for rec in records
        ]
    else:
        windows = [extract_window(rec, window[0], window[1]) for rec in records]
    dataset = resegment(windows, length)
    if per_record:
        for seg in dataset.segments:
            seg.normalized = True
    else:
        dataset = normalize_dataset(dataset)
    return split(dataset, train_fraction, seed, by_subject=by_subject)
