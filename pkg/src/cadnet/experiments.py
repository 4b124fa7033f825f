"""Experiment harnesses: segment-length sweep and dropout ablation.

Both harnesses train on a small primary cohort and additionally score
two held-out cohorts: a larger mixed one (d2) and a positive-only one
(d3). Sweep rows derive their seed from the segment length value itself,
not the row position, so removing a length from the list leaves every
other row bit-identical. Ablation rows share one seed, so all five
configurations start from identical weights, which the emitted
initialization digest makes checkable.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .errors import ArgumentError, CadnetError
from .metrics import MetricsReport
from .model import ModelConfig, Model, build_model, clone_config
from .records import (
    Segment,
    SegmentDataset,
    SignalRecord,
    extract_window,
    normalize_dataset,
    prepare,
    resegment,
)
from .rng import (
    STREAM_ABLATION,
    STREAM_SWEEP_DATA,
    STREAM_SWEEP_ROW,
    derive_seed,
)
from .synth import BeatParams, synth_dataset
from .train import evaluate, train

DEFAULT_LENGTHS = (150, 200, 250, 300, 500, 1000)
SWEEP_EVALS = ("train", "test", "d2", "d3")

# Dropout placements compared by the ablation: rate-0.2 layers fill the
# conv blocks front to back, and the last row adds rate 0.5 after the
# hidden dense layer.
ABLATION_CONFIGS: tuple[tuple[str, tuple[float, ...], float], ...] = (
    ("none", (0.0, 0.0, 0.0, 0.0), 0.0),
    ("one-0.2", (0.2, 0.0, 0.0, 0.0), 0.0),
    ("two-0.2", (0.2, 0.2, 0.0, 0.0), 0.0),
    ("three-0.2", (0.2, 0.2, 0.2, 0.0), 0.0),
    ("three-0.2-head-0.5", (0.2, 0.2, 0.2, 0.0), 0.5),
)


@dataclass(frozen=True)
class DataSpec:
    """Synthetic cohort sizes and segmentation settings."""

    d1_cad: int = 5
    d1_noncad: int = 5
    d2_cad: int = 20
    d2_noncad: int = 20
    d3_cad: int = 7
    d3_noncad: int = 0
    fs: float = 125.0
    duration_s: float = 8.0
    heart_rate_bpm: float = 60.0
    hr_jitter: float = 0.0
    window: tuple[int, int] | None = (0, 1000)
    train_fraction: float = 0.7

    KEYS = (
        "d1_cad",
        "d1_noncad",
        "d2_cad",
        "d2_noncad",
        "d3_cad",
        "d3_noncad",
        "fs",
        "duration_s",
        "heart_rate_bpm",
        "hr_jitter",
        "window_start",
        "window_end",
        "whole_record",
        "train_fraction",
    )

    @classmethod
    def from_kv(cls, kv: dict[str, str]) -> "DataSpec":
        kwargs: dict = {}
        try:
            for name in ("d1_cad", "d1_noncad", "d2_cad", "d2_noncad", "d3_cad", "d3_noncad"):
                if name in kv:
                    kwargs[name] = int(kv[name])
            for name in ("fs", "duration_s", "heart_rate_bpm", "hr_jitter", "train_fraction"):
                if name in kv:
                    kwargs[name] = float(kv[name])
            if kv.get("whole_record", "").lower() in ("1", "true", "yes"):
                kwargs["window"] = None
            elif "window_start" in kv or "window_end" in kv:
                kwargs["window"] = (
                    int(kv.get("window_start", 0)),
                    int(kv.get("window_end", 1000)),
                )
        except ValueError as exc:
            raise ArgumentError(f"bad data value: {exc}") from None
        return cls(**kwargs)


@dataclass(frozen=True)
class SweepSpec:
    lengths: tuple[int, ...] = DEFAULT_LENGTHS
    config: ModelConfig = field(default_factory=lambda: ModelConfig(input_length=250))
    data: DataSpec = field(default_factory=DataSpec)
    seed: int = 0
    params: tuple[BeatParams, BeatParams] | None = None


@dataclass(frozen=True)
class SweepRow:
    length: int
    evals: dict[str, MetricsReport]


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    failures: tuple[tuple[int, str], ...]


@dataclass(frozen=True)
class AblationSpec:
    length: int = 250
    config: ModelConfig = field(default_factory=lambda: ModelConfig(input_length=250))
    data: DataSpec = field(default_factory=DataSpec)
    seed: int = 0
    params: tuple[BeatParams, BeatParams] | None = None


@dataclass(frozen=True)
class AblationRow:
    name: str
    init_digest: str
    evals: dict[str, MetricsReport]


def _synth_cohorts(
    data: DataSpec, seed: int, params
) -> tuple[list[SignalRecord], list[SignalRecord], list[SignalRecord]]:
    cohorts = []
    for tag, (n_cad, n_noncad) in enumerate(
        (
            (data.d1_cad, data.d1_noncad),
            (data.d2_cad, data.d2_noncad),
            (data.d3_cad, data.d3_noncad),
        ),
        start=1,
    ):
        cohorts.append(
            synth_dataset(
                n_cad,
                n_noncad,
                data.fs,
                data.duration_s,
                derive_seed(seed, STREAM_SWEEP_DATA, tag),
                params=params,
                heart_rate_bpm=data.heart_rate_bpm,
                hr_jitter=data.hr_jitter,
            )
        )
    return tuple(cohorts)


def eval_dataset(
    records: list[SignalRecord], length: int, window: tuple[int, int] | None
) -> SegmentDataset:
    """Window, cut, and normalize records into one evaluation dataset."""
    if window is None:
        segments = [
            Segment(rec.samples.copy(), rec.label, rec.subject_id) for rec in records
        ]
    else:
        segments = [extract_window(rec, window[0], window[1]) for rec in records]
    return normalize_dataset(resegment(segments, length))


def _evaluate_model(model: Model, sets: dict[str, SegmentDataset]) -> dict[str, MetricsReport]:
    return {name: evaluate(model, ds) for name, ds in sets.items()}


def _sweep_row(spec: SweepSpec, length: int, d1, d2, d3) -> SweepRow:
    row_seed = derive_seed(spec.seed, STREAM_SWEEP_ROW, length)
    train_set, test_set = prepare(
        d1, length, spec.data.train_fraction, row_seed, window=spec.data.window
    )
    config = clone_config(spec.config, input_length=length, seed=row_seed)
    model = build_model(config)
    train(model, train_set, test_set)
    sets = {
        "train": train_set,
        "test": test_set,
        "d2": eval_dataset(d2, length, spec.data.window),
        "d3": eval_dataset(d3, length, spec.data.window),
    }
    return SweepRow(length, _evaluate_model(model, sets))


def run_length_sweep(
    spec: SweepSpec,
    d1: list[SignalRecord] | None = None,
    d2: list[SignalRecord] | None = None,
    d3: list[SignalRecord] | None = None,
) -> SweepResult:
    """One trained model per segment length; failed rows are recorded.

    A row failure (for example a length no record can fill) lands in
    ``failures`` as (length, message) and the remaining rows still run.
    """
    if not spec.lengths:
        raise ArgumentError("sweep needs at least one segment length")
    synth = _synth_cohorts(spec.data, spec.seed, spec.params)
    d1 = synth[0] if d1 is None else d1
    d2 = synth[1] if d2 is None else d2
    d3 = synth[2] if d3 is None else d3
    rows = []
    failures = []
    for length in spec.lengths:
        try:
            rows.append(_sweep_row(spec, length, d1, d2, d3))
        except CadnetError as exc:
            failures.append((length, f"{type(exc).__name__}: {exc}"))
    return SweepResult(tuple(rows), tuple(failures))


def _params_digest(model: Model) -> str:
    digest = hashlib.sha256()
    for _, arr in model.parameters():
        digest.update(arr.tobytes())
    return digest.hexdigest()[:16]


def run_dropout_ablation(
    spec: AblationSpec,
    d1: list[SignalRecord] | None = None,
    d2: list[SignalRecord] | None = None,
    d3: list[SignalRecord] | None = None,
) -> list[AblationRow]:
    """Train the five dropout placements from identical initial weights."""
    synth = _synth_cohorts(spec.data, spec.seed, spec.params)
    d1 = synth[0] if d1 is None else d1
    d2 = synth[1] if d2 is None else d2
    d3 = synth[2] if d3 is None else d3
    shared_seed = derive_seed(spec.seed, STREAM_ABLATION)
    train_set, test_set = prepare(
        d1, spec.length, spec.data.train_fraction, shared_seed, window=spec.data.window
    )
    sets = {
        "d2": eval_dataset(d2, spec.length, spec.data.window),
        "d3": eval_dataset(d3, spec.length, spec.data.window),
    }
    rows = []
    for name, conv_dropout, head_dropout in ABLATION_CONFIGS:
        config = clone_config(
            spec.config,
            input_length=spec.length,
            seed=shared_seed,
            conv_dropout=conv_dropout,
            head_dropout=head_dropout,
        )
        model = build_model(config)
        digest = _params_digest(model)
        train(model, train_set, test_set)
        rows.append(AblationRow(name, digest, _evaluate_model(model, sets)))
    return rows


def _eval_columns(evals: dict[str, MetricsReport], names: tuple[str, ...]) -> list[str]:
    cells = []
    for name in names:
        report = evals[name]
        m = report.matrix
        cells.extend([repr(report.accuracy), str(m.tp), str(m.tn), str(m.fp), str(m.fn)])
    return cells


def _eval_header(names: tuple[str, ...]) -> str:
    cols = []
    for name in names:
        cols.extend(f"{name}_{c}" for c in ("acc", "tp", "tn", "fp", "fn"))
    return ",".join(cols)


def sweep_csv(result: SweepResult) -> str:
    lines = [f"length,{_eval_header(SWEEP_EVALS)}"]
    for row in result.rows:
        lines.append(",".join([str(row.length), *_eval_columns(row.evals, SWEEP_EVALS)]))
    return "\n".join(lines) + "\n"


def ablation_csv(rows: list[AblationRow]) -> str:
    names = ("d2", "d3")
    lines = [f"configuration,init_digest,{_eval_header(names)}"]
    for row in rows:
        lines.append(",".join([row.name, row.init_digest, *_eval_columns(row.evals, names)]))
    return "\n".join(lines) + "\n"
