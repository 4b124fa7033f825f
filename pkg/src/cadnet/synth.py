"""Synthetic single-lead waveform generator.

A beat is a sum of five Gaussian bumps (P, Q, R, S, T) placed on a
[0, 1) beat-fraction timeline, plus a constant offset applied on the ST
interval between the end of the S wave and the start of the T wave. The
two classes share a morphology and differ only in that ST offset, which
keeps the classification task about waveform shape rather than amplitude
or rate.

Default parameter values ship in ``data/default_beats.cfg``; pass a
config of the same layout to model different populations.
"""

from __future__ import annotations

import functools
import importlib.resources
import os
from dataclasses import dataclass

import numpy as np

from . import configfile
from .errors import ArgumentError, SchemaError
from .records import SignalRecord
from .rng import STREAM_RECORD, derive_seed, np_generator

WAVE_NAMES = ("p", "q", "r", "s", "t")


@dataclass(frozen=True)
class BeatParams:
    """Morphology of one beat: five (amp, center, width) bumps plus ST."""

    p_amp: float
    p_center: float
    p_width: float
    q_amp: float
    q_center: float
    q_width: float
    r_amp: float
    r_center: float
    r_width: float
    s_amp: float
    s_center: float
    s_width: float
    t_amp: float
    t_center: float
    t_width: float
    st_offset: float = 0.0
    noise_std: float = 0.0

    def __post_init__(self):
        centers = [getattr(self, f"{w}_center") for w in WAVE_NAMES]
        for w in WAVE_NAMES:
            if not getattr(self, f"{w}_width") > 0:
                raise ArgumentError(f"{w}_width must be positive")
        if not all(0.0 < c < 1.0 for c in centers):
            raise ArgumentError("wave centers must lie strictly inside (0, 1)")
        if not all(a < b for a, b in zip(centers, centers[1:])):
            raise ArgumentError("wave centers must be ordered p < q < r < s < t")
        if self.noise_std < 0:
            raise ArgumentError("noise_std must be >= 0")

    def waves(self) -> list[tuple[float, float, float]]:
        return [
            (
                getattr(self, f"{w}_amp"),
                getattr(self, f"{w}_center"),
                getattr(self, f"{w}_width"),
            )
            for w in WAVE_NAMES
        ]


def _params_from_kv(kv: dict[str, str], prefix: str, source: str) -> BeatParams:
    fields = {}
    for name in BeatParams.__dataclass_fields__:
        key = f"{prefix}.{name}"
        if key not in kv:
            raise SchemaError(f"{source}: missing key {key}")
        try:
            fields[name] = float(kv[key])
        except ValueError:
            raise SchemaError(f"{source}: {key} is not a number: {kv[key]!r}") from None
    return BeatParams(**fields)


def load_beat_config(path: str | os.PathLike) -> tuple[BeatParams, BeatParams]:
    """Load a (normal, cad) parameter pair from a key=value file."""
    kv = configfile.load_kv(path)
    name = os.fspath(path)
    return _params_from_kv(kv, "normal", name), _params_from_kv(kv, "cad", name)


@functools.lru_cache(maxsize=1)
def default_params() -> tuple[BeatParams, BeatParams]:
    """The packaged (normal, cad) parameter pair."""
    text = (
        importlib.resources.files("cadnet")
        .joinpath("data/default_beats.cfg")
        .read_text(encoding="utf-8")
    )
    kv = configfile.parse_kv(text)
    return (
        _params_from_kv(kv, "normal", "default_beats.cfg"),
        _params_from_kv(kv, "cad", "default_beats.cfg"),
    )


def synth_beat(
    params: BeatParams,
    fs: float,
    heart_rate_bpm: float = 60.0,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """One beat of round(fs * 60 / heart_rate_bpm) samples, float64.

    Sample i sits at beat fraction i / n. The ST offset applies on
    [s_center + s_width, t_center - t_width]. Gaussian noise of the
    configured std is added when ``noise_std > 0``, which requires rng.
    """
    if not fs > 0:
        raise ArgumentError(f"sampling rate must be positive, got {fs}")
    if not 20.0 <= heart_rate_bpm <= 240.0:
        raise ArgumentError(f"heart rate must be in [20, 240] bpm, got {heart_rate_bpm}")
    n = round(fs * 60.0 / heart_rate_bpm)
    t = np.arange(n, dtype=np.float64) / n
    beat = np.zeros(n, dtype=np.float64)
    for amp, center, width in params.waves():
        beat += amp * np.exp(-((t - center) ** 2) / (2.0 * width * width))
    st_lo = params.s_center + params.s_width
    st_hi = params.t_center - params.t_width
    beat[(t >= st_lo) & (t <= st_hi)] += params.st_offset
    if params.noise_std > 0:
        if rng is None:
            raise ArgumentError("noise_std > 0 requires an rng")
        beat += rng.normal(0.0, params.noise_std, n)
    return beat


def synth_record(
    label: int,
    fs: float,
    duration_s: float,
    seed: int,
    params: tuple[BeatParams, BeatParams] | None = None,
    heart_rate_bpm: float = 60.0,
    hr_jitter: float = 0.0,
    subject_id: str | None = None,
) -> SignalRecord:
    """Whole beats concatenated until the target duration is covered.

    The record length is at least round(fs * duration_s) samples and
    less than one beat longer. ``hr_jitter`` scales a per-beat uniform
    rate perturbation; at the default 0 every beat is identical and a
    noise-free record is exactly periodic.
    """
    if label not in (0, 1):
        raise ArgumentError(f"label must be 0 or 1, got {label}")
    if not duration_s > 0:
        raise ArgumentError(f"duration must be positive, got {duration_s}")
    if not 0.0 <= hr_jitter < 1.0:
        raise ArgumentError(f"hr_jitter must be in [0, 1), got {hr_jitter}")
    if params is None:
        params = default_params()
    beat_params = params[label]
    target = round(fs * duration_s)
    if target < 1:
        raise ArgumentError("duration too short for one sample")
    rng = np_generator(seed, STREAM_RECORD)
    pieces = []
    total = 0
    while total < target:
        rate = heart_rate_bpm
        if hr_jitter > 0:
            rate = heart_rate_bpm * (1.0 + hr_jitter * rng.uniform(-1.0, 1.0))
        beat = synth_beat(beat_params, fs, rate, rng)
        pieces.append(beat)
        total += beat.size
    if subject_id is None:
        subject_id = f"{'cad' if label else 'non'}-{seed & 0xFFFFFFFF:08x}"
    return SignalRecord(subject_id, np.concatenate(pieces), fs, label)


def synth_dataset(
    n_cad: int,
    n_noncad: int,
    fs: float,
    duration_s: float,
    seed: int,
    params: tuple[BeatParams, BeatParams] | None = None,
    heart_rate_bpm: float = 60.0,
    hr_jitter: float = 0.0,
) -> list[SignalRecord]:
    """n_cad label-1 records followed by n_noncad label-0 records.

    Each record draws from its own child seed, so regenerating any one
    record from (seed, label, index) reproduces it bit for bit.
    """
    if n_cad < 0 or n_noncad < 0 or n_cad + n_noncad < 1:
        raise ArgumentError("need at least one record with non-negative counts")
    records = []
    for label, count, tag in ((1, n_cad, "cad"), (0, n_noncad, "non")):
        for i in range(count):
            records.append(
                synth_record(
                    label,
                    fs,
                    duration_s,
                    derive_seed(seed, STREAM_RECORD, label, i),
                    params=params,
                    heart_rate_bpm=heart_rate_bpm,
                    hr_jitter=hr_jitter,
                    subject_id=f"{tag}{i:03d}",
                )
            )
    return records
