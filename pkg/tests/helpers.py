"""Shared builders for small, fast test fixtures."""

from __future__ import annotations

import dataclasses

import numpy as np

from cadnet.model import ModelConfig
from cadnet.records import Segment, SegmentDataset
from cadnet.synth import BeatParams, default_params


def tiny_config(**overrides) -> ModelConfig:
    """A full-architecture model small enough for per-test training."""
    base = dict(
        input_length=16,
        conv_filters=(3, 2),
        kernel=3,
        conv_dropout=(0.0, 0.0),
        pool=4,
        dense_units=4,
        learning_rate=1e-3,
        batch_size=4,
        epochs=2,
        seed=11,
        dtype="float64",
    )
    base.update(overrides)
    return ModelConfig(**base)


def quiet_params(st_offset: float = -0.3) -> tuple[BeatParams, BeatParams]:
    """Noise-free beat morphology pair with a configurable cad ST shift."""
    normal, cad = default_params()
    normal = dataclasses.replace(normal, noise_std=0.0)
    cad = dataclasses.replace(cad, noise_std=0.0, st_offset=st_offset)
    return normal, cad


def toy_dataset(n_per_class: int, length: int, seed: int = 0) -> SegmentDataset:
    """Normalized segments where the class sets the sign of a ramp."""
    rng = np.random.default_rng(seed)
    segments = []
    for i in range(2 * n_per_class):
        label = i % 2
        base = np.linspace(-1.0, 1.0, length) * (1.0 if label else -1.0)
        values = base + 0.05 * rng.standard_normal(length)
        values = (values - values.mean()) / values.std(ddof=1)
        segments.append(Segment(values, label, f"s{i:03d}", normalized=True))
    return SegmentDataset(segments, length, {"origin": "toy"})
