"""Mini-batch training loop, per-epoch reporting, and evaluation."""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass

import numpy as np

from .configfile import save_kv
from .errors import (
    DataError,
    DivergenceError,
    EmptyDatasetError,
    ShapeError,
    StateError,
)
from .metrics import MetricsReport, confusion, derive_metrics
from .model import Model
from .nn.adam import Adam
from .nn.loss import softmax, softmax_xent
from .records import SegmentDataset
from .rng import STREAM_DROPOUT, STREAM_EPOCH_SHUFFLE, XorShift64Star, derive_seed, np_generator


@dataclass(frozen=True)
class EpochStats:
    epoch: int
    train_loss: float
    train_acc: float
    test_acc: float
    test_loss: float


@dataclass(frozen=True)
class TrainReport:
    epochs: tuple[EpochStats, ...]
    wall_seconds: float
    final_epoch: int
    stopped: str
    seed: int
    config_kv: dict[str, str]


def _check_dataset(dataset: SegmentDataset, name: str, length: int) -> None:
    if not dataset.segments:
        raise EmptyDatasetError(f"{name} dataset has no segments")
    if dataset.segment_length != length:
        raise ShapeError(
            f"{name} segments are {dataset.segment_length} samples long, "
            f"model expects {length}"
        )


def _batched_probs(model: Model, x: np.ndarray, batch_size: int) -> np.ndarray:
    """Inference-mode probabilities in batches; works mid-training."""
    parts = []
    for s in range(0, x.shape[0], batch_size):
        logits = model.forward_logits(x[s : s + batch_size], training=False)
        parts.append(softmax(logits))
    return np.concatenate(parts)


def train(model: Model, train_set: SegmentDataset, test_set: SegmentDataset) -> TrainReport:
    """Train in place with Adam; finalizes the model and reports history.

    Batches are reshuffled every epoch under a seed derived from the
    config seed and the epoch number. Optional stopping: when
    ``target_train_acc`` is reached, or when test loss has not improved
    for ``early_stop_patience`` consecutive epochs.
    """
    if model.finalized:
        raise StateError("model is finalized; build a fresh model to train")
    cfg = model.config
    _check_dataset(train_set, "train", cfg.input_length)
    _check_dataset(test_set, "test", cfg.input_length)
    x_train, y_train = train_set.as_arrays(model.dtype)
    x_test, y_test = test_set.as_arrays(model.dtype)
    if np.unique(y_train).size < 2:
        raise DataError("train set must contain both classes")

    start = time.perf_counter()
    params = [arr for _, arr in model.parameters()]
    optimizer = Adam(params, lr=cfg.learning_rate)
    dropout_rng = np_generator(cfg.seed, STREAM_DROPOUT)
    n = x_train.shape[0]
    history: list[EpochStats] = []
    stopped = "completed"
    best_test_loss = math.inf
    epochs_since_best = 0

    for epoch in range(1, cfg.epochs + 1):
        order = list(range(n))
        XorShift64Star(derive_seed(cfg.seed, STREAM_EPOCH_SHUFFLE, epoch)).shuffle(order)
        loss_sum = 0.0
        correct = 0
        for batch_idx, s in enumerate(range(0, n, cfg.batch_size)):
            idx = order[s : s + cfg.batch_size]
            xb, yb = x_train[idx], y_train[idx]
            logits = model.forward_logits(xb, training=True, rng=dropout_rng)
            if not np.isfinite(logits).all():
                raise DivergenceError(epoch, batch_idx)
            loss, probs, dlogits = softmax_xent(logits, yb)
            if not math.isfinite(loss):
                raise DivergenceError(epoch, batch_idx)
            model.backward(dlogits)
            optimizer.step(params, model.grad_arrays())
            loss_sum += loss * len(idx)
            correct += int((probs.argmax(axis=1) == yb).sum())

        test_probs = _batched_probs(model, x_test, cfg.batch_size)
        p_true = test_probs[np.arange(y_test.size), y_test]
        test_loss = float(-np.log(np.clip(p_true, 1e-12, 1.0)).mean())
        stats = EpochStats(
            epoch=epoch,
            train_loss=loss_sum / n,
            train_acc=correct / n,
            test_acc=float((test_probs.argmax(axis=1) == y_test).mean()),
            test_loss=test_loss,
        )
        history.append(stats)

        if cfg.target_train_acc is not None and stats.train_acc >= cfg.target_train_acc:
            stopped = "target_reached"
            break
        if cfg.early_stop_patience is not None:
            if test_loss < best_test_loss:
                best_test_loss = test_loss
                epochs_since_best = 0
            else:
                epochs_since_best += 1
                if epochs_since_best >= cfg.early_stop_patience:
                    stopped = "no_improvement"
                    break

    model.finalize()
    return TrainReport(
        epochs=tuple(history),
        wall_seconds=time.perf_counter() - start,
        final_epoch=history[-1].epoch,
        stopped=stopped,
        seed=cfg.seed,
        config_kv=cfg.to_kv(),
    )


def evaluate(model: Model, dataset: SegmentDataset) -> MetricsReport:
    """Metrics of a finalized model on a dataset."""
    if not model.finalized:
        raise StateError("evaluate requires a finalized model")
    if not dataset.segments:
        raise EmptyDatasetError("nothing to evaluate")
    _check_dataset(dataset, "evaluation", model.config.input_length)
    x, y = dataset.as_arrays(model.dtype)
    probs = _batched_probs(model, x, model.config.batch_size)
    return derive_metrics(confusion(probs.argmax(axis=1), y))


HISTORY_CSV_HEADER = "epoch,train_loss,train_acc,test_acc"


def history_csv(report: TrainReport) -> str:
    lines = [HISTORY_CSV_HEADER]
    for s in report.epochs:
        lines.append(f"{s.epoch},{s.train_loss!r},{s.train_acc!r},{s.test_acc!r}")
    return "\n".join(lines) + "\n"


def save_history(report: TrainReport, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(history_csv(report))


def summary_kv(report: TrainReport) -> dict[str, str]:
    last = report.epochs[-1]
    out = {
        "final_epoch": str(report.final_epoch),
        "stopped": report.stopped,
        "wall_seconds": repr(report.wall_seconds),
        "train_loss": repr(last.train_loss),
        "train_acc": repr(last.train_acc),
        "test_acc": repr(last.test_acc),
        "seed": str(report.seed),
    }
    out.update({f"config_{k}": v for k, v in report.config_kv.items()})
    return out


def save_summary(report: TrainReport, path: str | os.PathLike) -> None:
    save_kv(summary_kv(report), path)
