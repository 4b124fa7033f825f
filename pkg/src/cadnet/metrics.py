"""Binary classification metrics with class 1 as the positive class.

Ratios with a zero denominator are reported as None (rendered as
"undefined" in text outputs) instead of being coerced to 0 or NaN.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, ShapeError


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self):
        for name in ("tp", "tn", "fp", "fn"):
            if getattr(self, name) < 0:
                raise ArgumentError(f"{name} must be >= 0")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


@dataclass(frozen=True)
class MetricsReport:
    matrix: ConfusionMatrix
    accuracy: float
    misclassification_rate: float
    precision: float | None
    sensitivity: float | None
    specificity: float | None


def confusion(predictions, labels) -> ConfusionMatrix:
    predictions = np.asarray(predictions)
    labels = np.asarray(labels)
    if predictions.shape != labels.shape or predictions.ndim != 1:
        raise ShapeError(
            f"predictions {predictions.shape} and labels {labels.shape} "
            "must be 1-D and equal length"
        )
    if predictions.size == 0:
        raise ArgumentError("no predictions to tally")
    for name, arr in (("predictions", predictions), ("labels", labels)):
        if not np.isin(arr, (0, 1)).all():
            raise ArgumentError(f"{name} must contain only 0 and 1")
    pos = predictions == 1
    true = labels == 1
    return ConfusionMatrix(
        tp=int((pos & true).sum()),
        tn=int((~pos & ~true).sum()),
        fp=int((pos & ~true).sum()),
        fn=int((~pos & true).sum()),
    )


def _ratio(num: int, den: int) -> float | None:
    return num / den if den else None


def derive_metrics(matrix: ConfusionMatrix) -> MetricsReport:
    total = matrix.total
    if total == 0:
        raise ArgumentError("empty confusion matrix")
    return MetricsReport(
        matrix=matrix,
        accuracy=(matrix.tp + matrix.tn) / total,
        misclassification_rate=(matrix.fp + matrix.fn) / total,
        precision=_ratio(matrix.tp, matrix.tp + matrix.fp),
        sensitivity=_ratio(matrix.tp, matrix.tp + matrix.fn),
        specificity=_ratio(matrix.tn, matrix.tn + matrix.fp),
    )


def render_confusion(matrix: ConfusionMatrix) -> str:
    """Text table with actual classes as rows, predicted as columns."""
    cells = [
        ["", "pred non-CAD", "pred CAD"],
        ["actual non-CAD", str(matrix.tn), str(matrix.fp)],
        ["actual CAD", str(matrix.fn), str(matrix.tp)],
    ]
    widths = [max(len(row[i]) for row in cells) for i in range(3)]
    lines = [
        "  ".join(cell.rjust(width) for cell, width in zip(row, widths)).rstrip()
        for row in cells
    ]
    return "\n".join(lines)


def _fmt(value: float | None) -> str:
    return "undefined" if value is None else repr(value)


def metrics_kv(report: MetricsReport) -> dict[str, str]:
    m = report.matrix
    return {
        "tp": str(m.tp),
        "tn": str(m.tn),
        "fp": str(m.fp),
        "fn": str(m.fn),
        "accuracy": _fmt(report.accuracy),
        "misclassification_rate": _fmt(report.misclassification_rate),
        "precision": _fmt(report.precision),
        "sensitivity": _fmt(report.sensitivity),
        "specificity": _fmt(report.specificity),
    }


METRICS_CSV_HEADER = (
    "tp,tn,fp,fn,accuracy,misclassification_rate,precision,sensitivity,specificity"
)


def metrics_csv(report: MetricsReport) -> str:
    kv = metrics_kv(report)
    row = ",".join(kv[key] for key in METRICS_CSV_HEADER.split(","))
    return f"{METRICS_CSV_HEADER}\n{row}\n"
