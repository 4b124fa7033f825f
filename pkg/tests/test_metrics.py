"""Confusion counts and derived rates against brute-force recounts."""

import numpy as np

import pytest

from cadnet.errors import ArgumentError, ShapeError
from cadnet.metrics import (
    METRICS_CSV_HEADER,
    ConfusionMatrix,
    confusion,
    derive_metrics,
    metrics_csv,
    metrics_kv,
    render_confusion,
)


def test_reference_case_accuracy_and_sensitivity():
    report = derive_metrics(ConfusionMatrix(tp=16, tn=17, fp=3, fn=4))
    assert report.accuracy == 33 / 40
    assert abs(report.accuracy - 0.825) <= 1e-12
    assert report.sensitivity == 16 / 20
    assert abs(report.sensitivity - 0.80) <= 1e-12
    assert report.misclassification_rate == 7 / 40
    assert report.precision == 16 / 19
    assert report.specificity == 17 / 20


def test_random_matrices_match_brute_force_recount():
    rng = np.random.default_rng(0)
    for _ in range(300):
        tp, tn, fp, fn = (int(v) for v in rng.integers(0, 40, 4))
        if tp + tn + fp + fn == 0:
            continue
        preds = np.concatenate(
            [np.ones(tp), np.zeros(tn), np.ones(fp), np.zeros(fn)]
        ).astype(np.int64)
        labels = np.concatenate(
            [np.ones(tp), np.zeros(tn), np.zeros(fp), np.ones(fn)]
        ).astype(np.int64)
        order = rng.permutation(preds.size)
        preds, labels = preds[order], labels[order]

        matrix = confusion(preds, labels)
        assert (matrix.tp, matrix.tn, matrix.fp, matrix.fn) == (tp, tn, fp, fn)

        report = derive_metrics(matrix)
        assert report.accuracy == float(np.mean(preds == labels))
        assert abs(report.accuracy + report.misclassification_rate - 1.0) <= 1e-15
        if tp + fn:
            assert report.sensitivity == tp / (tp + fn)
        else:
            assert report.sensitivity is None


def test_zero_denominators_are_undefined_not_crashes():
    report = derive_metrics(ConfusionMatrix(tp=0, tn=5, fp=0, fn=0))
    assert report.precision is None
    assert report.sensitivity is None
    assert report.specificity == 1.0
    kv = metrics_kv(report)
    assert kv["precision"] == "undefined"
    assert kv["accuracy"] == repr(1.0)


def test_validation():
    with pytest.raises(ArgumentError):
        ConfusionMatrix(tp=-1, tn=0, fp=0, fn=0)
    with pytest.raises(ArgumentError):
        derive_metrics(ConfusionMatrix(0, 0, 0, 0))
    with pytest.raises(ShapeError):
        confusion(np.zeros(3, dtype=np.int64), np.zeros(4, dtype=np.int64))
    with pytest.raises(ShapeError):
        confusion(np.zeros((2, 2), dtype=np.int64), np.zeros((2, 2), dtype=np.int64))
    with pytest.raises(ArgumentError):
        confusion(np.array([0, 2]), np.array([0, 1]))
    with pytest.raises(ArgumentError):
        confusion(np.array([], dtype=np.int64), np.array([], dtype=np.int64))


def test_render_confusion_layout():
    text = render_confusion(ConfusionMatrix(tp=16, tn=17, fp=3, fn=4))
    lines = text.splitlines()
    assert len(lines) == 3
    assert lines[0].endswith("pred non-CAD  pred CAD")
    assert lines[1].startswith("actual non-CAD")
    assert lines[2].lstrip().startswith("actual CAD")
    # counts land under their column headings
    assert "17" in lines[1] and "3" in lines[1]
    assert "4" in lines[2] and "16" in lines[2]


def test_metrics_csv_shape():
    report = derive_metrics(ConfusionMatrix(tp=16, tn=17, fp=3, fn=4))
    text = metrics_csv(report)
    header, row, trailer = text.split("\n")
    assert header == METRICS_CSV_HEADER
    assert trailer == ""
    cells = row.split(",")
    assert cells[:4] == ["16", "17", "3", "4"]
    assert float(cells[4]) == 33 / 40
