"""Softmax, cross-entropy, and the fused gradient."""

import math

import numpy as np

import pytest

from cadnet.errors import ArgumentError, ShapeError
from cadnet.nn.loss import CE_CLIP, cross_entropy, softmax, softmax_xent


def test_softmax_uniform_and_shift_invariance():
    assert np.array_equal(softmax(np.zeros((1, 2))), [[0.5, 0.5]])
    logits = np.array([[1.0, 3.0], [-2.0, 2.0]])
    shifted = softmax(logits + 1000.0)
    assert np.allclose(shifted, softmax(logits), atol=1e-15)


def test_softmax_rows_sum_to_one_under_extreme_logits():
    rng = np.random.default_rng(0)
    for scale in (1.0, 100.0, 1e4):
        logits = rng.standard_normal((64, 2)) * scale
        probs = softmax(logits)
        assert probs.dtype == np.float64
        assert np.all(np.isfinite(probs))
        assert np.all(np.abs(probs.sum(axis=1) - 1.0) <= 1e-12)


def test_softmax_requires_2d():
    with pytest.raises(ShapeError):
        softmax(np.zeros(4))


def test_cross_entropy_known_values():
    # uniform two-class prediction costs exactly ln 2
    probs = np.array([[0.5, 0.5], [0.5, 0.5]])
    labels = np.array([0, 1])
    assert abs(cross_entropy(probs, labels) - math.log(2.0)) <= 1e-15
    # a confident correct prediction costs nothing
    assert cross_entropy(np.array([[1.0, 0.0]]), np.array([0])) == 0.0
    # a confident wrong prediction is clamped, not infinite
    worst = cross_entropy(np.array([[0.0, 1.0]]), np.array([0]))
    assert worst == -math.log(CE_CLIP)
    assert math.isfinite(worst)


def test_cross_entropy_validation():
    good = np.array([[0.5, 0.5]])
    with pytest.raises(ArgumentError):
        cross_entropy(np.array([[0.9, 0.9]]), np.array([0]))
    with pytest.raises(ArgumentError):
        cross_entropy(good, np.array([0.0]))  # float labels
    with pytest.raises(ArgumentError):
        cross_entropy(good, np.array([2]))
    with pytest.raises(ShapeError):
        cross_entropy(good, np.array([[0]]))


def test_fused_gradient_closed_form():
    rng = np.random.default_rng(1)
    for _ in range(50):
        batch = int(rng.integers(1, 9))
        logits = rng.standard_normal((batch, 2)) * 5
        labels = rng.integers(0, 2, batch)
        loss, probs, grad = softmax_xent(logits, labels)
        onehot = np.eye(2)[labels]
        assert np.allclose(grad, (probs - onehot) / batch, atol=1e-15)
        assert abs(loss - cross_entropy(probs, labels)) <= 1e-15


def test_fused_gradient_matches_finite_difference():
    # the documented 1e-6 agreement between fused grad and FD on logits
    rng = np.random.default_rng(2)
    for _ in range(10):
        logits = rng.standard_normal((3, 2))
        labels = rng.integers(0, 2, 3)
        _, _, grad = softmax_xent(logits, labels)
        h = 1e-7
        for idx in np.ndindex(logits.shape):
            bumped = logits.copy()
            bumped[idx] += h
            fp = cross_entropy(softmax(bumped), labels)
            bumped[idx] -= 2 * h
            fm = cross_entropy(softmax(bumped), labels)
            numeric = (fp - fm) / (2 * h)
            assert abs(grad[idx] - numeric) < 1e-6
