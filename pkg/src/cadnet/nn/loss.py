"""Softmax and cross-entropy, always evaluated in float64.

The float64 rule is deliberate: probability rows then sum to 1 at
float64 precision no matter what dtype the logits arrive in, and the
loss stays comparable across model dtypes.
"""

from __future__ import annotations

import numpy as np

from ..errors import ArgumentError, ShapeError
from .checked import check_finite

# Probabilities are clamped to [CE_CLIP, 1] inside the log, so one
# confidently wrong prediction costs at most -log(CE_CLIP) per sample.
CE_CLIP = 1e-12


def softmax(logits: np.ndarray) -> np.ndarray:
    """Row-wise stable softmax of a (B, classes) array, in float64."""
    logits = np.asarray(logits, dtype=np.float64)
    if logits.ndim != 2:
        raise ShapeError(f"softmax expects (B, classes), got {logits.shape}")
    check_finite(logits, "softmax")
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _check_labels(labels: np.ndarray, classes: int) -> np.ndarray:
    labels = np.asarray(labels)
    if labels.ndim != 1:
        raise ShapeError(f"labels must be 1-D, got shape {labels.shape}")
    if not np.issubdtype(labels.dtype, np.integer):
        raise ArgumentError(f"labels must be integers, got dtype {labels.dtype}")
    if labels.size and (labels.min() < 0 or labels.max() >= classes):
        raise ArgumentError(f"labels must be in [0, {classes})")
    return labels.astype(np.int64)


def cross_entropy(probs: np.ndarray, labels: np.ndarray) -> float:
    """Mean negative log probability of the true class."""
    probs = np.asarray(probs, dtype=np.float64)
    if probs.ndim != 2 or probs.shape[0] == 0:
        raise ShapeError(f"probs must be a non-empty (B, classes) array, got {probs.shape}")
    labels = _check_labels(labels, probs.shape[1])
    if labels.shape[0] != probs.shape[0]:
        raise ShapeError(
            f"{probs.shape[0]} probability rows but {labels.shape[0]} labels"
        )
    if not np.allclose(probs.sum(axis=1), 1.0, rtol=0.0, atol=1e-6):
        raise ArgumentError("probability rows must sum to 1")
    p = probs[np.arange(probs.shape[0]), labels]
    return float(-np.log(np.clip(p, CE_CLIP, 1.0)).mean())


def softmax_xent(
    logits: np.ndarray, labels: np.ndarray
) -> tuple[float, np.ndarray, np.ndarray]:
    """Fused loss: returns (loss, probs, dloss/dlogits).

    The gradient is the closed form (probs - onehot(labels)) / B in
    float64; the caller casts it to the model dtype.
    """
    probs = softmax(logits)
    labels = _check_labels(labels, probs.shape[1])
    loss = cross_entropy(probs, labels)
    grad = probs.copy()
    grad[np.arange(probs.shape[0]), labels] -= 1.0
    grad /= probs.shape[0]
    return loss, probs, grad
