"""Layers with explicit forward caches and reverse-mode backward passes.

Every layer stores exactly what its backward pass needs during forward;
calling backward without a preceding forward raises StateError. Gradient
arrays are assigned (not accumulated) on each backward call.
"""

from __future__ import annotations

import numpy as np

from ..errors import ArgumentError, ShapeError, StateError
from . import backend
from .checked import check_finite
from .loss import softmax


class Layer:
    """Base class; parameterless layers inherit the empty param lists."""

    kind = "layer"

    def forward(self, x: np.ndarray, training: bool = False, rng=None) -> np.ndarray:
        raise NotImplementedError

    def backward(self, gout: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def params(self) -> list[tuple[str, np.ndarray]]:
        return []

    def param_grads(self) -> list[np.ndarray]:
        return []

    def out_shape(self, shape: tuple[int, ...]) -> tuple[int, ...]:
        """Per-sample output shape for a per-sample input shape."""
        return shape

    def decision_state(self):
        """Discrete choices made by the last forward pass, if any.

        Layers whose output is only piecewise smooth in their inputs
        (ReLU sign patterns, max-pool argmax picks) expose them here so
        the gradient checker can tell when a finite-difference stencil
        straddles a boundary between linear regions.
        """
        return None

    def _need_cache(self, cache, name: str):
        if cache is None:
            raise StateError(f"{name}.backward called without a stored forward")
        return cache


class Conv1D(Layer):
    """Same-padded cross-correlation, stride 1: (B, C, L) to (B, F, L).

    Zero padding splits K-1 as floor((K-1)/2) on the left and the rest
    on the right, so the output length always equals the input length.
    """

    kind = "conv"

    def __init__(self, in_channels: int, filters: int, kernel: int, dtype=np.float32):
        if min(in_channels, filters, kernel) < 1:
            raise ArgumentError("in_channels, filters, and kernel must be >= 1")
        self.in_channels = in_channels
        self.filters = filters
        self.kernel = kernel
        self.pad_left = (kernel - 1) // 2
        self.pad_right = kernel - 1 - self.pad_left
        self.w = np.zeros((filters, in_channels, kernel), dtype=dtype)
        self.b = np.zeros(filters, dtype=dtype)
        self.gw = np.zeros_like(self.w)
        self.gb = np.zeros_like(self.b)
        self._xpad = None

    def initialize(self, rng: np.random.Generator) -> None:
        """He initialization: std sqrt(2 / (C * K)), zero bias."""
        std = np.sqrt(2.0 / (self.in_channels * self.kernel))
        self.w[...] = rng.normal(0.0, std, self.w.shape)
        self.b[...] = 0.0

    def forward(self, x, training=False, rng=None):
        if x.ndim != 3 or x.shape[1] != self.in_channels:
            raise ShapeError(
                f"conv expects (B, {self.in_channels}, L), got {x.shape}"
            )
        check_finite(x, "conv")
        x = x.astype(self.w.dtype, copy=False)
        self._xpad = np.pad(x, ((0, 0), (0, 0), (self.pad_left, self.pad_right)))
        return backend.conv1d_forward(self._xpad, self.w, self.b)

    def backward(self, gout):
        xpad = self._need_cache(self._xpad, "conv")
        gout = gout.astype(self.w.dtype, copy=False)
        self.gw, self.gb = backend.conv1d_grad_weights(xpad, gout)
        gxpad = backend.conv1d_grad_input(gout, self.w)
        length = xpad.shape[2] - self.pad_left - self.pad_right
        return gxpad[:, :, self.pad_left : self.pad_left + length]

    def params(self):
        return [("w", self.w), ("b", self.b)]

    def param_grads(self):
        return [self.gw, self.gb]

    def out_shape(self, shape):
        return (self.filters, shape[1])


class ReLU(Layer):
    kind = "relu"

    def __init__(self):
        self._mask = None

    def forward(self, x, training=False, rng=None):
        self._mask = x > 0
        return np.where(self._mask, x, x.dtype.type(0))

    def backward(self, gout):
        mask = self._need_cache(self._mask, "relu")
        return np.where(mask, gout, gout.dtype.type(0))

    def decision_state(self):
        return None if self._mask is None else self._mask.copy()


class Dropout(Layer):
    """Inverted dropout: kept units are scaled by 1 / (1 - rate).

    Identity in inference mode and at rate 0; the forward mask is reused
    by backward so the two passes drop the same units.
    """

    kind = "dropout"

    def __init__(self, rate: float):
        if not 0.0 <= rate < 1.0:
            raise ArgumentError(f"dropout rate must be in [0, 1), got {rate}")
        self.rate = rate
        self._scaled_mask = None
        self._identity = None

    def forward(self, x, training=False, rng=None):
        if not training or self.rate == 0.0:
            self._identity = True
            self._scaled_mask = None
            return x
        if rng is None:
            raise ArgumentError("training-mode dropout needs an rng")
        self._identity = False
        keep = 1.0 - self.rate
        mask = rng.random(x.shape) >= self.rate
        self._scaled_mask = mask.astype(x.dtype) * x.dtype.type(1.0 / keep)
        return x * self._scaled_mask

    def backward(self, gout):
        identity = self._need_cache(self._identity, "dropout")
        if identity:
            return gout
        return gout * self._scaled_mask


class MaxPool1D(Layer):
    """Non-overlapping max pooling with output length max(1, L // pool).

    An input shorter than the pool width is reduced by one global max
    window. The tail beyond the last full window is dropped, and ties
    within a window keep the first position; backward routes each output
    gradient to the retained argmax position.
    """

    kind = "maxpool"

    def __init__(self, pool: int):
        if pool < 1:
            raise ArgumentError(f"pool width must be >= 1, got {pool}")
        self.pool = pool
        self._cache = None

    def forward(self, x, training=False, rng=None):
        batch, chans, length = x.shape
        if length < self.pool:
            arg = x.argmax(axis=2)
            out = np.take_along_axis(x, arg[:, :, None], axis=2)
            self._cache = ("global", length, arg)
            return out
        n = length // self.pool
        v = x[:, :, : n * self.pool].reshape(batch, chans, n, self.pool)
        arg = v.argmax(axis=3)
        out = np.take_along_axis(v, arg[..., None], axis=3)[..., 0]
        self._cache = ("windows", length, arg)
        return out

    def decision_state(self):
        return None if self._cache is None else self._cache[2].copy()

    def backward(self, gout):
        mode, length, arg = self._need_cache(self._cache, "maxpool")
        batch, chans = gout.shape[:2]
        gx = np.zeros((batch, chans, length), dtype=gout.dtype)
        if mode == "global":
            np.put_along_axis(gx, arg[:, :, None], gout, axis=2)
            return gx
        n = arg.shape[2]
        gxv = np.zeros((batch, chans, n, self.pool), dtype=gout.dtype)
        np.put_along_axis(gxv, arg[..., None], gout[..., None], axis=3)
        gx[:, :, : n * self.pool] = gxv.reshape(batch, chans, n * self.pool)
        return gx

    def out_shape(self, shape):
        return (shape[0], max(1, shape[1] // self.pool))


class Flatten(Layer):
    kind = "flatten"

    def __init__(self):
        self._shape = None

    def forward(self, x, training=False, rng=None):
        self._shape = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, gout):
        shape = self._need_cache(self._shape, "flatten")
        return gout.reshape(shape)

    def out_shape(self, shape):
        n = 1
        for d in shape:
            n *= d
        return (n,)


class Dense(Layer):
    """Affine layer x @ w.T + b with w of shape (out, in)."""

    kind = "dense"

    def __init__(self, in_features: int, out_features: int, dtype=np.float32):
        if min(in_features, out_features) < 1:
            raise ArgumentError("in_features and out_features must be >= 1")
        self.in_features = in_features
        self.out_features = out_features
        self.w = np.zeros((out_features, in_features), dtype=dtype)
        self.b = np.zeros(out_features, dtype=dtype)
        self.gw = np.zeros_like(self.w)
        self.gb = np.zeros_like(self.b)
        self._x = None

    def initialize(self, rng: np.random.Generator) -> None:
        """He initialization: std sqrt(2 / in_features), zero bias."""
        std = np.sqrt(2.0 / self.in_features)
        self.w[...] = rng.normal(0.0, std, self.w.shape)
        self.b[...] = 0.0

    def forward(self, x, training=False, rng=None):
        if x.ndim != 2 or x.shape[1] != self.in_features:
            raise ShapeError(
                f"dense expects (B, {self.in_features}), got {x.shape}"
            )
        check_finite(x, "dense")
        x = x.astype(self.w.dtype, copy=False)
        self._x = x
        return x @ self.w.T + self.b

    def backward(self, gout):
        x = self._need_cache(self._x, "dense")
        gout = gout.astype(self.w.dtype, copy=False)
        self.gw = gout.T @ x
        self.gb = gout.sum(axis=0)
        return gout @ self.w

    def params(self):
        return [("w", self.w), ("b", self.b)]

    def param_grads(self):
        return [self.gw, self.gb]

    def out_shape(self, shape):
        return (self.out_features,)


class Softmax(Layer):
    """Row-wise softmax, computed and returned in float64.

    Training couples this with the cross-entropy gradient in one fused
    expression, so this layer's own backward only serves standalone use.
    """

    kind = "softmax"

    def __init__(self):
        self._probs = None

    def forward(self, x, training=False, rng=None):
        self._probs = softmax(x)
        return self._probs

    def backward(self, gout):
        probs = self._need_cache(self._probs, "softmax")
        inner = (gout * probs).sum(axis=1, keepdims=True)
        return probs * (gout - inner)
