"""Convolution kernel backend selection.

Two interchangeable implementations exist:

* ``numpy``: im2col plus matmul, so the inner products run in whatever
  BLAS numpy is linked against. On typical builds this is the fastest
  path by a wide margin (see benchmarks/bench_kernels.py for numbers).
* ``compiled``: direct C loops from the bundled extension. No BLAS
  involvement, so its speed is predictable on any build; useful where
  numpy runs a plain reference BLAS, and as the benchmark baseline.

The CADNET_BACKEND environment variable ("numpy", "compiled", "auto")
picks the backend at import time; "auto" means numpy. set_backend
switches at runtime. The input-gradient kernel is derived from the
forward kernel once, here, so each backend only supplies a forward and
a weight-gradient primitive.
"""

from __future__ import annotations

import os
import warnings

import numpy as np

from ..errors import ArgumentError
from . import kernels_numpy

try:
    from . import _ckernels
except ImportError:
    _ckernels = None

_BACKENDS = {"numpy": kernels_numpy}
if _ckernels is not None:
    _BACKENDS["compiled"] = _ckernels

_active_name = "numpy"
_active = kernels_numpy


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def active_backend() -> str:
    return _active_name


def set_backend(name: str) -> str:
    """Select a kernel backend; returns the previously active name."""
    global _active_name, _active
    if name == "auto":
        name = "numpy"
    if name not in _BACKENDS:
        raise ArgumentError(
            f"unknown backend {name!r}, available: {', '.join(available_backends())}"
        )
    previous = _active_name
    _active_name = name
    _active = _BACKENDS[name]
    return previous


def conv1d_forward(xpad: np.ndarray, w: np.ndarray, bias: np.ndarray) -> np.ndarray:
    return _active.conv1d_forward(
        np.ascontiguousarray(xpad), np.ascontiguousarray(w), np.ascontiguousarray(bias)
    )


def conv1d_grad_weights(
    xpad: np.ndarray, gout: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    return _active.conv1d_grad_weights(
        np.ascontiguousarray(xpad), np.ascontiguousarray(gout)
    )


def conv1d_grad_input(gout: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Gradient w.r.t. the padded input.

    Equals the forward kernel applied to the output gradient padded by
    K-1 on both sides, with weights channel-swapped and tap-reversed:
    wT[c, f, j] = w[f, c, K-1-j].
    """
    k = w.shape[2]
    gpad = np.pad(gout, ((0, 0), (0, 0), (k - 1, k - 1)))
    wt = np.ascontiguousarray(w[:, :, ::-1].transpose(1, 0, 2))
    zero_bias = np.zeros(w.shape[1], dtype=w.dtype)
    return conv1d_forward(gpad, wt, zero_bias)


def _init_from_env() -> None:
    name = os.environ.get("CADNET_BACKEND", "auto")
    try:
        set_backend(name)
    except ArgumentError as exc:
        warnings.warn(f"CADNET_BACKEND ignored: {exc}", RuntimeWarning, stacklevel=1)
        set_backend("auto")


_init_from_env()
