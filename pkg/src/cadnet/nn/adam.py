"""Adam optimizer with element-wise moment estimates."""

from __future__ import annotations

import numpy as np

from ..errors import ArgumentError, ShapeError


class Adam:
    """Standard Adam update, applied in place to the given parameters.

    Per step t (incremented first): m = b1*m + (1-b1)*g,
    v = b2*v + (1-b2)*g*g, then the bias-corrected step
    p -= lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps).
    Moments are kept in each parameter's own dtype.
    """

    def __init__(
        self,
        params: list[np.ndarray],
        lr: float = 1e-4,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ):
        if lr < 0:
            raise ArgumentError(f"learning rate must be >= 0, got {lr}")
        if not (0.0 <= beta1 < 1.0 and 0.0 <= beta2 < 1.0):
            raise ArgumentError("beta1 and beta2 must be in [0, 1)")
        if not eps > 0:
            raise ArgumentError(f"eps must be positive, got {eps}")
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self._shapes = [p.shape for p in params]
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
        if len(params) != len(self._shapes) or len(grads) != len(self._shapes):
            raise ShapeError(
                f"expected {len(self._shapes)} parameter and gradient arrays"
            )
        for p, g, shape in zip(params, grads, self._shapes):
            if p.shape != shape or g.shape != shape:
                raise ShapeError(
                    f"parameter/gradient shape {p.shape}/{g.shape}, expected {shape}"
                )
        self.t += 1
        bc1 = 1.0 - self.beta1**self.t
        bc2 = 1.0 - self.beta2**self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            g = g.astype(p.dtype, copy=False)
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * (g * g)
            p -= self.lr * (m / bc1) / (np.sqrt(v / bc2) + self.eps)
