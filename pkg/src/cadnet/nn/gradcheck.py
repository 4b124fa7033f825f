"""Central-difference verification of the analytic gradients."""

from __future__ import annotations

import numpy as np

from ..errors import ArgumentError, NumericError
from ..rng import STREAM_GRADCHECK, np_generator


def _decision_snapshot(model) -> list[np.ndarray]:
    """Discrete choices (ReLU signs, pool argmaxes) of the last forward."""
    return [d for layer in model.layers if (d := layer.decision_state()) is not None]


def _same_decisions(a: list[np.ndarray], b: list[np.ndarray]) -> bool:
    return len(a) == len(b) and all(np.array_equal(u, v) for u, v in zip(a, b))


def grad_check(
    model,
    x,
    y,
    samples: int = 200,
    step: float = 1e-3,
    seed: int = 0,
    report: dict | None = None,
) -> float:
    """Worst relative error between analytic and numerical gradients.

    Draws ``samples`` distinct parameters, perturbs each by +-step,
    measures the loss by central differences, and compares against the
    analytic gradient as |a - n| / max(|a|, |n|, 1e-8), returning the
    maximum over the compared parameters. Runs in inference mode so
    dropout is the identity and every loss evaluation is the same
    deterministic function. Use a float64 model: at float32 the finite
    differences drown in rounding noise regardless of step size.

    A central difference estimates the derivative only while the whole
    stencil stays inside one linear region of every ReLU and one argmax
    pick of every pool window. When either endpoint disagrees with the
    unperturbed point on any of those discrete choices, the quotient
    measures the kink it straddled rather than the gradient, so that
    parameter is reported as discarded instead of compared; the analytic
    gradient at the unperturbed point is unaffected. Pass a dict as
    ``report`` to receive the compared/discarded counts.
    """
    if samples < 1:
        raise ArgumentError(f"samples must be >= 1, got {samples}")
    if not step > 0:
        raise ArgumentError(f"step must be positive, got {step}")
    _, grads = model.loss_and_grads(x, y)
    base_state = _decision_snapshot(model)
    arrays = [arr for _, arr in model.parameters()]
    sizes = [arr.size for arr in arrays]
    total = sum(sizes)
    if total == 0:
        if report is not None:
            report.update(compared=0, discarded=0)
        return 0.0
    bounds = np.cumsum(sizes)
    rng = np_generator(seed, STREAM_GRADCHECK)
    picks = rng.choice(total, size=min(samples, total), replace=False)
    worst = 0.0
    compared = 0
    discarded = 0
    for flat in picks:
        ai = int(np.searchsorted(bounds, flat, side="right"))
        li = int(flat - (bounds[ai - 1] if ai else 0))
        arr = arrays[ai]
        orig = arr.flat[li]
        arr.flat[li] = orig + step
        lp = model.loss(x, y)
        plus_state = _decision_snapshot(model)
        arr.flat[li] = orig - step
        lm = model.loss(x, y)
        minus_state = _decision_snapshot(model)
        arr.flat[li] = orig
        if not (
            _same_decisions(plus_state, base_state)
            and _same_decisions(minus_state, base_state)
        ):
            discarded += 1
            continue
        numeric = (lp - lm) / (2.0 * step)
        analytic = float(grads[ai].flat[li])
        rel = abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-8)
        worst = max(worst, rel)
        compared += 1
    if compared == 0:
        raise NumericError(
            "every sampled stencil crossed an activation boundary; shrink step"
        )
    if report is not None:
        report.update(compared=compared, discarded=discarded)
    return worst
