"""Adam update rule against an independent transcription."""

import numpy as np

import pytest

from cadnet.errors import ArgumentError, ShapeError
from cadnet.nn.adam import Adam


def _reference_step(params, grads, state, lr, b1, b2, eps):
    state["t"] += 1
    t = state["t"]
    for p, g, m, v in zip(params, grads, state["m"], state["v"]):
        m[...] = b1 * m + (1 - b1) * g
        v[...] = b2 * v + (1 - b2) * g * g
        mhat = m / (1 - b1**t)
        vhat = v / (1 - b2**t)
        p -= lr * mhat / (np.sqrt(vhat) + eps)


def test_matches_reference_over_many_steps():
    rng = np.random.default_rng(0)
    for trial in range(20):
        shapes = [(3, 4), (4,), (2, 3, 2)]
        params = [rng.standard_normal(s) for s in shapes]
        mirror = [p.copy() for p in params]
        opt = Adam(params, lr=1e-3)
        state = {
            "t": 0,
            "m": [np.zeros_like(p) for p in mirror],
            "v": [np.zeros_like(p) for p in mirror],
        }
        for _ in range(5):
            grads = [rng.standard_normal(s) for s in shapes]
            opt.step(params, grads)
            _reference_step(mirror, grads, state, 1e-3, 0.9, 0.999, 1e-8)
        for a, b in zip(params, mirror):
            assert np.allclose(a, b, atol=1e-12)


def test_first_step_is_signed_learning_rate():
    # bias correction makes step one equal lr * g / (|g| + eps)
    params = [np.array([1.0, -2.0, 3.0])]
    grads = [np.array([0.5, -4.0, 1e-3])]
    opt = Adam(params, lr=1e-2)
    before = params[0].copy()
    opt.step(params, grads)
    delta = params[0] - before
    assert np.allclose(delta, -1e-2 * np.sign(grads[0]), atol=1e-7)


def test_updates_are_deterministic_and_in_place():
    rng = np.random.default_rng(3)
    grads = [rng.standard_normal((4, 4)) for _ in range(3)]
    runs = []
    for _ in range(2):
        params = [np.ones((4, 4))]
        opt = Adam(params, lr=1e-3)
        original = params[0]
        for g in grads:
            opt.step(params, [g])
        assert params[0] is original
        runs.append(params[0].copy())
    assert np.array_equal(runs[0], runs[1])


def test_gradient_antisymmetry():
    # flipping every gradient flips every update exactly
    g = np.random.default_rng(4).standard_normal((3, 3))
    plus = [np.zeros((3, 3))]
    minus = [np.zeros((3, 3))]
    opt_p = Adam(plus, lr=1e-3)
    opt_m = Adam(minus, lr=1e-3)
    for _ in range(5):
        opt_p.step(plus, [g])
        opt_m.step(minus, [-g])
    assert np.array_equal(plus[0], -minus[0])


def test_second_step_differs_from_first():
    params = [np.zeros(3)]
    opt = Adam(params, lr=1e-3)
    g = [np.ones(3)]
    opt.step(params, g)
    first = params[0].copy()
    opt.step(params, g)
    assert not np.array_equal(params[0] - first, first)


def test_float32_state_stays_float32():
    params = [np.ones((2, 2), dtype=np.float32)]
    opt = Adam(params, lr=1e-3)
    opt.step(params, [np.ones((2, 2), dtype=np.float32)])
    assert params[0].dtype == np.float32


def test_validation():
    with pytest.raises(ArgumentError):
        Adam([np.ones(2)], lr=-1.0)
    with pytest.raises(ArgumentError):
        Adam([np.ones(2)], beta1=1.0)
    with pytest.raises(ArgumentError):
        Adam([np.ones(2)], beta2=-0.1)
    with pytest.raises(ArgumentError):
        Adam([np.ones(2)], eps=0.0)
    opt = Adam([np.ones((2, 2))])
    with pytest.raises(ShapeError):
        opt.step([np.ones((2, 2))], [np.ones(3)])
    with pytest.raises(ShapeError):
        opt.step([np.ones((2, 2))], [])
