"""Finite-difference verification of the whole-model gradients."""

import numpy as np

import pytest

from cadnet.errors import ArgumentError, NumericError
from cadnet.model import Model, build_model
from cadnet.nn.gradcheck import grad_check
from cadnet.nn.layers import Dense, Flatten, ReLU
from cadnet.rng import STREAM_GRADCHECK, np_generator
from helpers import tiny_config


def _tiny_model(seed=5, **overrides):
    config = tiny_config(seed=seed, **overrides)
    model = build_model(config)
    rng = np_generator(seed, STREAM_GRADCHECK, 1)
    x = rng.standard_normal((4, 1, config.input_length))
    y = np.array([0, 1, 0, 1], dtype=np.int64)
    return model, x, y


def test_clean_model_passes_exhaustively():
    model, x, y = _tiny_model()
    total = sum(arr.size for _, arr in model.parameters())
    report = {}
    worst = grad_check(model, x, y, samples=total, step=1e-3, seed=9, report=report)
    assert worst < 1e-4
    assert report["compared"] + report["discarded"] == total
    assert report["compared"] > 0


def test_gradcheck_is_deterministic():
    model, x, y = _tiny_model()
    a = grad_check(model, x, y, samples=10, seed=3)
    b = grad_check(model, x, y, samples=10, seed=3)
    assert a == b


def test_doubled_gradient_is_detected():
    model, x, y = _tiny_model()
    total = sum(arr.size for _, arr in model.parameters())
    original = model.loss_and_grads

    def poisoned(px, py):
        loss, grads = original(px, py)
        grads[0] = grads[0] * 2.0
        return loss, grads

    model.loss_and_grads = poisoned
    worst = grad_check(model, x, y, samples=total, step=1e-3, seed=9)
    assert worst > 0.3


def test_zero_parameter_model_scores_zero():
    config = tiny_config(input_length=2)
    model = Model(config, [Flatten()])
    x = np.array([[[0.3, -0.2]], [[0.1, 0.4]]])
    y = np.array([0, 1], dtype=np.int64)
    report = {}
    assert grad_check(model, x, y, samples=5, report=report) == 0.0
    assert report == {"compared": 0, "discarded": 0}


def test_kink_straddling_stencil_is_discarded():
    # both relu pre-activations sit inside the +-1e-3 stencil, so every
    # perturbation flips a sign and no comparison is possible
    config = tiny_config(input_length=1)
    dense1 = Dense(1, 2, dtype=np.float64)
    dense1.w[...] = [[0.0005], [-0.0005]]
    dense1.b[...] = 0.0
    model = Model(config, [Flatten(), dense1, ReLU()])
    x = np.array([[[1.0]], [[1.0]]])
    y = np.array([0, 1], dtype=np.int64)
    with pytest.raises(NumericError):
        grad_check(model, x, y, samples=4, step=1e-3, seed=0)


def test_validation():
    model, x, y = _tiny_model()
    with pytest.raises(ArgumentError):
        grad_check(model, x, y, samples=0)
    with pytest.raises(ArgumentError):
        grad_check(model, x, y, step=0.0)
