"""Layer-level forward/backward behavior."""

import numpy as np

import pytest

from cadnet.errors import ArgumentError, ShapeError, StateError
from cadnet.nn.layers import (
    Conv1D,
    Dense,
    Dropout,
    Flatten,
    MaxPool1D,
    ReLU,
    Softmax,
)
from cadnet.rng import np_generator


def _projection_grad(layer, x, h=1e-6, probes=15, seed=0, **fwd):
    """Check layer.backward against finite differences of sum(out * r)."""
    rng = np.random.default_rng(seed)
    out = layer.forward(x, **fwd)
    r = rng.standard_normal(out.shape)
    gx = layer.backward(r)
    assert gx.shape == x.shape
    for _ in range(probes):
        idx = tuple(int(rng.integers(d)) for d in x.shape)
        bumped = x.copy()
        bumped[idx] += h
        fp = float((layer.forward(bumped, **fwd) * r).sum())
        bumped[idx] -= 2 * h
        fm = float((layer.forward(bumped, **fwd) * r).sum())
        layer.forward(x, **fwd)  # restore the cache for the caller
        numeric = (fp - fm) / (2 * h)
        assert abs(gx[idx] - numeric) < 1e-5


# --- conv ---


def test_conv_same_length_for_all_kernels():
    rng = np.random.default_rng(0)
    for kernel in range(1, 9):
        for length in (1, 2, 5, 11):
            conv = Conv1D(2, 3, kernel, dtype=np.float64)
            conv.initialize(np_generator(1, kernel, length))
            out = conv.forward(rng.standard_normal((2, 2, length)))
            assert out.shape == (2, 3, length)
            assert conv.out_shape((2, length)) == (3, length)
            assert conv.pad_left == (kernel - 1) // 2
            assert conv.pad_left + conv.pad_right == kernel - 1


def test_conv_he_initialization_spread():
    conv = Conv1D(64, 128, 16, dtype=np.float64)
    conv.initialize(np_generator(3))
    std = np.sqrt(2.0 / (64 * 16))
    assert abs(conv.w.std() / std - 1.0) < 0.05
    assert abs(conv.w.mean()) < std / 20
    assert np.all(conv.b == 0)


def test_conv_backward_matches_projection():
    conv = Conv1D(2, 3, 5, dtype=np.float64)
    conv.initialize(np_generator(4))
    x = np.random.default_rng(1).standard_normal((2, 2, 7))
    _projection_grad(conv, x)


def test_conv_weight_gradients_match_projection():
    conv = Conv1D(1, 2, 3, dtype=np.float64)
    conv.initialize(np_generator(5))
    rng = np.random.default_rng(2)
    x = rng.standard_normal((2, 1, 6))
    out = conv.forward(x)
    r = rng.standard_normal(out.shape)
    conv.backward(r)
    gw = conv.gw.copy()
    h = 1e-6
    for idx in np.ndindex(conv.w.shape):
        conv.w[idx] += h
        fp = float((conv.forward(x) * r).sum())
        conv.w[idx] -= 2 * h
        fm = float((conv.forward(x) * r).sum())
        conv.w[idx] += h
        assert abs(gw[idx] - (fp - fm) / (2 * h)) < 1e-6


def test_conv_validation_and_state():
    with pytest.raises(ArgumentError):
        Conv1D(0, 1, 3)
    conv = Conv1D(2, 3, 3)
    with pytest.raises(ShapeError):
        conv.forward(np.zeros((1, 4, 5)))
    with pytest.raises(StateError):
        conv.backward(np.zeros((1, 3, 5)))


# --- relu ---


def test_relu_idempotent_and_masked_backward():
    rng = np.random.default_rng(7)
    relu = ReLU()
    for _ in range(50):
        x = rng.standard_normal((3, 4)) * 10
        once = relu.forward(x)
        twice = relu.forward(once)
        assert np.array_equal(once, twice)
        g = rng.standard_normal(x.shape)
        relu.forward(x)
        gx = relu.backward(g)
        assert np.array_equal(gx, np.where(x > 0, g, 0.0))


def test_relu_decision_state_is_a_copy():
    relu = ReLU()
    assert relu.decision_state() is None
    x = np.array([[1.0, -1.0]])
    relu.forward(x)
    state = relu.decision_state()
    assert np.array_equal(state, [[True, False]])
    state[0, 0] = False
    assert np.array_equal(relu.decision_state(), [[True, False]])


# --- dropout ---


def test_dropout_identity_paths():
    x = np.random.default_rng(0).standard_normal((4, 5)).astype(np.float32)
    assert Dropout(0.0).forward(x, training=True, rng=np_generator(0)) is x
    assert Dropout(0.4).forward(x, training=False) is x


def test_dropout_training_scales_kept_units():
    rng = np_generator(8)
    x = np.ones((200, 200), dtype=np.float32)
    drop = Dropout(0.3)
    out = drop.forward(x, training=True, rng=rng)
    assert out.dtype == np.float32
    kept = out != 0
    assert abs(kept.mean() - 0.7) < 0.02
    scale = np.float32(1.0) / np.float32(0.7)
    assert np.all(out[kept] == scale)
    g = np.ones_like(x)
    gx = drop.backward(g)
    assert np.array_equal(gx != 0, kept)
    assert np.all(gx[kept] == scale)


def test_dropout_validation():
    with pytest.raises(ArgumentError):
        Dropout(1.0)
    with pytest.raises(ArgumentError):
        Dropout(-0.1)
    with pytest.raises(ArgumentError):
        Dropout(0.5).forward(np.ones((2, 2)), training=True, rng=None)


# --- maxpool ---


def test_maxpool_monotone_input_keeps_last_of_each_window():
    pool = MaxPool1D(4)
    x = np.arange(24.0).reshape(1, 2, 12)
    out = pool.forward(x)
    assert out.shape == (1, 2, 3)
    assert np.array_equal(out[0, 0], [3.0, 7.0, 11.0])


def test_maxpool_length_law_and_short_input():
    for pool_width in (2, 3, 128):
        pool = MaxPool1D(pool_width)
        for length in (1, 2, 5, 127, 128, 129, 300):
            x = np.random.default_rng(length).standard_normal((1, 2, length))
            out = pool.forward(x)
            expected = max(1, length // pool_width)
            assert out.shape == (1, 2, expected)
            assert pool.out_shape((2, length)) == (2, expected)
            if length < pool_width:
                assert np.array_equal(out[..., 0], x.max(axis=2))


def test_maxpool_tail_and_ties_route_gradients():
    pool = MaxPool1D(2)
    x = np.array([[[5.0, 5.0, 1.0, 2.0, 9.0]]])  # tie, normal window, tail
    out = pool.forward(x)
    assert np.array_equal(out, [[[5.0, 2.0]]])
    gx = pool.backward(np.array([[[1.0, 2.0]]]))
    # first-occurrence tie keeps index 0; the 5th sample is dropped tail
    assert np.array_equal(gx, [[[1.0, 0.0, 0.0, 2.0, 0.0]]])


def test_maxpool_backward_matches_projection():
    pool = MaxPool1D(3)
    x = np.random.default_rng(3).standard_normal((2, 2, 10))
    _projection_grad(pool, x)


def test_maxpool_decision_state():
    pool = MaxPool1D(2)
    assert pool.decision_state() is None
    pool.forward(np.array([[[1.0, 3.0, 4.0, 2.0]]]))
    assert np.array_equal(pool.decision_state(), [[[1, 0]]])


def test_maxpool_validation():
    with pytest.raises(ArgumentError):
        MaxPool1D(0)
    with pytest.raises(StateError):
        MaxPool1D(2).backward(np.zeros((1, 1, 1)))


# --- flatten / dense ---


def test_flatten_round_trip():
    flat = Flatten()
    x = np.arange(24.0).reshape(2, 3, 4)
    out = flat.forward(x)
    assert out.shape == (2, 12)
    assert flat.out_shape((3, 4)) == (12,)
    back = flat.backward(out)
    assert np.array_equal(back, x)


def test_dense_matches_manual_affine():
    dense = Dense(3, 2, dtype=np.float64)
    dense.w[...] = [[1.0, 2.0, 3.0], [0.0, -1.0, 1.0]]
    dense.b[...] = [0.5, -0.5]
    x = np.array([[1.0, 1.0, 1.0], [2.0, 0.0, -1.0]])
    assert np.array_equal(dense.forward(x), x @ dense.w.T + dense.b)


def test_dense_backward_matches_projection():
    dense = Dense(4, 3, dtype=np.float64)
    dense.initialize(np_generator(6))
    x = np.random.default_rng(4).standard_normal((5, 4))
    _projection_grad(dense, x)
    r = np.random.default_rng(5).standard_normal((5, 3))
    dense.forward(x)
    dense.backward(r)
    assert np.allclose(dense.gw, r.T @ x)
    assert np.allclose(dense.gb, r.sum(axis=0))


def test_dense_validation():
    with pytest.raises(ArgumentError):
        Dense(0, 1)
    dense = Dense(3, 2)
    with pytest.raises(ShapeError):
        dense.forward(np.zeros((2, 4)))
    with pytest.raises(StateError):
        dense.backward(np.zeros((2, 2)))


# --- softmax ---


def test_softmax_layer_rows_sum_to_one_in_float64():
    layer = Softmax()
    rng = np.random.default_rng(9)
    for _ in range(100):
        logits = (rng.standard_normal((4, 2)) * 50).astype(np.float32)
        out = layer.forward(logits)
        assert out.dtype == np.float64
        assert np.all(np.abs(out.sum(axis=1) - 1.0) <= 1e-12)


def test_softmax_layer_backward_matches_projection():
    layer = Softmax()
    x = np.random.default_rng(10).standard_normal((3, 4))
    _projection_grad(layer, x)
