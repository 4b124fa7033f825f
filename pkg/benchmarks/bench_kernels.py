"""Benchmark the conv kernels across backends, plus one full training step.

Run from the repo root after installing the package:

    python3 benchmarks/bench_kernels.py [--batch 32] [--length 250] [--repeats 5]

Reports per-layer forward / grad-weights throughput for every available
backend at both supported dtypes, then times a complete optimizer step on
the full model so backend choice can be judged end to end.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from cadnet.model import ModelConfig, build_model
from cadnet.nn import available_backends, set_backend
from cadnet.nn.adam import Adam
from cadnet.nn.backend import conv1d_forward, conv1d_grad_weights
from cadnet.nn.loss import softmax_xent
from cadnet.rng import STREAM_GRADCHECK, np_generator

# (name, in_channels, filters, kernel) for the four conv layers.
CONV_SHAPES = (
    ("conv1", 1, 512, 32),
    ("conv2", 512, 256, 32),
    ("conv3", 256, 256, 32),
    ("conv4", 256, 256, 32),
)


def _time(fn, repeats: int) -> float:
    fn()  # warm up allocations and code paths
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_convs(batch: int, length: int, repeats: int) -> None:
    rng = np.random.default_rng(0)
    header = f"{'layer':<8} {'backend':<10} {'dtype':<8} {'fwd ms':>9} {'fwd GF/s':>9} {'gw ms':>9} {'gw GF/s':>9}"
    print(header)
    print("-" * len(header))
    for name, chans, filters, kernel in CONV_SHAPES:
        xpad = rng.standard_normal((batch, chans, length + kernel - 1))
        w = rng.standard_normal((filters, chans, kernel))
        b = rng.standard_normal(filters)
        gout = rng.standard_normal((batch, filters, length))
        flops = 2.0 * batch * length * filters * chans * kernel
        for backend in available_backends():
            prev = set_backend(backend)
            try:
                for dtype in ("float32", "float64"):
                    xc = xpad.astype(dtype)
                    wc = w.astype(dtype)
                    bc = b.astype(dtype)
                    gc = gout.astype(dtype)
                    tf = _time(lambda: conv1d_forward(xc, wc, bc), repeats)
                    tg = _time(lambda: conv1d_grad_weights(xc, gc), repeats)
                    print(
                        f"{name:<8} {backend:<10} {dtype:<8} "
                        f"{tf * 1e3:>9.2f} {flops / tf / 1e9:>9.1f} "
                        f"{tg * 1e3:>9.2f} {flops / tg / 1e9:>9.1f}"
                    )
            finally:
                set_backend(prev)


def bench_training_step(batch: int, length: int, repeats: int) -> None:
    config = ModelConfig(input_length=length, batch_size=batch, seed=0)
    rng = np_generator(0, STREAM_GRADCHECK, 2)
    x = rng.standard_normal((batch, 1, length)).astype(np.float32)
    y = (np.arange(batch) % 2).astype(np.int64)
    drop_rng = np_generator(0, STREAM_GRADCHECK, 3)
    print()
    print(f"full training step (batch {batch}, length {length}):")
    for backend in available_backends():
        prev = set_backend(backend)
        try:
            model = build_model(config)
            params = [arr for _, arr in model.parameters()]
            optim = Adam(params, lr=config.learning_rate)

            def step():
                logits = model.forward_logits(x, training=True, rng=drop_rng)
                _, _, dlogits = softmax_xent(logits, y)
                model.backward(dlogits)
                optim.step(params, model.grad_arrays())

            dt = _time(step, repeats)
            print(f"  {backend:<10} {dt * 1e3:>9.1f} ms/step")
        finally:
            set_backend(prev)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--batch", type=int, default=32)
    parser.add_argument("--length", type=int, default=250)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    print(f"backends available: {', '.join(available_backends())}")
    print(f"batch={args.batch} length={args.length} repeats={args.repeats} (best of)")
    print()
    bench_convs(args.batch, args.length, args.repeats)
    bench_training_step(args.batch, args.length, args.repeats)


if __name__ == "__main__":
    main()
