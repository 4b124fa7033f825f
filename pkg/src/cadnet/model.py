"""Model configuration, assembly, and checkpoint serialization.

The architecture is a fixed layer order: each conv block is conv, relu,
and an optional dropout; after the last block come max pooling, flatten,
a dense layer with relu and optional dropout, the 2-way dense head, and
softmax. Dropout layers with rate 0 are omitted entirely rather than
built as no-ops.

Checkpoint format (little-endian throughout):

* 8-byte magic ``CADCNN1\\0``
* u32 version (currently 1)
* u32 byte length of a UTF-8 ``key=value`` config block, then the block
* for every parameterized layer in order, weights then bias: a u64
  element count followed by that many float32 values

Parameters are always stored as float32; loading a checkpoint restores
bit-identical float32 weights.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, fields, replace

import numpy as np

from .configfile import parse_kv
from .errors import (
    ArgumentError,
    CadnetError,
    CorruptionError,
    FormatError,
    ShapeError,
    StateError,
)
from .nn.adam import Adam  # noqa: F401  (re-exported for training callers)
from .nn.layers import Conv1D, Dense, Dropout, Flatten, Layer, MaxPool1D, ReLU, Softmax
from .nn.loss import softmax, softmax_xent
from .rng import STREAM_WEIGHT_INIT, np_generator

MAGIC = b"CADCNN1\x00"
VERSION = 1

_DTYPES = {"float32": np.float32, "float64": np.float64}


@dataclass(frozen=True)
class ModelConfig:
    """Architecture and training hyperparameters.

    ``dtype`` selects the in-memory parameter precision; float32 is the
    default and matches the checkpoint format, float64 exists for
    numerical verification such as gradient checking.
    """

    input_length: int
    conv_filters: tuple[int, ...] = (512, 256, 256, 256)
    kernel: int = 32
    conv_dropout: tuple[float, ...] = (0.2, 0.2, 0.2, 0.0)
    pool: int = 128
    dense_units: int = 128
    head_dropout: float = 0.5
    classes: int = 2
    learning_rate: float = 1e-4
    batch_size: int = 32
    epochs: int = 50
    seed: int = 0
    dtype: str = "float32"
    early_stop_patience: int | None = None
    target_train_acc: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "conv_filters", tuple(int(f) for f in self.conv_filters))
        object.__setattr__(self, "conv_dropout", tuple(float(r) for r in self.conv_dropout))
        if self.input_length < 1:
            raise ArgumentError(f"input_length must be >= 1, got {self.input_length}")
        if not self.conv_filters or min(self.conv_filters) < 1:
            raise ArgumentError("conv_filters must be non-empty positive counts")
        if len(self.conv_dropout) != len(self.conv_filters):
            raise ArgumentError(
                f"{len(self.conv_dropout)} dropout rates for "
                f"{len(self.conv_filters)} conv blocks"
            )
        if self.kernel < 1:
            raise ArgumentError(f"kernel must be >= 1, got {self.kernel}")
        for rate in (*self.conv_dropout, self.head_dropout):
            if not 0.0 <= rate < 1.0:
                raise ArgumentError(f"dropout rate must be in [0, 1), got {rate}")
        if self.pool < 1:
            raise ArgumentError(f"pool must be >= 1, got {self.pool}")
        if self.dense_units < 1:
            raise ArgumentError(f"dense_units must be >= 1, got {self.dense_units}")
        if self.classes != 2:
            raise ArgumentError("this is a binary classifier; classes must be 2")
        if self.learning_rate < 0:
            raise ArgumentError(f"learning_rate must be >= 0, got {self.learning_rate}")
        if self.batch_size < 1 or self.epochs < 1:
            raise ArgumentError("batch_size and epochs must be >= 1")
        if self.dtype not in _DTYPES:
            raise ArgumentError(f"dtype must be one of {sorted(_DTYPES)}, got {self.dtype!r}")
        if self.early_stop_patience is not None and self.early_stop_patience < 1:
            raise ArgumentError("early_stop_patience must be >= 1 when set")
        if self.target_train_acc is not None and not 0.0 < self.target_train_acc <= 1.0:
            raise ArgumentError("target_train_acc must be in (0, 1] when set")

    @property
    def pooled_length(self) -> int:
        return max(1, self.input_length // self.pool)

    @property
    def flatten_size(self) -> int:
        return self.conv_filters[-1] * self.pooled_length

    def to_kv(self) -> dict[str, str]:
        out: dict[str, str] = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                out[f.name] = "none"
            elif isinstance(value, tuple):
                out[f.name] = ",".join(repr(v) if isinstance(v, float) else str(v) for v in value)
            elif isinstance(value, float):
                out[f.name] = repr(value)
            else:
                out[f.name] = str(value)
        return out

    @classmethod
    def from_kv(cls, kv: dict[str, str], **overrides) -> "ModelConfig":
        """Build a config from key=value strings plus keyword overrides."""
        parsed: dict = {}
        try:
            for f in fields(cls):
                if f.name not in kv:
                    continue
                raw = kv[f.name].strip()
                if f.name in ("conv_filters",):
                    parsed[f.name] = tuple(int(v) for v in raw.split(","))
                elif f.name in ("conv_dropout",):
                    parsed[f.name] = tuple(float(v) for v in raw.split(","))
                elif f.name in ("early_stop_patience", "target_train_acc"):
                    if raw.lower() == "none":
                        parsed[f.name] = None
                    else:
                        parsed[f.name] = int(raw) if f.name == "early_stop_patience" else float(raw)
                elif f.name == "dtype":
                    parsed[f.name] = raw
                elif f.name in ("head_dropout", "learning_rate"):
                    parsed[f.name] = float(raw)
                else:
                    parsed[f.name] = int(raw)
        except ValueError as exc:
            raise ArgumentError(f"bad config value: {exc}") from None
        parsed.update(overrides)
        if "input_length" not in parsed:
            raise ArgumentError("config needs input_length")
        return cls(**parsed)


MODEL_CONFIG_KEYS = frozenset(f.name for f in fields(ModelConfig))


class Model:
    """A layer stack with a two-phase lifecycle.

    A freshly built model is trainable; ``finalize`` (also called at the
    end of training, and implied by loading a checkpoint) freezes it for
    inference. ``predict`` requires a finalized model so dropout can
    never silently run in training mode at inference time.
    """

    def __init__(self, config: ModelConfig, layers: list[Layer]):
        self.config = config
        self.layers = layers
        self.finalized = False
        self.dtype = _DTYPES[config.dtype]

    def _core_layers(self) -> list[Layer]:
        if self.layers and isinstance(self.layers[-1], Softmax):
            return self.layers[:-1]
        return self.layers

    def parameters(self) -> list[tuple[str, np.ndarray]]:
        """(name, array) pairs in layer order, weights before biases."""
        out = []
        counts: dict[str, int] = {}
        for layer in self.layers:
            pairs = layer.params()
            if not pairs:
                continue
            counts[layer.kind] = counts.get(layer.kind, 0) + 1
            prefix = f"{layer.kind}{counts[layer.kind]}"
            out.extend((f"{prefix}.{name}", arr) for name, arr in pairs)
        return out

    def grad_arrays(self) -> list[np.ndarray]:
        out = []
        for layer in self.layers:
            out.extend(layer.param_grads())
        return out

    def forward_logits(self, x, training: bool = False, rng=None) -> np.ndarray:
        x = np.asarray(x)
        if x.ndim != 3 or x.shape[1] != 1:
            raise ShapeError(f"expected input of shape (B, 1, L), got {x.shape}")
        if x.shape[2] != self.config.input_length:
            raise ShapeError(
                f"input length {x.shape[2]} does not match model length "
                f"{self.config.input_length}"
            )
        h = x.astype(self.dtype, copy=False)
        for layer in self._core_layers():
            h = layer.forward(h, training=training, rng=rng)
        return h

    def backward(self, dlogits) -> np.ndarray:
        g = np.asarray(dlogits).astype(self.dtype, copy=False)
        for layer in reversed(self._core_layers()):
            g = layer.backward(g)
        return g

    def predict(self, x) -> np.ndarray:
        """Class probabilities (float64 rows summing to 1) for a batch."""
        if not self.finalized:
            raise StateError("predict requires a finalized model")
        return softmax(self.forward_logits(x, training=False))

    def loss(self, x, y) -> float:
        """Inference-mode cross-entropy of a batch; used by grad_check."""
        loss, _, _ = softmax_xent(self.forward_logits(x, training=False), y)
        return loss

    def loss_and_grads(self, x, y) -> tuple[float, list[np.ndarray]]:
        """Inference-mode loss plus analytic parameter gradients."""
        logits = self.forward_logits(x, training=False)
        loss, _, dlogits = softmax_xent(logits, y)
        self.backward(dlogits)
        return loss, self.grad_arrays()

    def finalize(self) -> "Model":
        self.finalized = True
        return self


def build_model(config: ModelConfig) -> Model:
    """Assemble and He-initialize the network described by ``config``.

    Each parameterized layer draws its weights from a child seed keyed
    by its ordinal among parameterized layers, so two configs differing
    only in dropout rates initialize identically.
    """
    dtype = _DTYPES[config.dtype]
    layers: list[Layer] = []
    param_idx = 0

    def init(layer):
        nonlocal param_idx
        layer.initialize(np_generator(config.seed, STREAM_WEIGHT_INIT, param_idx))
        param_idx += 1
        return layer

    cin = 1
    for filters, rate in zip(config.conv_filters, config.conv_dropout):
        layers.append(init(Conv1D(cin, filters, config.kernel, dtype=dtype)))
        layers.append(ReLU())
        if rate > 0:
            layers.append(Dropout(rate))
        cin = filters
    layers.append(MaxPool1D(config.pool))
    layers.append(Flatten())
    layers.append(init(Dense(config.flatten_size, config.dense_units, dtype=dtype)))
    layers.append(ReLU())
    if config.head_dropout > 0:
        layers.append(Dropout(config.head_dropout))
    layers.append(init(Dense(config.dense_units, config.classes, dtype=dtype)))
    layers.append(Softmax())
    return Model(config, layers)


def save_checkpoint(model: Model, path) -> None:
    """Write the model to ``path`` in the format described above."""
    kv = model.config.to_kv()
    kv["dtype"] = "float32"  # parameters are stored as float32
    block = "".join(f"{k}={v}\n" for k, v in kv.items()).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", VERSION))
        fh.write(struct.pack("<I", len(block)))
        fh.write(block)
        for _, arr in model.parameters():
            fh.write(struct.pack("<Q", arr.size))
            fh.write(np.ascontiguousarray(arr, dtype="<f4").tobytes())


def load_checkpoint(path) -> Model:
    """Read a checkpoint back into a finalized model."""
    with open(path, "rb") as fh:
        data = fh.read()
    pos = 0

    def take(n: int, what: str) -> bytes:
        nonlocal pos
        if pos + n > len(data):
            raise CorruptionError(f"file truncated while reading {what}")
        chunk = data[pos : pos + n]
        pos += n
        return chunk

    if take(len(MAGIC), "magic") != MAGIC:
        raise FormatError("not a model checkpoint (bad magic)")
    (version,) = struct.unpack("<I", take(4, "version"))
    if version != VERSION:
        raise FormatError(f"unsupported checkpoint version {version}")
    (block_len,) = struct.unpack("<I", take(4, "config length"))
    block = take(block_len, "config block")
    try:
        config = ModelConfig.from_kv(parse_kv(block.decode("utf-8")))
    except (CadnetError, UnicodeDecodeError) as exc:
        raise CorruptionError(f"bad config block: {exc}") from None
    model = build_model(config)
    for name, arr in model.parameters():
        (count,) = struct.unpack("<Q", take(8, f"{name} count"))
        if count != arr.size:
            raise CorruptionError(
                f"{name} holds {count} elements, expected {arr.size}"
            )
        raw = take(4 * count, f"{name} values")
        arr[...] = np.frombuffer(raw, dtype="<f4").reshape(arr.shape)
    if pos != len(data):
        raise CorruptionError(f"{len(data) - pos} trailing bytes after parameters")
    return model.finalize()


def clone_config(config: ModelConfig, **overrides) -> ModelConfig:
    """A copy of ``config`` with the given fields replaced."""
    return replace(config, **overrides)
