"""Neural network building blocks: kernels, layers, loss, optimizer."""

from .adam import Adam
from .backend import active_backend, available_backends, set_backend
from .checked import enabled as checked_enabled
from .checked import set_checked
from .gradcheck import grad_check
from .layers import (
    Conv1D,
    Dense,
    Dropout,
    Flatten,
    Layer,
    MaxPool1D,
    ReLU,
    Softmax,
)
from .loss import CE_CLIP, cross_entropy, softmax, softmax_xent

__all__ = [
    "Adam",
    "CE_CLIP",
    "Conv1D",
    "Dense",
    "Dropout",
    "Flatten",
    "Layer",
    "MaxPool1D",
    "ReLU",
    "Softmax",
    "active_backend",
    "available_backends",
    "checked_enabled",
    "cross_entropy",
    "grad_check",
    "set_backend",
    "set_checked",
    "softmax",
    "softmax_xent",
]
