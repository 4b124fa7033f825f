"""Global toggle for finite-value checks at layer boundaries.

Off by default: the checks cost a pass over every activation. Training
always watches the loss for divergence regardless of this flag.
"""

from __future__ import annotations

import numpy as np

from ..errors import NumericError

_enabled = False


def set_checked(enabled: bool) -> bool:
    """Enable or disable checks; returns the previous setting."""
    global _enabled
    previous = _enabled
    _enabled = bool(enabled)
    return previous


def enabled() -> bool:
    return _enabled


def check_finite(arr: np.ndarray, where: str) -> None:
    """Raise if checks are on and ``arr`` contains NaN or infinity."""
    if _enabled and not np.isfinite(arr).all():
        raise NumericError(f"non-finite values entering {where}")
