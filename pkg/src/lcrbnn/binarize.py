"""Sign binarization and its straight-through gradient surrogate."""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InputError


@dataclass(frozen=True)
class SignConfig:
    """Binarization behavior: sign(0) is +1; ste_clip is the HardTanh half-width."""

    ste_clip: float = 1.0

    def __post_init__(self):
        if self.ste_clip <= 0:
            raise InputError(f"ste_clip must be positive, got {self.ste_clip}")


DEFAULT_SIGN = SignConfig()


def sign(x: np.ndarray) -> np.ndarray:
    """Map to {-1, +1}; zero maps to +1 so packing and float paths agree."""
    x = np.asarray(x, dtype=np.float32)
    return np.where(x >= 0, np.float32(1.0), np.float32(-1.0))


def ste_backward(
    upstream: np.ndarray,
    pre_binarization_input: np.ndarray,
    cfg: SignConfig = DEFAULT_SIGN,
) -> np.ndarray:
    """Pass upstream gradient where |input| <= ste_clip, zero elsewhere.

    The boundary is inclusive: an input sitting exactly at the clip value
    still passes gradient.
    """
    upstream = np.asarray(upstream, dtype=np.float32)
    x = np.asarray(pre_binarization_input, dtype=np.float32)
    if upstream.shape != x.shape:
        raise DimensionError(
            f"ste_backward shape mismatch: upstream {tuple(upstream.shape)} "
            f"vs input {tuple(x.shape)}"
        )
    mask = np.abs(x) <= np.float32(cfg.ste_clip)
    return np.where(mask, upstream, np.float32(0.0))
