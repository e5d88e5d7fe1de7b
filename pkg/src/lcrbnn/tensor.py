"""Dense float32 tensor operations used by every other module.

Tensors are plain numpy float32 arrays in row-major layout; the batch
dimension is always the first axis. The matrix product fixes its summation
order (left-to-right over the inner dimension) so results are bit-stable
across runs and thread counts. No fast-math anywhere in this module.
"""

import numpy as np

from . import _kernels
from .errors import DimensionError, NumericError, RankError

_EPS_DEFAULT = 1e-12


def tensor(data) -> np.ndarray:
    """Convert to a contiguous float32 array and reject non-finite values."""
    arr = np.ascontiguousarray(data, dtype=np.float32)
    check_finite(arr, "tensor()")
    return arr


def check_finite(arr: np.ndarray, context: str) -> None:
    if not np.all(np.isfinite(arr)):
        raise NumericError(f"non-finite value in {context}")


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product with deterministic left-to-right accumulation over k."""
    if a.ndim != 2 or b.ndim != 2:
        raise RankError(f"matmul needs rank-2 operands, got {a.ndim} and {b.ndim}")
    if a.shape[1] != b.shape[0]:
        raise DimensionError(
            f"matmul inner dimensions differ: {tuple(a.shape)} x {tuple(b.shape)}"
        )
    a = np.ascontiguousarray(a, dtype=np.float32)
    b = np.ascontiguousarray(b, dtype=np.float32)
    return _kernels.matmul_f32(a, b)


def gram(g: np.ndarray) -> np.ndarray:
    """transpose(g) @ g, bit-identical to matmul(transpose(g), g) and exactly symmetric."""
    if g.ndim != 2:
        raise RankError(f"gram needs a rank-2 operand, got rank {g.ndim}")
    return _kernels.gram_f32(np.ascontiguousarray(g, dtype=np.float32))


def transpose(a: np.ndarray) -> np.ndarray:
    if a.ndim != 2:
        raise RankError(f"transpose needs a rank-2 tensor, got rank {a.ndim}")
    return np.ascontiguousarray(a.T)


def l2_normalize_rows(a: np.ndarray, eps: float = _EPS_DEFAULT) -> np.ndarray:
    """Divide each row by max(row L2 norm, eps); zero rows stay zero."""
    a = np.asarray(a, dtype=np.float32)
    norms = np.sqrt(np.sum(a.astype(np.float64) ** 2, axis=-1, keepdims=True))
    scale = np.maximum(norms, eps)
    return (a / scale).astype(np.float32)


def frobenius_norm(a: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.asarray(a, dtype=np.float64) ** 2)))
