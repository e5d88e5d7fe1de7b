"""Retention matrices and spectral-norm estimation.

A retention matrix condenses a pair of adjacent activation batches into a
symmetric PSD matrix whose top eigenvalue tracks the squared spectral norm
of the affine map between them. Power iteration reads that eigenvalue off
cheaply; a cyclic-Jacobi solver provides an independent full-spectrum
oracle for tests so power iteration never has to certify itself.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DimensionError, InputError
from .tensor import gram, l2_normalize_rows, matmul, transpose

_SYM_TOL = 1e-5


@dataclass(frozen=True)
class PowerIterationConfig:
    res_stop: float = 1e-6
    max_iter: int = 100
    train_iter: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.res_stop <= 0:
            raise InputError(f"res_stop must be positive, got {self.res_stop}")
        if self.max_iter < 1:
            raise InputError(f"max_iter must be >= 1, got {self.max_iter}")
        if not (1 <= self.train_iter <= self.max_iter):
            raise InputError(
                f"train_iter must be in [1, max_iter], got {self.train_iter}"
            )


@dataclass(frozen=True)
class RetentionMatrix:
    """Symmetric PSD matrix built from adjacent activation batches."""

    m: np.ndarray
    unit: str = ""
    precision: str = "full"  # "full" | "binary"

    @property
    def dim(self) -> int:
        return self.m.shape[0]


@dataclass
class SpectralUnitReport:
    """Per-unit spectral summary produced every training step."""

    unit: str
    depth_index: int  # 1-based position k among traced units
    sigma_full: float
    sigma_binary: float
    beta_weight: float

    @property
    def ratio(self) -> float:
        return self.sigma_binary / self.sigma_full


@dataclass
class SpectralReport:
    units: list = field(default_factory=list)

    def add(self, row: SpectralUnitReport) -> None:
        self.units.append(row)

    def __iter__(self):
        return iter(self.units)

    def __len__(self):
        return len(self.units)


def retention_matrix(
    a_prev: np.ndarray,
    a_next: np.ndarray,
    normalize: bool = True,
    unit: str = "",
    precision: str = "full",
) -> RetentionMatrix:
    """Build M = G^T G with G = A_prev^T A_next (rows are samples).

    Row-normalizing A_prev first makes its sample Gram close to the
    identity, which is the regime where sigma(M) tracks the squared
    spectral norm of the layer's weight matrix.
    """
    if a_prev.ndim != 2 or a_next.ndim != 2:
        raise DimensionError(
            f"activation batches must be rank-2, got {a_prev.ndim} and {a_next.ndim}"
        )
    if a_prev.shape[0] != a_next.shape[0]:
        raise DimensionError(
            f"batch sizes differ: {a_prev.shape[0]} vs {a_next.shape[0]}"
        )
    if normalize:
        a_prev = l2_normalize_rows(a_prev)
    g = matmul(transpose(a_prev), a_next)
    return RetentionMatrix(m=gram(g), unit=unit, precision=precision)


def _seeded_unit_vector(dim: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(dim)
    n = np.linalg.norm(v)
    if n == 0.0:  # astronomically unlikely; reseed deterministically
        v = np.ones(dim)
        n = np.sqrt(float(dim))
    return v / n


def power_iteration(
    m: np.ndarray,
    cfg: PowerIterationConfig = PowerIterationConfig(),
    training: bool = False,
):
    """Dominant eigenvalue and eigenvector of a symmetric matrix.

    Iterates v <- M v / ||M v|| until the iterate residual drops below
    cfg.res_stop or the iteration cap is hit (train_iter during training,
    max_iter otherwise), then returns (v^T M v, v). Internals run in
    float64; inputs and the returned vector are float32.
    """
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"power_iteration needs a square matrix, got {tuple(m.shape)}")
    _require_symmetric(m, "power_iteration")
    m64 = np.ascontiguousarray(m, dtype=np.float64)
    dim = m64.shape[0]
    cap = cfg.train_iter if training else cfg.max_iter

    v = _seeded_unit_vector(dim, cfg.seed)
    mv = _kernels.matvec_f64(m64, v)
    if np.linalg.norm(mv) == 0.0:
        # retry once with a reseeded start; a second zero means M annihilates
        # both probes and is treated as degenerate
        v = _seeded_unit_vector(dim, cfg.seed + 1)
        mv = _kernels.matvec_f64(m64, v)
        if np.linalg.norm(mv) == 0.0:
            return 0.0, v.astype(np.float32)

    for _ in range(cap):
        norm = np.linalg.norm(mv)
        if norm == 0.0:
            break
        v_next = mv / norm
        res = np.linalg.norm(v_next - v)
        v = v_next
        if res < cfg.res_stop:
            break
        mv = _kernels.matvec_f64(m64, v)

    sigma = float(v @ _kernels.matvec_f64(m64, v))
    return sigma, v.astype(np.float32)


def eigen_oracle(m: np.ndarray, off_tol: float = 1e-10, max_sweeps: int = 60) -> np.ndarray:
    """Full spectrum of a symmetric matrix via cyclic Jacobi rotations.

    Independent of power iteration by design; intended for d <= 256.
    Returns eigenvalues sorted ascending (float64).
    """
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"eigen_oracle needs a square matrix, got {tuple(m.shape)}")
    if m.shape[0] > 256:
        raise InputError(f"eigen_oracle supports d <= 256, got d = {m.shape[0]}")
    _require_symmetric(m, "eigen_oracle")
    m64 = np.ascontiguousarray(m, dtype=np.float64)
    vals, _, converged = _kernels.jacobi_eigenvalues(m64, off_tol, max_sweeps)
    if not converged:
        raise InputError(f"jacobi failed to converge in {max_sweeps} sweeps")
    return vals


def top_singular_pair(
    w: np.ndarray,
    cfg: PowerIterationConfig = PowerIterationConfig(),
    training: bool = False,
):
    """Largest singular value of W with its left/right singular vectors.

    Runs power iteration on W^T W matrix-free (v <- W^T (W v)), which is
    the same iteration without materializing the d x d product. Returns
    (sigma1, u1, v1); a zero matrix yields (0, zeros, zeros).
    """
    if w.ndim != 2:
        raise DimensionError(f"top_singular_pair needs a rank-2 tensor, got rank {w.ndim}")
    w64 = np.ascontiguousarray(w, dtype=np.float64)
    wt64 = np.ascontiguousarray(w64.T)
    m, n = w64.shape
    cap = cfg.train_iter if training else cfg.max_iter

    def wtwv(vec):
        return _kernels.matvec_f64(wt64, _kernels.matvec_f64(w64, vec))

    v = _seeded_unit_vector(n, cfg.seed)
    mv = wtwv(v)
    if np.linalg.norm(mv) == 0.0:
        v = _seeded_unit_vector(n, cfg.seed + 1)
        mv = wtwv(v)
        if np.linalg.norm(mv) == 0.0:
            return 0.0, np.zeros(m, dtype=np.float32), np.zeros(n, dtype=np.float32)

    for _ in range(cap):
        norm = np.linalg.norm(mv)
        if norm == 0.0:
            break
        v_next = mv / norm
        res = np.linalg.norm(v_next - v)
        v = v_next
        if res < cfg.res_stop:
            break
        mv = wtwv(v)

    wv = _kernels.matvec_f64(w64, v)
    sigma1 = float(np.linalg.norm(wv))
    if sigma1 == 0.0:
        return 0.0, np.zeros(m, dtype=np.float32), np.zeros(n, dtype=np.float32)
    u = wv / sigma1
    return sigma1, u.astype(np.float32), v.astype(np.float32)


def _require_symmetric(m: np.ndarray, op: str) -> None:
    skew = float(np.max(np.abs(m - m.T))) if m.size else 0.0
    if skew > _SYM_TOL:
        raise InputError(f"{op} needs a symmetric matrix (max asymmetry {skew:.3g})")
