"""The k-fold Forrelation form, its promise labels and the block-shifted product."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .wht import HadamardDim, fwht_normalized, fwht_unnormalized, log2_exact

__all__ = [
    "InvalidShapeError",
    "InvalidMatrixError",
    "InvalidInputError",
    "ForrelationParams",
    "PartialLabel",
    "DenseOrthogonal",
    "HADAMARD",
    "as_blocks",
    "apply_matrix",
    "apply_matrix_transpose",
    "block_shifted_product",
    "forr_value",
    "forr_label",
    "label_from_value",
]


class InvalidShapeError(ValueError):
    pass


class InvalidMatrixError(ValueError):
    pass


class InvalidInputError(ValueError):
    pass


@dataclass(frozen=True)
class ForrelationParams:
    """One problem instance: ``N = 2**n`` bits per block, ``k`` blocks, gap ``delta``.

    ``delta`` defaults to ``2**(-5k)``.
    """

    n: int
    k: int
    delta: float = field(default=None)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"n must be non-negative, got {self.n}")
        if self.k < 2:
            raise ValueError(f"k must be at least 2, got {self.k}")
        if self.delta is None:
            object.__setattr__(self, "delta", 2.0 ** (-5 * self.k))
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def dim(self) -> HadamardDim:
        return HadamardDim(self.n)

    @property
    def total_bits(self) -> int:
        return self.k * self.N


class PartialLabel(enum.Enum):
    ONE = "One"
    ZERO = "Zero"
    OUTSIDE_PROMISE = "OutsidePromise"


class DenseOrthogonal:
    """An explicit ``N x N`` orthogonal matrix, validated once on construction."""

    def __init__(self, matrix, tol: float = 1e-10):
        M = np.array(matrix, dtype=np.float64)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise InvalidMatrixError(f"expected a square matrix, got shape {M.shape}")
        err = np.abs(M.T @ M - np.eye(M.shape[0])).max() if M.size else 0.0
        if err > tol:
            raise InvalidMatrixError(f"matrix is not orthogonal: max |M^T M - I| = {err:.3g}")
        M.setflags(write=False)
        self.matrix = M
        self.orthogonality_error = float(err)

    @property
    def N(self) -> int:
        return self.matrix.shape[0]

    def __repr__(self):
        return f"DenseOrthogonal(N={self.N})"


# Sentinel meaning "the Sylvester Hadamard matrix, applied by FWHT".
HADAMARD = "hadamard"


def _resolve_matrix(matrix):
    if matrix is None or (isinstance(matrix, str) and matrix == HADAMARD):
        return None
    if isinstance(matrix, DenseOrthogonal):
        return matrix
    return DenseOrthogonal(matrix)


def apply_matrix(matrix, v):
    """``M @ v`` along the last axis; ``matrix=None`` means Hadamard."""
    M = _resolve_matrix(matrix)
    if M is None:
        return fwht_normalized(v)
    return np.asarray(v, dtype=np.float64) @ M.matrix.T


def apply_matrix_transpose(matrix, v):
    """``M.T @ v`` along the last axis (the Hadamard matrix is symmetric)."""
    M = _resolve_matrix(matrix)
    if M is None:
        return fwht_normalized(v)
    return np.asarray(v, dtype=np.float64) @ M.matrix


def as_blocks(z, k: int) -> np.ndarray:
    """View a flat length-``kN`` vector (or a batch of them) as ``(..., k, N)``."""
    z = np.asarray(z)
    if z.shape[-1] % k:
        raise InvalidShapeError(f"length {z.shape[-1]} is not divisible by k={k}")
    N = z.shape[-1] // k
    log2_exact(N)
    return z.reshape(z.shape[:-1] + (k, N))


def block_shifted_product(x, y) -> np.ndarray:
    """Combine two ``(k-1)``-block vectors into the ``k``-block vector
    ``(x_1, y_1*x_2, ..., y_{k-2}*x_{k-1}, y_{k-1})``.

    Inputs have shape ``(..., k-1, N)``; the output has shape ``(..., k, N)``.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise InvalidShapeError(f"block shapes differ: {x.shape} vs {y.shape}")
    if x.ndim < 2:
        raise InvalidShapeError("expected at least 2 dimensions (blocks, N)")
    out_shape = x.shape[:-2] + (x.shape[-2] + 1, x.shape[-1])
    out = np.ones(out_shape)
    out[..., :-1, :] = x
    out[..., 1:, :] *= y
    return out


def forr_value(z, matrix=None):
    """Evaluate ``(1/N) z_1^T (M Z_2 M ... Z_{k-1} M) z_k``.

    ``z`` has shape ``(k, N)`` or ``(..., k, N)`` for a batch. Evaluation runs
    right to left: start from ``z_k`` and alternate the matrix with diagonal
    multiplications, so the chain is never materialised. ``matrix=None``
    uses the Hadamard matrix through the FWHT.
    """
    z = np.asarray(z, dtype=np.float64)
    if z.ndim < 2:
        raise InvalidShapeError("z must have shape (k, N); use as_blocks for flat input")
    k, N = z.shape[-2], z.shape[-1]
    if k < 2:
        raise InvalidShapeError(f"need at least 2 blocks, got {k}")
    log2_exact(N)
    M = _resolve_matrix(matrix)
    if M is not None and M.N != N:
        raise InvalidShapeError(f"matrix size {M.N} does not match block length {N}")
    if M is None:
        # unnormalized chain: exact integers on +-1 inputs, one scaling at the end
        v = fwht_unnormalized(z[..., k - 1, :])
        for b in range(k - 2, 0, -1):
            v *= z[..., b, :]
            fwht_unnormalized(v, out=v)
        val = np.einsum("...i,...i->...", z[..., 0, :], v) / float(N) ** ((k + 1) // 2)
        if k % 2 == 0:
            val = val / np.sqrt(N)
    else:
        v = apply_matrix(M, z[..., k - 1, :])
        for b in range(k - 2, 0, -1):
            v *= z[..., b, :]
            v = apply_matrix(M, v)
        val = np.einsum("...i,...i->...", z[..., 0, :], v) / N
    if val.ndim == 0:
        return float(val)
    return val


def _require_boolean(z):
    z = np.asarray(z)
    if not np.all((z == 1) | (z == -1)):
        raise InvalidInputError("input entries must be +1 or -1")


def label_from_value(value: float, delta: float) -> PartialLabel:
    if value >= delta:
        return PartialLabel.ONE
    if abs(value) <= delta / 2:
        return PartialLabel.ZERO
    return PartialLabel.OUTSIDE_PROMISE


def forr_label(z, params: ForrelationParams, matrix=None) -> PartialLabel:
    """Promise label of a single +-1 input."""
    _require_boolean(z)
    z = np.asarray(z)
    if z.ndim == 1:
        z = as_blocks(z, params.k)
    return label_from_value(forr_value(z, matrix), params.delta)
