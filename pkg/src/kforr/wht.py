"""Sylvester-ordered Walsh-Hadamard transforms.

All transforms act along the last axis, so a batch of vectors can be passed
as a 2-D (or higher) array. The Hadamard matrix is the tensor power of
``[[1, 1], [1, -1]] / sqrt(2)``, i.e. ``H[i, j] = (-1)**popcount(i & j) / sqrt(N)``.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

__all__ = [
    "InvalidDimensionError",
    "InvalidIndexError",
    "HadamardDim",
    "log2_exact",
    "fwht_unnormalized",
    "fwht_normalized",
    "hadamard_entry",
    "hadamard_entries",
    "hadamard_matrix",
]


class InvalidDimensionError(ValueError):
    """Raised when a length is not a power of two."""


class InvalidIndexError(IndexError):
    """Raised when a Hadamard entry index is out of range."""


class HadamardDim:
    """Exponent ``n`` and size ``N = 2**n`` of a Hadamard matrix."""

    __slots__ = ("n", "N")

    def __init__(self, n: int):
        if n < 0:
            raise InvalidDimensionError(f"exponent must be non-negative, got {n}")
        self.n = int(n)
        self.N = 1 << self.n

    @classmethod
    def from_size(cls, N: int) -> "HadamardDim":
        return cls(log2_exact(N))

    def __repr__(self):
        return f"HadamardDim(n={self.n}, N={self.N})"


def log2_exact(N: int) -> int:
    N = int(N)
    if N < 1 or N & (N - 1):
        raise InvalidDimensionError(f"length {N} is not a power of two")
    return N.bit_length() - 1


_FUSED_BLOCK = 32


@lru_cache(maxsize=None)
def _sylvester_pm1(B: int) -> np.ndarray:
    idx = np.arange(B)
    H = 1.0 - 2.0 * (np.bitwise_count(idx[:, None] & idx[None, :]) & 1)
    H.setflags(write=False)
    return H


def fwht_unnormalized(v, out=None):
    """Unscaled butterfly: returns ``sqrt(N) * H_N @ v`` along the last axis.

    Integer inputs are promoted to float64. If ``out`` is given it must be a
    float array of the same shape; the transform then runs in place on it.
    """
    v = np.asarray(v)
    N = v.shape[-1]
    log2_exact(N)
    if out is None:
        x = np.array(v, dtype=np.float64, copy=True)
    else:
        x = out
        if not x.flags.c_contiguous:
            raise ValueError("out must be C-contiguous")
        if x is not v:
            x[...] = v
    lead = x.shape[:-1]
    # the first log2(B) stages are fused into one small +-1 matmul; short
    # strided butterflies are far slower than BLAS at that scale
    B = min(N, _FUSED_BLOCK)
    if B > 1:
        flat = x.reshape(-1, B)
        flat[...] = flat @ _sylvester_pm1(B)
    h = B
    while h < N:
        view = x.reshape(lead + (N // (2 * h), 2, h))
        top = view[..., 0, :].copy()
        view[..., 0, :] += view[..., 1, :]
        np.subtract(top, view[..., 1, :], out=view[..., 1, :])
        h *= 2
    return x


def fwht_normalized(v, out=None):
    """Orthonormal transform ``H_N @ v`` along the last axis.

    The scaling by ``1/sqrt(N)`` is applied once after all butterfly stages.
    The map is a symmetric involution, so applying it twice returns ``v``.
    """
    x = fwht_unnormalized(v, out=out)
    x *= 1.0 / np.sqrt(x.shape[-1])
    return x


def _popcount(a):
    a = np.asarray(a, dtype=np.uint64)
    return np.bitwise_count(a)


def hadamard_entry(i: int, j: int, n: int) -> float:
    """Entry ``H[i, j]`` of the orthonormal ``2**n x 2**n`` Hadamard matrix."""
    N = 1 << n
    if not (0 <= i < N and 0 <= j < N):
        raise InvalidIndexError(f"index ({i}, {j}) out of range for N={N}")
    sign = -1.0 if bin(i & j).count("1") & 1 else 1.0
    return sign / np.sqrt(N)


def hadamard_entries(i, j, n: int):
    """Vectorised :func:`hadamard_entry` over broadcastable index arrays."""
    N = 1 << n
    i = np.asarray(i)
    j = np.asarray(j)
    if i.size and (i.min() < 0 or i.max() >= N):
        raise InvalidIndexError(f"row index out of range for N={N}")
    if j.size and (j.min() < 0 or j.max() >= N):
        raise InvalidIndexError(f"column index out of range for N={N}")
    parity = _popcount(np.bitwise_and(i, j)) & 1
    return (1.0 - 2.0 * parity) / np.sqrt(N)


def hadamard_matrix(n: int) -> np.ndarray:
    """Dense orthonormal Hadamard matrix built by repeated Kronecker products."""
    H1 = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
    H = np.ones((1, 1))
    for _ in range(n):
        H = np.kron(H, H1)
    return H
