"""The two input distributions.

``p0`` is uniform on ``{+-1}^{kN}``. ``p1`` draws ``k-1`` independent Gaussian
pairs ``(U, V)`` with ``Cov(U, V) = M``, truncates them with ``phi`` and rounds
the block-shifted product ``W = phi(U) <> phi(V)`` coordinate-wise.

The joint covariance ``[[I, M], [M^T, I]]`` is singular for orthogonal ``M``,
so pairs are drawn exactly as ``V = M^T U`` rather than through a Cholesky
factor.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import ortho_group

from .forrelation import (
    HADAMARD,
    DenseOrthogonal,
    ForrelationParams,
    _resolve_matrix,
    apply_matrix_transpose,
    block_shifted_product,
    forr_value,
)
from .gaussian.special import phi
from .wht import hadamard_matrix, log2_exact

__all__ = [
    "GaussianPairs",
    "P1Sample",
    "sample_p0",
    "sample_gaussian_pairs",
    "truncate_phi",
    "round_means",
    "sample_p1",
    "conditional_mean_forr",
    "haar_orthogonal",
    "max_abs_entry",
    "p1_mean_closed_form",
    "p1_expected_forr",
    "p0_second_moment",
]


@dataclass(frozen=True)
class GaussianPairs:
    """``U`` and ``V`` of shape ``(..., k-1, N)`` with ``V = M^T U`` blockwise."""

    U: np.ndarray
    V: np.ndarray
    matrix: object = HADAMARD


@dataclass(frozen=True)
class P1Sample:
    Z: np.ndarray
    W: np.ndarray
    pairs: GaussianPairs


def _shape(params: ForrelationParams, blocks: int, size):
    lead = () if size is None else (int(size),)
    return lead + (blocks, params.N)


def sample_p0(rng: np.random.Generator, params: ForrelationParams, size=None) -> np.ndarray:
    """Uniform +-1 input(s) as int8, shape ``(k, N)`` or ``(size, k, N)``."""
    bits = rng.integers(0, 2, size=_shape(params, params.k, size), dtype=np.int8)
    return 1 - 2 * bits


def sample_gaussian_pairs(rng, params: ForrelationParams, matrix=HADAMARD, size=None) -> GaussianPairs:
    M = _resolve_matrix(matrix)
    if M is not None and M.N != params.N:
        raise ValueError(f"matrix size {M.N} does not match N={params.N}")
    U = rng.standard_normal(_shape(params, params.k - 1, size))
    V = apply_matrix_transpose(M, U)
    return GaussianPairs(U, V, HADAMARD if M is None else M)


def truncate_phi(v):
    return phi(v)


def round_means(rng, W) -> np.ndarray:
    """Independent +-1 rounding with ``P(+1) = (1 + W) / 2``, one uniform per entry."""
    W = np.asarray(W, dtype=np.float64)
    u = rng.random(W.shape)
    return np.where(u < 0.5 * (1.0 + W), 1, -1).astype(np.int8)


def truncated_means(pairs: GaussianPairs) -> np.ndarray:
    return block_shifted_product(truncate_phi(pairs.U), truncate_phi(pairs.V))


def sample_p1(rng, params: ForrelationParams, matrix=HADAMARD, size=None, round_rng=None) -> P1Sample:
    """Draw from ``p1``.

    Gaussians come from ``rng``; the rounding uniforms come from ``round_rng``
    (by default a child stream spawned from ``rng``), so a fixed ``(U, V)`` can
    be re-rounded independently.
    """
    pairs = sample_gaussian_pairs(rng, params, matrix, size)
    W = truncated_means(pairs)
    if round_rng is None:
        round_rng = rng.spawn(1)[0]
    return P1Sample(round_means(round_rng, W), W, pairs)


def conditional_mean_forr(pairs: GaussianPairs):
    """``E[forr(Z) | U, V] = forr(W)``, since ``forr`` is multilinear across blocks."""
    return forr_value(truncated_means(pairs), pairs.matrix)


def haar_orthogonal(rng, N: int) -> DenseOrthogonal:
    if N < 1:
        raise ValueError("N must be at least 1")
    if N == 1:
        return DenseOrthogonal([[1.0 if rng.random() < 0.5 else -1.0]])
    return DenseOrthogonal(ortho_group.rvs(N, random_state=rng))


def max_abs_entry(matrix) -> float:
    M = _resolve_matrix(matrix)
    if M is None:
        raise ValueError("pass an explicit matrix")
    return float(np.abs(M.matrix).max())


def p1_mean_closed_form(N: int, k: int) -> float:
    """``E_{p1}[forr]`` for the Hadamard matrix:
    ``(sqrt(N) * arctan(1 / sqrt(4N - 1)) / (2 pi))^(k-1)``."""
    log2_exact(N)
    return (math.sqrt(N) * math.atan(1.0 / math.sqrt(4.0 * N - 1.0)) / (2.0 * math.pi)) ** (k - 1)


def p1_expected_forr(k: int, matrix) -> float:
    """``E_{p1}[forr]`` for any orthogonal ``M``: ``(1/N) 1^T A^(k-1) 1`` where
    ``A_ij = M_ij * arcsin(M_ij / 2) / (2 pi)``."""
    M = _resolve_matrix(matrix)
    if M is None:
        raise ValueError("pass an explicit matrix; use p1_mean_closed_form for Hadamard")
    Mx = M.matrix
    A = Mx * np.arcsin(Mx / 2.0) / (2.0 * math.pi)
    v = np.ones(M.N)
    for _ in range(k - 1):
        v = A @ v
    return float(v.sum() / M.N)


def p0_second_moment(N: int) -> float:
    """``E_{p0}[forr^2] = 1/N`` for every ``k`` and every orthogonal ``M``."""
    return 1.0 / N


def hadamard_dense(n: int) -> DenseOrthogonal:
    return DenseOrthogonal(hadamard_matrix(n))
