"""Acceptance probability of the Forrelation query algorithm, simulated on amplitudes."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import binom

from .forrelation import (
    HADAMARD,
    ForrelationParams,
    InvalidInputError,
    _require_boolean,
    _resolve_matrix,
    apply_matrix,
    as_blocks,
)
from .wht import log2_exact

__all__ = [
    "QuantumRunReport",
    "accept_probability",
    "accept_probabilities",
    "query_count",
    "gate_estimate",
    "majority_amplify",
]


@dataclass(frozen=True)
class QuantumRunReport:
    accept_probability: float
    queries: int
    gate_estimate: int
    amplitude: float
    max_norm_drift: float


def query_count(k: int) -> int:
    return (k + 1) // 2


def gate_estimate(n: int, k: int) -> int:
    # one n-qubit Hadamard layer between consecutive blocks plus one phase oracle per block
    return (k - 1) * n + k


def _amplitude(z, matrix):
    """``<z_1/sqrt(N)| M Z_{k-1} M ... Z_2 M |z_k/sqrt(N)>`` and the worst norm drift."""
    k, N = z.shape[-2], z.shape[-1]
    state = z[..., k - 1, :].astype(np.float64) / math.sqrt(N)
    drift = 0.0
    for b in range(k - 2, 0, -1):
        state = apply_matrix(matrix, state)
        state = state * z[..., b, :]
        drift = max(drift, float(np.abs(np.linalg.norm(state, axis=-1) - 1.0).max()))
    state = apply_matrix(matrix, state)
    drift = max(drift, float(np.abs(np.linalg.norm(state, axis=-1) - 1.0).max()))
    amp = np.einsum("...i,...i->...", z[..., 0, :] / math.sqrt(N), state)
    return amp, drift


def _prepare(z, k):
    _require_boolean(z)
    z = np.asarray(z)
    if z.ndim == 1:
        if k is None:
            raise InvalidInputError("flat input needs the block count k")
        z = as_blocks(z, k)
    if z.shape[-2] < 2:
        raise InvalidInputError("need at least 2 blocks")
    log2_exact(z.shape[-1])
    return z


def accept_probability(z, params: ForrelationParams | None = None, matrix=HADAMARD) -> QuantumRunReport:
    """Run the amplitude pipeline on one +-1 input; ``P[accept] = (1 + forr) / 2``."""
    z = _prepare(z, params.k if params else None)
    if z.ndim != 2:
        raise InvalidInputError("accept_probability takes a single input; use accept_probabilities")
    k, N = z.shape
    amp, drift = _amplitude(z, _resolve_matrix(matrix))
    amp = float(amp)
    return QuantumRunReport(
        accept_probability=0.5 * (1.0 + amp),
        queries=query_count(k),
        gate_estimate=gate_estimate(log2_exact(N), k),
        amplitude=amp,
        max_norm_drift=drift,
    )


def accept_probabilities(Z, matrix=HADAMARD) -> np.ndarray:
    """Vectorised acceptance probabilities for a batch ``(P, k, N)`` of +-1 inputs."""
    Z = _prepare(Z, None)
    amp, _ = _amplitude(Z, _resolve_matrix(matrix))
    return 0.5 * (1.0 + np.asarray(amp))


def majority_amplify(p: float, reps: int) -> float:
    """Probability that a majority of ``reps`` independent runs accept."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if reps < 1 or reps % 2 == 0:
        raise ValueError("reps must be a positive odd integer")
    return float(binom.sf(reps // 2, reps, p))
