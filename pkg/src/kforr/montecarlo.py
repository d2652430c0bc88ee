"""Chunked Monte Carlo with seeded per-chunk streams.

Chunk ``c`` of stream ``s`` always draws from ``SeedSequence(seed,
spawn_key=(s, c))`` and results are concatenated in chunk order, so the
output depends on ``(seed, samples, chunk_size)`` but not on the number of
worker threads.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

__all__ = ["DEFAULT_CHUNK", "chunk_sizes", "chunk_rng", "map_chunks", "Estimate", "estimate_mean", "bernoulli_se"]

DEFAULT_CHUNK = 2000


def chunk_sizes(total: int, chunk_size: int = DEFAULT_CHUNK) -> list[int]:
    if total < 1:
        raise ValueError("sample count must be at least 1")
    if chunk_size < 1:
        raise ValueError("chunk size must be at least 1")
    full, rest = divmod(total, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def chunk_rng(seed: int, stream: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream, chunk))))


def map_chunks(fn, seed: int, total: int, stream: int = 0, chunk_size: int = DEFAULT_CHUNK, workers: int = 1):
    """Call ``fn(rng, size, chunk_index)`` for every chunk; results in chunk order."""
    sizes = chunk_sizes(total, chunk_size)
    jobs = [(chunk_rng(seed, stream, c), size, c) for c, size in enumerate(sizes)]
    if workers <= 1:
        return [fn(*job) for job in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: fn(*job), jobs))


@dataclass(frozen=True)
class Estimate:
    mean: float
    se: float
    n: int

    def ci(self, width: float = 3.0):
        return (self.mean - width * self.se, self.mean + width * self.se)

    def covers(self, target: float, width: float = 3.0) -> bool:
        lo, hi = self.ci(width)
        return lo <= target <= hi


def estimate_mean(values) -> Estimate:
    """Sample mean with the standard error ``sd / sqrt(n)``."""
    v = np.asarray(values, dtype=np.float64).ravel()
    n = v.size
    sd = float(v.std(ddof=1)) if n > 1 else 0.0
    return Estimate(float(v.mean()), sd / math.sqrt(n), n)


def bernoulli_se(p: float, n: int) -> float:
    p = min(max(p, 0.0), 1.0)
    return math.sqrt(p * (1.0 - p) / n)
