"""Exact centred Gaussian moments (Isserlis pairings) and a small polynomial type."""
from __future__ import annotations

from collections import defaultdict
from functools import lru_cache

import numpy as np

__all__ = [
    "ResourceLimitError",
    "MAX_WICK_DEGREE",
    "CovarianceSpec",
    "Polynomial",
    "perfect_matchings",
    "wick_expectation",
    "random_psd",
]

MAX_WICK_DEGREE = 12


class ResourceLimitError(RuntimeError):
    pass


class CovarianceSpec:
    """Symmetric PSD covariance, possibly singular, with optional coordinate labels."""

    def __init__(self, matrix, labels=None, tol: float = 1e-10):
        C = np.array(matrix, dtype=np.float64)
        if C.ndim != 2 or C.shape[0] != C.shape[1]:
            raise ValueError(f"covariance must be square, got {C.shape}")
        if not np.array_equal(C, C.T):
            raise ValueError("covariance must be exactly symmetric")
        if C.size and np.linalg.eigvalsh(C).min() < -tol:
            raise ValueError("covariance is not positive semi-definite")
        C.setflags(write=False)
        self.matrix = C
        self.labels = list(labels) if labels is not None else [f"x{i}" for i in range(len(C))]

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def index(self, label) -> int:
        return self.labels.index(label)


@lru_cache(maxsize=None)
def perfect_matchings(n: int):
    """All perfect matchings of ``range(n)`` as tuples of pairs (empty for odd n)."""
    if n % 2:
        return ()
    if n == 0:
        return ((),)
    out = []
    _match(tuple(range(n)), (), out)
    return tuple(out)


def _match(items, acc, out):
    if not items:
        out.append(acc)
        return
    first, rest = items[0], items[1:]
    for idx, partner in enumerate(rest):
        _match(rest[:idx] + rest[idx + 1:], acc + ((first, partner),), out)


def wick_expectation(monomial, cov) -> float:
    """``E[prod_i G_i^{a_i}]`` for centred Gaussian ``G`` with covariance ``cov``.

    ``monomial`` is an exponent tuple ``(a_0, ..., a_{m-1})``. The moment is the
    sum over perfect matchings of the multiset of coordinates of the product
    of paired covariances. Odd total degree gives 0.
    """
    C = cov.matrix if isinstance(cov, CovarianceSpec) else np.asarray(cov, dtype=np.float64)
    coords = [i for i, a in enumerate(monomial) for _ in range(int(a))]
    deg = len(coords)
    if deg % 2:
        return 0.0
    if deg > MAX_WICK_DEGREE:
        raise ResourceLimitError(f"degree {deg} exceeds Wick guard {MAX_WICK_DEGREE}")
    total = 0.0
    for matching in perfect_matchings(deg):
        prod = 1.0
        for a, b in matching:
            prod *= C[coords[a], coords[b]]
            if prod == 0.0:
                break
        total += prod
    return total


class Polynomial:
    """Sparse real polynomial in ``nvars`` variables: ``{exponent tuple: coeff}``."""

    def __init__(self, nvars: int, terms=None):
        self.nvars = int(nvars)
        self.terms = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != self.nvars:
                raise ValueError(f"exponent {exps} has wrong length for {nvars} variables")
            if c != 0.0:
                self.terms[exps] = self.terms.get(exps, 0.0) + float(c)

    @classmethod
    def constant(cls, nvars, c):
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars, i):
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1.0})

    @classmethod
    def random_multilinear(cls, rng, nvars, degree, density=0.6):
        terms = {}
        for mask in range(1 << nvars):
            exps = tuple((mask >> i) & 1 for i in range(nvars))
            if sum(exps) <= degree and rng.random() < density:
                terms[exps] = rng.normal()
        return cls(nvars, terms)

    @classmethod
    def random(cls, rng, nvars, degree, n_terms=8):
        terms = {}
        for _ in range(n_terms):
            d = int(rng.integers(0, degree + 1))
            exps = [0] * nvars
            for _ in range(d):
                exps[int(rng.integers(nvars))] += 1
            terms[tuple(exps)] = terms.get(tuple(exps), 0.0) + rng.normal()
        return cls(nvars, terms)

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def is_multilinear(self) -> bool:
        return all(max(e, default=0) <= 1 for e in self.terms)

    def derivative(self, i: int) -> "Polynomial":
        out = {}
        for exps, c in self.terms.items():
            if exps[i]:
                e = list(exps)
                e[i] -= 1
                out[tuple(e)] = c * exps[i]
        return Polynomial(self.nvars, out)

    def __call__(self, x):
        """Evaluate at points ``x`` of shape ``(..., nvars)``."""
        x = np.asarray(x, dtype=np.float64)
        total = np.zeros(x.shape[:-1])
        for exps, c in self.terms.items():
            term = np.full(x.shape[:-1], c)
            for i, e in enumerate(exps):
                if e:
                    term = term * x[..., i] ** e
            total = total + term
        return total

    def expectation(self, cov) -> float:
        """Exact Gaussian expectation via :func:`wick_expectation` per monomial."""
        return sum(c * wick_expectation(e, cov) for e, c in self.terms.items())

    def embed(self, nvars: int, positions) -> "Polynomial":
        """Relabel variable ``i`` as ``positions[i]`` in a larger variable set."""
        out = defaultdict(float)
        for exps, c in self.terms.items():
            e = [0] * nvars
            for i, a in enumerate(exps):
                e[positions[i]] += a
            out[tuple(e)] += c
        return Polynomial(nvars, out)

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return Polynomial(self.nvars, {e: c * other for e, c in self.terms.items()})
        out = defaultdict(float)
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                out[tuple(a + b for a, b in zip(e1, e2))] += c1 * c2
        return Polynomial(self.nvars, out)

    __rmul__ = __mul__

    def __add__(self, other):
        out = defaultdict(float, self.terms)
        for e, c in other.terms.items():
            out[e] += c
        return Polynomial(self.nvars, out)

    def __repr__(self):
        return f"Polynomial(nvars={self.nvars}, terms={len(self.terms)}, degree={self.degree})"


def random_psd(rng, dim: int, rank: int | None = None, scale: float = 1.0) -> np.ndarray:
    """Random symmetric PSD matrix ``A A^T`` with ``A`` of shape ``(dim, rank)``."""
    A = rng.normal(size=(dim, rank or dim)) * np.sqrt(scale / (rank or dim))
    C = A @ A.T
    return 0.5 * (C + C.T)
