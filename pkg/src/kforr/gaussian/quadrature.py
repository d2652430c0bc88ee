"""Tensor Gauss-Hermite expectations over (possibly singular) Gaussian laws."""
from __future__ import annotations

from functools import lru_cache

import numpy as np

__all__ = ["gauss_hermite_standard", "gaussian_expectation", "reduced_factor"]


@lru_cache(maxsize=None)
def gauss_hermite_standard(n_nodes: int):
    """Nodes and weights for ``E[g(X)]``, ``X ~ N(0, 1)``."""
    x, w = np.polynomial.hermite_e.hermegauss(n_nodes)
    w = w / np.sqrt(2.0 * np.pi)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def reduced_factor(cov, tol: float = 1e-12) -> np.ndarray:
    """Matrix ``L`` of shape ``(m, r)`` with ``L L^T = cov`` and ``r = rank(cov)``.

    Directions with eigenvalue below ``tol * max_eig`` are dropped, so singular
    covariances are integrated in their own support rather than through a
    pseudo-inverse density.
    """
    C = np.asarray(cov, dtype=np.float64)
    vals, vecs = np.linalg.eigh(0.5 * (C + C.T))
    cutoff = tol * max(vals.max(initial=0.0), 1.0)
    keep = vals > cutoff
    return vecs[:, keep] * np.sqrt(vals[keep])


def gaussian_expectation(func, cov, n_nodes: int = 64, max_points: int = 2_000_000):
    """``E[func(X)]`` for ``X ~ N(0, cov)`` by tensor Gauss-Hermite quadrature.

    ``func`` receives an array of points of shape ``(P, m)`` and returns ``P``
    values. Only ``rank(cov)`` quadrature dimensions are used.
    """
    L = reduced_factor(cov)
    m, r = L.shape
    if r == 0:
        return float(func(np.zeros((1, m)))[0])
    if n_nodes**r > max_points:
        raise ValueError(f"{n_nodes}^{r} quadrature points exceed the limit {max_points}")
    x, w = gauss_hermite_standard(n_nodes)
    grids = np.meshgrid(*([x] * r), indexing="ij")
    xi = np.stack([g.ravel() for g in grids], axis=-1)
    weights = np.ones(len(xi))
    for wg in np.meshgrid(*([w] * r), indexing="ij"):
        weights = weights * wg.ravel()
    pts = xi @ L.T
    return float(np.dot(weights, func(pts)))
