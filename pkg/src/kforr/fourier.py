"""Exact Fourier analysis of functions on ``{+-1}^m`` held as dense tables.

Conventions: a table has ``2^m`` entries and index bit ``i`` set means
``x_i = -1``. Coefficients are indexed by subset bitmask, bit ``i`` set meaning
``i`` is in ``S``. The uniform character is ``chi_S(x) = prod_{i in S} x_i``
and the ``mu``-biased one is ``prod_{i in S} (x_i - mu_i) / sigma_i`` with
``sigma_i = sqrt(1 - mu_i^2)``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .wht import fwht_unnormalized

__all__ = [
    "ResourceLimitError",
    "MAX_BITS",
    "FourierTable",
    "transform",
    "values",
    "level_weight",
    "level_weights",
    "harmonic_extend",
    "interpolation_extend",
    "discrete_derivative",
    "restrict",
    "restricted_coefficients_formula",
    "check_restriction_identity",
    "restriction_expectation_enumerated",
    "restricted_level_weights",
    "check_weight_transfer",
    "tal_shape_statistic",
    "level_bound_experiment",
]

MAX_BITS = 24
MAX_RESTRICTION_BITS = 10


class ResourceLimitError(RuntimeError):
    pass


@dataclass(frozen=True)
class FourierTable:
    """Coefficients in the uniform basis (``mu is None``) or a biased one."""

    m: int
    coefficients: np.ndarray
    mu: np.ndarray | None = None

    @property
    def is_uniform(self) -> bool:
        return self.mu is None

    def __getitem__(self, S):
        return float(self.coefficients[_mask(S)])


def _mask(S) -> int:
    if isinstance(S, (int, np.integer)):
        return int(S)
    out = 0
    for i in S:
        out |= 1 << int(i)
    return out


def _popcounts(m: int) -> np.ndarray:
    return np.bitwise_count(np.arange(1 << m, dtype=np.uint32)).astype(np.int64)


def _table(f) -> tuple[np.ndarray, int]:
    f = np.asarray(f, dtype=np.float64)
    if f.ndim != 1:
        raise ValueError("expected a 1-D table")
    size = f.shape[0]
    m = size.bit_length() - 1
    if size < 1 or size != 1 << m:
        raise ValueError(f"table length {size} is not a power of two")
    if m > MAX_BITS:
        raise ResourceLimitError(f"m={m} exceeds the guard {MAX_BITS}")
    return f, m


def _bias(mu, m):
    mu = np.broadcast_to(np.asarray(mu, dtype=np.float64), (m,)).copy()
    if np.any(np.abs(mu) > 0.5):
        raise ValueError("bias entries must lie in [-1/2, 1/2]")
    mu.setflags(write=False)
    return mu


def _axis_view(a, m, i):
    # axis 1 of the view is coordinate i: position 0 is x_i = +1 (or i not in S)
    return a.reshape(1 << (m - 1 - i), 2, 1 << i)


def transform(f, mu=None) -> FourierTable:
    """Fourier coefficients of a table, in the uniform basis or the ``mu``-biased one."""
    f, m = _table(f)
    if mu is None:
        return FourierTable(m, fwht_unnormalized(f) / float(1 << m))
    mu = _bias(mu, m)
    c = f.copy()
    for i in range(m):
        v = _axis_view(c, m, i)
        plus, minus = v[:, 0, :].copy(), v[:, 1, :].copy()
        s = math.sqrt(1.0 - mu[i] ** 2)
        v[:, 0, :] = 0.5 * ((1.0 + mu[i]) * plus + (1.0 - mu[i]) * minus)
        v[:, 1, :] = 0.5 * s * (plus - minus)
    return FourierTable(m, c, mu)


def values(table: FourierTable) -> np.ndarray:
    """Inverse transform: the function table."""
    m = table.m
    if table.is_uniform:
        return fwht_unnormalized(table.coefficients)
    f = np.array(table.coefficients, dtype=np.float64)
    for i in range(m):
        v = _axis_view(f, m, i)
        c0, c1 = v[:, 0, :].copy(), v[:, 1, :].copy()
        mu, s = table.mu[i], math.sqrt(1.0 - table.mu[i] ** 2)
        v[:, 0, :] = c0 + c1 * (1.0 - mu) / s
        v[:, 1, :] = c0 - c1 * (1.0 + mu) / s
    return f


def level_weights(table: FourierTable) -> np.ndarray:
    """``wt_l`` for every level ``l = 0..m``."""
    return np.bincount(_popcounts(table.m), weights=np.abs(table.coefficients), minlength=table.m + 1)


def level_weight(table: FourierTable, level: int) -> float:
    if not 0 <= level <= table.m:
        raise ValueError(f"level must lie in [0, {table.m}]")
    return float(level_weights(table)[level])


def harmonic_extend(table, x) -> float:
    """Multilinear extension at ``x in [-1, 1]^m``; accepts a table or a :class:`FourierTable`."""
    f = values(table) if isinstance(table, FourierTable) else _table(table)[0]
    m = f.shape[0].bit_length() - 1
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (m,):
        raise ValueError(f"point must have shape ({m},)")
    t = f.reshape((2,) * m) if m else f.reshape(())
    # C-order reshape puts bit m-1 on axis 0; contract from the last axis (bit 0)
    for i in range(m):
        t = t @ np.array([(1.0 + x[i]) / 2.0, (1.0 - x[i]) / 2.0])
    return float(t)


def interpolation_extend(f, x) -> float:
    """``sum_y prod_i (1 + x_i y_i) / 2 * f(y)``, the direct interpolation formula."""
    f, m = _table(f)
    x = np.asarray(x, dtype=np.float64)
    bits = (np.arange(1 << m)[:, None] >> np.arange(m)) & 1
    y = 1.0 - 2.0 * bits
    w = np.prod((1.0 + x * y) / 2.0, axis=1)
    return float(w @ f)


def discrete_derivative(table: FourierTable, A) -> FourierTable:
    """``d_A f``: coefficient of ``S`` (disjoint from ``A``) becomes that of ``S | A``."""
    a = _mask(A)
    idx = np.arange(1 << table.m)
    out = np.where(idx & a, 0.0, table.coefficients[idx | a])
    return FourierTable(table.m, out, table.mu)


def _parse_rho(rho, m):
    r = np.asarray([0 if v in ("*", None) else int(v) for v in rho], dtype=np.int64)
    if r.shape != (m,) or not np.all(np.isin(r, (-1, 0, 1))):
        raise ValueError("restriction must have one entry in {+1, -1, '*'} per variable")
    return r


def restrict(table, rho) -> FourierTable:
    """Uniform-basis coefficients of ``f_rho`` over the free variables (in order).

    ``rho`` holds ``+1``, ``-1`` or ``'*'`` (``0`` or ``None`` also mean free).
    """
    f = values(table) if isinstance(table, FourierTable) else _table(table)[0]
    m = f.shape[0].bit_length() - 1
    r = _parse_rho(rho, m)
    t = f.reshape((2,) * m) if m else f
    index = tuple(slice(None) if r[i] == 0 else (0 if r[i] == 1 else 1) for i in reversed(range(m)))
    sub = np.asarray(t[index]).reshape(-1)
    return transform(sub)


def restricted_coefficients_formula(table: FourierTable, rho) -> np.ndarray:
    """``hat f_rho(S) = sum_{T >= S, T \\ S in fix} hat f(T) chi_{T \\ S}(rho)`` over free ``S``."""
    if not table.is_uniform:
        raise ValueError("needs uniform-basis coefficients")
    m = table.m
    r = _parse_rho(rho, m)
    free = [i for i in range(m) if r[i] == 0]
    fixed_mask = _mask(i for i in range(m) if r[i] != 0)
    minus_mask = _mask(i for i in range(m) if r[i] == -1)
    out = np.zeros(1 << len(free))
    for T in range(1 << m):
        S_full = T & ~fixed_mask
        sign = -1.0 if bin(T & minus_mask).count("1") % 2 else 1.0
        S_local = sum(1 << j for j, i in enumerate(free) if S_full >> i & 1)
        out[S_local] += sign * table.coefficients[T]
    return out


def _subset_products(x: np.ndarray) -> np.ndarray:
    """``prod_{i in T} x_i`` for every bitmask ``T``."""
    out = np.ones(1)
    for xi in x:
        out = np.concatenate([out, out * xi])
    return out


def check_restriction_identity(table, mu, S, tol: float = 1e-10):
    """Both sides of ``E_rho[hat f_rho(S)] = 2^{-|S|} sigma_S hat f^mu(S)``.

    ``rho`` fixes each coordinate to ``+1`` with probability ``(1+mu)^2/4``, to
    ``-1`` with ``(1-mu)^2/4`` and leaves it free with ``sigma^2/2``. The left
    side uses the closed form ``sum_{T >= S} hat f(T) 2^{-|S|} sigma_S^2 mu_{T \\ S}``.
    Returns ``(lhs, rhs, passed)``.
    """
    f = values(table) if isinstance(table, FourierTable) else _table(table)[0]
    m = f.shape[0].bit_length() - 1
    if m > MAX_RESTRICTION_BITS:
        raise ResourceLimitError(f"restriction check is limited to m <= {MAX_RESTRICTION_BITS}")
    mu = _bias(mu, m)
    s = _mask(S)
    in_S = np.array([(s >> i) & 1 for i in range(m)], dtype=bool)
    sigma2 = 1.0 - mu**2
    uni = transform(f).coefficients
    idx = np.arange(1 << m)
    sup = (idx & s) == s
    mu_prod = _subset_products(mu)
    scale = 2.0 ** (-in_S.sum()) * np.prod(sigma2[in_S])
    lhs = scale * float(np.sum(uni[sup] * mu_prod[idx[sup] & ~s]))
    rhs = 2.0 ** (-in_S.sum()) * np.prod(np.sqrt(sigma2[in_S])) * transform(f, mu).coefficients[s]
    return lhs, float(rhs), bool(abs(lhs - rhs) <= tol)


def restriction_expectation_enumerated(f, mu, S, max_bits: int = 6) -> float:
    """``E_rho[hat f_rho(S)]`` by summing over all ``3^m`` restrictions."""
    f, m = _table(f)
    if m > max_bits:
        raise ResourceLimitError(f"3^m enumeration is limited to m <= {max_bits}")
    mu = _bias(mu, m)
    s = _mask(S)
    probs = {1: (1.0 + mu) ** 2 / 4.0, -1: (1.0 - mu) ** 2 / 4.0, 0: (1.0 - mu**2) / 2.0}
    total = 0.0
    for rho in itertools.product((1, -1, 0), repeat=m):
        if any((s >> i) & 1 and rho[i] != 0 for i in range(m)):
            continue
        p = float(np.prod([probs[rho[i]][i] for i in range(m)]))
        free = [i for i in range(m) if rho[i] == 0]
        local = sum(1 << j for j, i in enumerate(free) if (s >> i) & 1)
        total += p * restrict(f, rho).coefficients[local]
    return total


_STATE_MAP = np.array([[1.0, 0.0], [0.0, 1.0], [0.5, 0.5], [0.5, -0.5]])


def restricted_level_weights(f, variables) -> tuple[np.ndarray, list]:
    """``wt_l(f_rho)`` for every ``rho`` in ``{+1, -1, *}^R`` over ``R = variables``.

    Every other coordinate is left free; ``f`` must not depend on it. Each
    variable of ``R`` is expanded to four states (fixed +1, fixed -1, free and
    absent from ``S``, free and in ``S``), giving all restricted coefficients
    in one tensor. Returns an array ``(3^r, r + 1)`` and the list of ``rho``.
    """
    f, m = _table(f)
    R = list(variables)
    r = len(R)
    if r > MAX_RESTRICTION_BITS:
        raise ResourceLimitError(f"at most {MAX_RESTRICTION_BITS} relevant variables")
    # collapse the irrelevant coordinates (they are all set to +1)
    t = f.reshape((2,) * m) if m else f
    index = tuple(slice(None) if i in R else 0 for i in reversed(range(m)))
    sub = np.asarray(t[index])
    kept = [i for i in reversed(range(m)) if i in R]  # axis order of sub
    for ax in range(r):
        sub = np.moveaxis(np.tensordot(_STATE_MAP, sub, axes=([1], [ax])), 0, ax)
    states = np.array(list(itertools.product(range(4), repeat=r)), dtype=np.int64).reshape(-1, r)
    coef = sub.reshape(-1)
    rho_digit = np.minimum(states, 2)
    rho_index = rho_digit @ (3 ** np.arange(r)[::-1]) if r else np.zeros(1, dtype=np.int64)
    level = (states == 3).sum(axis=1)
    out = np.zeros((3**r, r + 1))
    np.add.at(out, (rho_index, level), np.abs(coef))
    labels = {1: 0, -1: 1, "*": 2}
    inv = {v: k for k, v in labels.items()}
    rhos = []
    for digits in itertools.product(range(3), repeat=r):
        rho = ["*"] * m
        for var, d in zip(kept, digits):
            rho[var] = inv[d]
        rhos.append(rho)
    return out, rhos


def check_weight_transfer(tree, mu, level: int, m: int, tol: float = 1e-12):
    """``wt^mu_l(f) <= 4^l max_rho wt_l(f_rho)`` for a tree's acceptance function.

    The maximum runs over restrictions of the variables the tree queries; the
    others cannot change any restricted weight. Returns ``(lhs, rhs, passed)``.
    """
    from .classical import tree_accept_function

    if m > MAX_RESTRICTION_BITS:
        raise ResourceLimitError(f"weight-transfer check is limited to m <= {MAX_RESTRICTION_BITS}")
    f = tree_accept_function(tree, m)
    lhs = level_weight(transform(f, mu), level)
    weights, _ = restricted_level_weights(f, tree.queried)
    w = float(weights[:, level].max()) if level < weights.shape[1] else 0.0
    rhs = 4.0**level * w
    return lhs, rhs, bool(lhs <= rhs + tol)


def tal_shape_statistic(rng, m: int = 12, depth: int = 4, n_trees: int = 50) -> dict:
    """Calibrate ``C`` in ``wt_l <= sqrt(C(d, l)) * (C log m)^((l-1)/2)`` on random trees.

    Report-only: the returned constant is the smallest one consistent with
    the sampled trees, per level ``l >= 2``.
    """
    from .classical import random_tree, tree_accept_function

    worst = np.zeros(depth + 1)
    for _ in range(n_trees):
        w = level_weights(transform(tree_accept_function(random_tree(rng, m, depth), m)))
        worst = np.maximum(worst, w[: depth + 1])
    calibrated = {}
    for ell in range(2, depth + 1):
        ratio = worst[ell] / math.sqrt(math.comb(depth, ell))
        calibrated[ell] = float(ratio ** (2.0 / (ell - 1)) / math.log(m))
    return {
        "m": m,
        "depth": depth,
        "trees": n_trees,
        "max_level_weight": worst.tolist(),
        "binomial_bound": [math.comb(depth, ell) for ell in range(depth + 1)],
        "calibrated_C": calibrated,
    }


def _extend_batch(f, X):
    """Multilinear extension of ``f`` at each row of ``X``."""
    m = X.shape[1]
    t = np.broadcast_to(f.reshape((2,) * m), (len(X),) + (2,) * m)
    for i in range(m):
        coef = np.stack([(1.0 + X[:, i]) / 2.0, (1.0 - X[:, i]) / 2.0], axis=-1)
        t = np.einsum("p...j,pj->p...", t, coef)
    return t


def level_bound_experiment(tree, n: int, k: int, rng, n_mu: int = 20, n_gauss: int = 20000) -> dict:
    """One-sided look at the advantage-versus-biased-weight bound on a small instance.

    The left side ``|E_p1 f - E_p0 f|`` is estimated by Monte Carlo over the
    Gaussian pairs (``E_p1 f`` is the multilinear extension at ``W``). The
    right side's supremum over ``mu`` is replaced by a maximum over sampled
    ``mu``, which can only under-estimate it; the output is report-only.
    """
    from .classical import tree_accept_function
    from .forrelation import ForrelationParams
    from .sampler import sample_gaussian_pairs, truncated_means

    params = ForrelationParams(n, k)
    N, m = params.N, params.total_bits
    if m > 12:
        raise ResourceLimitError("level-bound experiment is limited to kN <= 12")
    f = tree_accept_function(tree, m)
    W = truncated_means(sample_gaussian_pairs(rng, params, size=n_gauss)).reshape(n_gauss, m)
    ext = np.concatenate([_extend_batch(f, W[i:i + 1000]) for i in range(0, n_gauss, 1000)])
    p1 = float(ext.mean())
    p1_se = float(ext.std(ddof=1) / math.sqrt(n_gauss))
    p0 = float(f.mean())
    levels = range(k, k * (k - 1) + 1)
    best = 0.0
    for _ in range(n_mu):
        mu = rng.uniform(-0.5, 0.5, size=m)
        w = level_weights(transform(f, mu))
        val = sum((1.0 / math.sqrt(N)) ** (ell * (1.0 - 1.0 / k)) * (8.0 * k) ** (14 * ell) * w[ell]
                  for ell in levels if ell <= m)
        best = max(best, float(val))
    return {"advantage": abs(p1 - p0), "advantage_se": p1_se, "rhs_sampled_max": best,
            "n_mu": n_mu, "one_sided": True}
