"""Scalar special functions built around the standard normal density.

Functions accept scalars or arrays unless noted. ``phi`` here is the
truncation map ``Phi(s) - 1/2`` (not the density); the density is ``gamma``.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import integrate, special

__all__ = [
    "InvalidParameterError",
    "gamma",
    "gaussian_cdf",
    "gaussian_cdf_series",
    "phi",
    "hermite_prob",
    "gamma_derivative",
    "psi_sigma",
    "psi_sigma_adaptive",
    "psi_sigma_derivative",
    "phi_j",
    "psi_series",
    "owen_t",
]

INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


class InvalidParameterError(ValueError):
    pass


def gamma(s):
    """Standard normal density."""
    s = np.asarray(s, dtype=np.float64)
    return INV_SQRT_2PI * np.exp(-0.5 * s * s)


def gaussian_cdf(a):
    return special.ndtr(a)


def gaussian_cdf_series(a, terms: int = 60):
    """``1/2 + gamma(a) * sum_{k<terms} a^(2k+1) / (2k+1)!!``.

    Terms are accumulated by the ratio ``a^2 / (2k+3)`` so no double factorial
    is ever formed explicitly.
    """
    if terms < 1:
        raise InvalidParameterError("terms must be at least 1")
    a = np.asarray(a, dtype=np.float64)
    term = a.copy()
    total = term.copy()
    a2 = a * a
    for k in range(terms - 1):
        term = term * a2 / (2 * k + 3)
        total = total + term
    return 0.5 + gamma(a) * total


def phi(s):
    """Truncation map ``Phi(s) - 1/2``: odd, increasing, valued in (-1/2, 1/2)."""
    return special.ndtr(s) - 0.5


def hermite_prob(n: int, s):
    """Probabilists' Hermite polynomial ``h_n`` via ``h_{n+1} = s h_n - n h_{n-1}``."""
    if n < 0:
        raise InvalidParameterError("n must be non-negative")
    s = np.asarray(s, dtype=np.float64)
    h_prev = np.ones_like(s)
    if n == 0:
        return h_prev
    h = s.copy()
    for m in range(1, n):
        h_prev, h = h, s * h - m * h_prev
    return h


def gamma_derivative(n: int, s):
    """``n``-th derivative of the normal density, ``(-1)^n h_n(s) gamma(s)``."""
    sign = -1.0 if n % 2 else 1.0
    return sign * hermite_prob(n, s) * gamma(s)


# Composite Gauss-Legendre rule on [0, 1]. The Psi integrand is a Gaussian
# bump of width ~1/|s| near y = 0, so the panels are graded towards 0.
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


def _graded_rule():
    edges = np.concatenate([[0.0], np.geomspace(1e-3, 1.0, 40)])
    xs, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        half = 0.5 * (b - a)
        xs.append(a + half * (_GL_NODES + 1.0))
        ws.append(half * _GL_WEIGHTS)
    return np.concatenate(xs), np.concatenate(ws)


_Y, _W = _graded_rule()


def _check_sigma(sigma, allow_one=True):
    sigma = np.asarray(sigma, dtype=np.float64)
    upper_ok = sigma <= 1.0 if allow_one else sigma < 1.0
    if np.any(sigma <= 0.0) or np.any(~upper_ok):
        bound = "(0, 1]" if allow_one else "(0, 1)"
        raise InvalidParameterError(f"sigma must lie in {bound}")
    return sigma


def psi_sigma(s, sigma=1.0):
    """``(1/sqrt(2 pi)) int_0^1 exp(-s^2 y^2 / 2) / (1 + sigma^2 y^2) dy``.

    Vectorised over ``s`` and ``sigma`` with a fixed graded Gauss-Legendre
    rule (absolute error below 1e-14 for ``|s| <= 1e3``).
    """
    sigma = _check_sigma(sigma)
    s = np.asarray(s, dtype=np.float64)
    s_b, sig_b = np.broadcast_arrays(s, sigma)
    y = _Y.reshape((1,) * s_b.ndim + (-1,))
    integrand = np.exp(-0.5 * (s_b[..., None] * y) ** 2) / (1.0 + (sig_b[..., None] * y) ** 2)
    out = INV_SQRT_2PI * (integrand @ _W)
    if out.ndim == 0:
        return float(out)
    return out


def psi_sigma_adaptive(s: float, sigma: float = 1.0, tol: float = 1e-12) -> float:
    """Scalar reference evaluation of :func:`psi_sigma` with adaptive quadrature."""
    _check_sigma(sigma)
    val, _ = integrate.quad(
        lambda y: math.exp(-0.5 * (s * y) ** 2) / (1.0 + (sigma * y) ** 2),
        0.0, 1.0, epsabs=tol, epsrel=tol, limit=200,
    )
    return INV_SQRT_2PI * val


def psi_sigma_derivative(n: int, s, sigma=1.0):
    """``d^n/ds^n Psi_sigma(s) = int_0^1 y^n gamma^(n)(s y) / (1 + sigma^2 y^2) dy``."""
    if n < 0:
        raise InvalidParameterError("n must be non-negative")
    sigma = _check_sigma(sigma)
    s = np.asarray(s, dtype=np.float64)
    s_b, sig_b = np.broadcast_arrays(s, sigma)
    y = _Y.reshape((1,) * s_b.ndim + (-1,))
    integrand = y**n * gamma_derivative(n, s_b[..., None] * y) / (1.0 + (sig_b[..., None] * y) ** 2)
    out = integrand @ _W
    if out.ndim == 0:
        return float(out)
    return out


def phi_j(j: int, s):
    """``(-1)^j gamma(s) sum_k (2j-1)!!/(2k+2j+1)!! s^(2k+1)``; ``phi_0`` is ``phi``.

    The inner series is summed until terms stop changing the total.
    """
    if j < 0:
        raise InvalidParameterError("j must be non-negative")
    s = np.asarray(s, dtype=np.float64)
    s2 = s * s
    term = s / (2 * j + 1)
    total = term.copy()
    k = 0
    while True:
        term = term * s2 / (2 * k + 2 * j + 3)
        total = total + term
        k += 1
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)) or k > 10_000:
            break
    sign = -1.0 if j % 2 else 1.0
    return sign * gamma(s) * total


def psi_series(s, sigma: float, j_max: int | None = None):
    """``(1/s) sum_{j<=j_max} sigma^(2j) phi_j(s)``, the series form of ``Psi_sigma``.

    The ``s = 0`` entries use the limit ``arctan(sigma) / (sqrt(2 pi) sigma)``.
    When ``j_max`` is None it is chosen so that ``sigma^(2 j_max) < 1e-17``.
    """
    sigma = float(_check_sigma(sigma, allow_one=False))
    if j_max is None:
        j_max = int(math.ceil(math.log(1e-17) / (2.0 * math.log(sigma)))) + 1
    s = np.asarray(s, dtype=np.float64)
    nonzero = s != 0.0
    safe = np.where(nonzero, s, 1.0)
    total = np.zeros_like(safe)
    for j in range(j_max + 1):
        total = total + sigma ** (2 * j) * phi_j(j, safe)
    out = np.where(nonzero, total / safe, INV_SQRT_2PI * math.atan(sigma) / sigma)
    if out.ndim == 0:
        return float(out)
    return out


def _owen_single(h, sigma, tol):
    val, _ = integrate.quad(
        lambda x: math.exp(-0.5 * h * h * (1.0 + x * x)) / (1.0 + x * x),
        0.0, sigma, epsabs=tol, epsrel=tol, limit=200,
    )
    return val / (2.0 * math.pi)


def _owen_double(h, sigma, tol):
    inner, _ = integrate.dblquad(
        lambda y, x: math.exp(-0.5 * (x * x + y * y)),
        0.0, h,
        lambda x: 0.0, lambda x: sigma * x,
        epsabs=tol, epsrel=tol,
    )
    return (math.atan(sigma) - inner) / (2.0 * math.pi)


def owen_t(h: float, sigma: float, form: str = "single", tol: float = 1e-13) -> float:
    """Owen's T function by direct quadrature.

    ``form="single"`` integrates ``exp(-h^2 (1+x^2)/2) / (1+x^2)`` over
    ``[0, sigma]``; ``form="double"`` subtracts the two-dimensional Gaussian
    integral over ``0 <= x <= h, 0 <= y <= sigma x`` from ``arctan(sigma)``.
    """
    if form == "single":
        return _owen_single(float(h), float(sigma), tol)
    if form == "double":
        return _owen_double(float(h), float(sigma), tol)
    raise InvalidParameterError(f"unknown form {form!r}; expected 'single' or 'double'")
