"""Numerical verifiers for the Gaussian interpolation and integration-by-parts
identities, both the classical ones and their truncated (``phi``) variants.

Polynomial identities are checked exactly through Wick moments. Identities
involving ``phi`` or ``Psi_sigma`` are checked by Gauss-Hermite quadrature.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..report import Check, bound_check, close_check
from .quadrature import gauss_hermite_standard, gaussian_expectation
from .special import (
    InvalidParameterError,
    gamma,
    gamma_derivative,
    gaussian_cdf,
    gaussian_cdf_series,
    hermite_prob,
    owen_t,
    phi,
    phi_j,
    psi_sigma,
    psi_sigma_adaptive,
    psi_series,
)
from .wick import Polynomial, random_psd

__all__ = [
    "SmoothFunction",
    "check_gaussian_interpolation",
    "check_gaussian_ibp",
    "check_phi_ibp",
    "check_phi_interpolation",
    "truncated_correlation",
    "phi_correlation_quadrature",
    "check_truncated_correlation",
    "check_owen_forms",
    "check_psi",
    "check_special_functions",
    "run_identity_suite",
]

WICK_TOL = 1e-10
PHI_IBP_TOL = 1e-6
PHI_INTERP_TOL = 1e-5
CORR_TOL = 1e-8
OWEN_TOL = 1e-10
PSI_SERIES_TOL = 1e-8


# --- classical identities, exact through Wick moments -----------------------

def _interp_cov(cov_G, cov_B, t):
    return t * np.asarray(cov_G) + (1.0 - t) * np.asarray(cov_B)


def _zeta_derivative_exact(f: Polynomial, cov_G, cov_B, t_grid):
    """Differentiate ``t -> E f(G(t))`` exactly.

    The map is a polynomial in ``t`` of degree at most ``deg(f) / 2``: it is
    sampled at Chebyshev nodes, interpolated and differentiated.
    """
    deg_t = f.degree // 2
    if deg_t == 0:
        return np.zeros(len(t_grid))
    nodes = 0.5 + 0.5 * np.cos(np.pi * (np.arange(deg_t + 1) + 0.5) / (deg_t + 1))
    values = [f.expectation(_interp_cov(cov_G, cov_B, t)) for t in nodes]
    poly = np.polynomial.Polynomial.fit(nodes, values, deg_t, domain=[0.0, 1.0], window=[0.0, 1.0])
    return poly.deriv()(np.asarray(t_grid))


def check_gaussian_interpolation(f: Polynomial, cov_G, cov_B, t_grid, tol=WICK_TOL, tag="gauss_interp"):
    """Smart-path derivative identity and its integrated form (with ``B = 0``)."""
    cov_G = np.asarray(cov_G, dtype=np.float64)
    cov_B = np.asarray(cov_B, dtype=np.float64)
    m = f.nvars
    t_grid = np.asarray(t_grid, dtype=np.float64)
    lhs = _zeta_derivative_exact(f, cov_G, cov_B, t_grid)
    second = {(i, j): f.derivative(i).derivative(j) for i in range(m) for j in range(m)}
    diff = cov_G - cov_B
    rhs = np.array([
        0.5 * sum(diff[i, j] * second[i, j].expectation(_interp_cov(cov_G, cov_B, t))
                  for i in range(m) for j in range(m) if diff[i, j] != 0.0)
        for t in t_grid
    ])
    derivative = close_check(f"{tag}.derivative", lhs, rhs, tol)

    zero = np.zeros_like(cov_G)
    gl_t, gl_w = np.polynomial.legendre.leggauss(max(f.degree, 2))
    gl_t, gl_w = 0.5 * (gl_t + 1.0), 0.5 * gl_w
    integral = 0.0
    for i in range(m):
        for j in range(m):
            if cov_G[i, j] == 0.0:
                continue
            inner = sum(w * second[i, j].expectation(_interp_cov(cov_G, zero, t)) for t, w in zip(gl_t, gl_w))
            integral += 0.5 * cov_G[i, j] * inner
    lhs_int = f.expectation(cov_G) - float(f(np.zeros(m)))
    integrated = close_check(f"{tag}.integrated", lhs_int, integral, tol)
    return [derivative, integrated]


def check_gaussian_ibp(f: Polynomial, cov, tol=WICK_TOL, tag="gauss_ibp") -> Check:
    """``E[B f(G)] = sum_i E[B G_i] E[d_i f(G)]``; coordinate 0 of ``cov`` is ``B``."""
    cov = np.asarray(cov, dtype=np.float64)
    m = f.nvars
    if cov.shape != (m + 1, m + 1):
        raise ValueError(f"covariance must be {(m + 1, m + 1)} for (B, G_1..G_m)")
    lifted = f.embed(m + 1, list(range(1, m + 1)))
    lhs = (Polynomial.variable(m + 1, 0) * lifted).expectation(cov)
    rhs = sum(cov[0, i + 1] * lifted.derivative(i + 1).expectation(cov) for i in range(m))
    return close_check(tag, lhs, rhs, tol)


# --- truncated identities, by quadrature ------------------------------------

@dataclass(frozen=True)
class SmoothFunction:
    """A vectorised test function on ``R^m`` together with its gradient.

    ``value(x)`` maps points ``(P, m)`` to ``P`` values; ``grad(x)`` to ``(P, m)``.
    """

    name: str
    m: int
    value: Callable
    grad: Callable


def _linear(m, coef):
    coef = np.asarray(coef, dtype=np.float64)
    return SmoothFunction(f"linear{list(coef)}", m, lambda x: x @ coef,
                          lambda x: np.broadcast_to(coef, x.shape))


SMOOTH_LIBRARY = {
    "one": SmoothFunction("one", 1, lambda x: np.ones(len(x)), lambda x: np.zeros_like(x)),
    "x": _linear(1, [1.0]),
    "phi": SmoothFunction("phi", 1, lambda x: phi(x[:, 0]), lambda x: gamma(x)),
    "cos": SmoothFunction("cos", 1, lambda x: np.cos(0.7 * x[:, 0]),
                          lambda x: -0.7 * np.sin(0.7 * x)),
    "x1_phi_x2": SmoothFunction(
        "x1_phi_x2", 2, lambda x: x[:, 0] * phi(x[:, 1]),
        lambda x: np.stack([phi(x[:, 1]), x[:, 0] * gamma(x[:, 1])], axis=-1)),
    "phi_x1_phi_x2": SmoothFunction(
        "phi_x1_phi_x2", 2, lambda x: phi(x[:, 0]) * phi(x[:, 1]),
        lambda x: np.stack([gamma(x[:, 0]) * phi(x[:, 1]), phi(x[:, 0]) * gamma(x[:, 1])], axis=-1)),
    "quad_mix": SmoothFunction(
        "quad_mix", 2, lambda x: x[:, 0] ** 2 * x[:, 1] + np.sin(x[:, 1]),
        lambda x: np.stack([2 * x[:, 0] * x[:, 1], x[:, 0] ** 2 + np.cos(x[:, 1])], axis=-1)),
}


def check_phi_ibp(h: SmoothFunction, cov, tol=PHI_IBP_TOL, n_nodes=None, psi_scale=1.0, tag=None) -> Check:
    """``E[phi(B) h(G)] = sum_i E[B G_i] E[Psi_sigma(B) d_i h(G)]`` with ``sigma^2 = E[B^2]``.

    ``cov`` is the joint covariance of ``(B, G_1, ..., G_m)``, ``m <= 2``.
    ``psi_scale`` multiplies ``Psi_sigma`` and exists only as a negative control.
    """
    cov = np.asarray(cov, dtype=np.float64)
    m = h.m
    if m > 2:
        raise ValueError("tensor quadrature is limited to m <= 2")
    if cov.shape != (m + 1, m + 1):
        raise ValueError(f"covariance must be {(m + 1, m + 1)} for (B, G_1..G_m)")
    sigma = math.sqrt(cov[0, 0])
    if not 0.0 < sigma <= 1.0:
        raise InvalidParameterError("E[B^2] must lie in (0, 1]")
    if n_nodes is None:
        n_nodes = 64 if m == 1 else 40

    lhs = gaussian_expectation(lambda p: phi(p[:, 0]) * h.value(p[:, 1:]), cov, n_nodes)

    def rhs_integrand(p):
        weights = psi_scale * psi_sigma(p[:, 0], sigma)
        g = h.grad(p[:, 1:])
        return weights * (g @ cov[0, 1:])

    rhs = gaussian_expectation(rhs_integrand, cov, n_nodes)
    return close_check(tag or f"phi_ibp.{h.name}", lhs, rhs, tol, rel=True, floor=1e-3)


def _phi_interp_zeta(f: Polynomial, M, t, x, w):
    U = x * math.sqrt(t)
    V = U @ M
    pts = np.concatenate([phi(U), phi(V)], axis=1)
    return float(np.dot(w, f(pts))), U, V


def _tensor_rule(n, n_nodes):
    x, w = gauss_hermite_standard(n_nodes)
    grids = np.meshgrid(*([x] * n), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    weights = np.ones(len(pts))
    for wg in np.meshgrid(*([w] * n), indexing="ij"):
        weights = weights * wg.ravel()
    return pts, weights


def check_phi_interpolation(f: Polynomial, M, t_grid, tol=PHI_INTERP_TOL, n_nodes=64, fd_step=1e-3,
                            tag="phi_interp") -> Check:
    """Derivative of ``t -> E f(phi(sqrt(t) U), phi(sqrt(t) V))`` for ``Cov(U, V) = M``.

    ``f`` is multilinear in ``(x_1..x_n, y_1..y_n)``. The left side uses a
    five-point central difference of the quadrature value; the right side is
    ``1/(1+t) sum_ij M_ij E[d2f/dx_i dy_j * gamma(U_i) gamma(V_j)]``.
    The pair is sampled as ``V = M^T U``, which has exactly that covariance.
    """
    M = np.atleast_2d(np.asarray(M, dtype=np.float64))
    n = M.shape[0]
    if n > 2:
        raise ValueError("tensor quadrature is limited to n <= 2")
    if f.nvars != 2 * n:
        raise ValueError(f"f must have {2 * n} variables")
    x, w = _tensor_rule(n, n_nodes)
    cross = {(i, j): f.derivative(i).derivative(n + j) for i in range(n) for j in range(n)}

    lhs, rhs = [], []
    h = fd_step
    for t in np.asarray(t_grid, dtype=np.float64):
        z = [_phi_interp_zeta(f, M, t + s * h, x, w)[0] for s in (-2, -1, 1, 2)]
        lhs.append((z[0] - 8 * z[1] + 8 * z[2] - z[3]) / (12 * h))
        _, U, V = _phi_interp_zeta(f, M, t, x, w)
        pts = np.concatenate([phi(U), phi(V)], axis=1)
        total = 0.0
        for (i, j), d2 in cross.items():
            if M[i, j] == 0.0 or not d2.terms:
                continue
            total += M[i, j] * float(np.dot(w, d2(pts) * gamma(U[:, i]) * gamma(V[:, j])))
        rhs.append(total / (1.0 + t))
    return close_check(tag, np.array(lhs), np.array(rhs), tol, rel=True, floor=1e-3)


# --- truncated correlation --------------------------------------------------

def truncated_correlation(rho: float) -> float:
    """``E[phi(B) phi(G)]`` for unit-variance ``B, G`` with correlation ``rho``:
    ``arctan(rho / sqrt(4 - rho^2)) / (2 pi)``."""
    if not -1.0 < rho < 1.0:
        raise InvalidParameterError("rho must lie in (-1, 1)")
    return math.atan(rho / math.sqrt(4.0 - rho * rho)) / (2.0 * math.pi)


def phi_correlation_quadrature(rho: float, n_nodes: int = 64) -> float:
    """Same quantity by 2-D Gauss-Hermite quadrature; ``|rho| = 1`` is allowed."""
    if abs(rho) > 1.0:
        raise InvalidParameterError("rho must lie in [-1, 1]")
    cov = np.array([[1.0, rho], [rho, 1.0]])
    return gaussian_expectation(lambda p: phi(p[:, 0]) * phi(p[:, 1]), cov, n_nodes)


def check_truncated_correlation(rhos, tol=CORR_TOL):
    rhos = np.asarray(rhos, dtype=np.float64)
    closed = np.array([truncated_correlation(r) for r in rhos])
    quad = np.array([phi_correlation_quadrature(r) for r in rhos])
    checks = [
        close_check("corr.closed_vs_quadrature", closed, quad, tol),
        bound_check("corr.lower_bound", rhos * closed, rhos**2 / 32.0, upper=False),
        close_check("corr.rho_one_limit", phi_correlation_quadrature(1.0), 1.0 / 12.0, tol),
        close_check("corr.rho_to_one_closed_form", truncated_correlation(1.0 - 1e-15), 1.0 / 12.0, tol),
    ]
    return checks


# --- special-function checks -------------------------------------------------

def check_owen_forms(h_grid=None, sigma_grid=None, tol=OWEN_TOL):
    if h_grid is None:
        h_grid = np.linspace(0.0, 4.0, 20)
    if sigma_grid is None:
        sigma_grid = np.linspace(0.0, 1.0, 10)
    single = np.array([[owen_t(h, s, "single") for s in sigma_grid] for h in h_grid])
    double = np.array([[owen_t(h, s, "double") for s in sigma_grid] for h in h_grid])
    sym = np.array([[owen_t(-h, s) - owen_t(h, s) for s in sigma_grid[::3]] for h in h_grid[::4]])
    anti = np.array([[owen_t(h, -s) + owen_t(h, s) for s in sigma_grid[::3]] for h in h_grid[::4]])
    return [
        close_check("owen.single_vs_double", single.ravel(), double.ravel(), tol),
        close_check("owen.T(0,1)", owen_t(0.0, 1.0), 0.125, 1e-12),
        close_check("owen.even_in_h", sym.ravel(), 0.0, 1e-14),
        close_check("owen.odd_in_sigma", anti.ravel(), 0.0, 1e-14),
    ]


def check_psi(s_grid=None, sigma_grid=None, tol=PSI_SERIES_TOL, psi_scale=1.0):
    """Quadrature vs series, the value at 0, range and derivative bounds."""
    if s_grid is None:
        s_grid = np.linspace(0.0, 4.0, 17)
    if sigma_grid is None:
        sigma_grid = np.linspace(0.1, 0.9, 9)
    quad = np.array([[psi_scale * psi_sigma(s, sg) for s in s_grid] for sg in sigma_grid])
    series = np.array([[psi_series(s, sg) for s in s_grid] for sg in sigma_grid])
    wide_s = np.linspace(-12.0, 12.0, 241)
    wide_sigma = np.linspace(0.05, 1.0, 20)
    values = psi_scale * psi_sigma(wide_s[None, :], wide_sigma[:, None])
    checks = [
        close_check("psi.quadrature_vs_series", quad.ravel(), series.ravel(), tol),
        close_check("psi.at_zero_sigma_one", psi_scale * psi_sigma(0.0, 1.0), 0.313329, 1e-6),
        close_check("psi.adaptive_vs_fixed_rule",
                    np.array([psi_sigma_adaptive(s, sg) for s in (0.0, 0.7, 3.0, 9.0) for sg in (0.2, 1.0)]),
                    np.array([psi_scale * psi_sigma(s, sg) for s in (0.0, 0.7, 3.0, 9.0) for sg in (0.2, 1.0)]),
                    1e-10),
        bound_check("psi.range_low", values.min(), 0.0, upper=False),
        bound_check("psi.range_high", values.max(), 1.0 / math.sqrt(2.0 * math.pi)),
    ]
    rel_s = np.linspace(0.0, 2.0, 9)
    rel_sigma = np.linspace(0.5, 1.0, 6)
    via_owen = np.array([[math.sqrt(2 * math.pi) * math.exp(s * s / (2 * sg * sg)) / sg * owen_t(s / sg, sg)
                          for s in rel_s] for sg in rel_sigma])
    direct = np.array([[psi_scale * psi_sigma(s, sg) for s in rel_s] for sg in rel_sigma])
    checks.append(close_check("psi.owen_relation", direct.ravel(), via_owen.ravel(), 1e-8))
    checks.extend(check_psi_derivative_bounds(psi_scale=psi_scale))
    return checks


def _fd_derivative(fn, s, n, h):
    """Central finite difference of order ``n`` (second-order accurate)."""
    total = 0.0
    for r in range(n + 1):
        total = total + (-1) ** r * math.comb(n, r) * fn(s + (n / 2.0 - r) * h)
    return total / h**n


def check_psi_derivative_bounds(n_max=4, psi_scale=1.0):
    s = np.linspace(-6.0, 6.0, 121)
    checks = []
    for sigma in (0.25, 0.6, 1.0):
        for n in range(1, n_max + 1):
            d = _fd_derivative(lambda x: psi_scale * psi_sigma(x, sigma), s, n, 0.02)
            checks.append(bound_check(f"psi.derivative_bound.n{n}.sigma{sigma}", np.abs(d).max(), n ** (n / 2.0)))
    return checks


def check_special_functions():
    a = np.linspace(-4.0, 4.0, 81)
    a_pos = np.linspace(0.05, 6.0, 120)
    s = np.linspace(-8.0, 8.0, 161)
    checks = [
        close_check("cdf.at_zero", float(gaussian_cdf(0.0)), 0.5, 1e-15),
        close_check("cdf.series_vs_erf", gaussian_cdf_series(a, 60), gaussian_cdf(a), 1e-12),
        bound_check("cdf.concentration", 1.0 - gaussian_cdf(a_pos), 0.5 * np.exp(-a_pos**2 / 2.0)),
        close_check("gamma_derivative.n1_s1", gamma_derivative(1, 1.0), -float(gamma(1.0)), 1e-15),
        close_check("gamma_derivative.n2_s0", gamma_derivative(2, 0.0), -1.0 / math.sqrt(2 * math.pi), 1e-15),
    ]
    for n in range(1, 11):
        checks.append(bound_check(f"gamma_derivative.bound.n{n}", np.abs(gamma_derivative(n, s)).max(), n ** (n / 2.0)))
    # phi_j: magnitude bounded by |phi|, and d/ds(phi_j / s) = phi_{j+1}
    grid = np.linspace(-5.0, 5.0, 101)
    grid = grid[grid != 0.0]
    for j in range(0, 6):
        checks.append(bound_check(f"phi_j.alternation.j{j + 1}",
                                  np.abs(phi_j(j + 1, grid)), np.abs(phi(grid)) + 1e-15))
        h = 1e-5
        fd = (phi_j(j, grid + h) / (grid + h) - phi_j(j, grid - h) / (grid - h)) / (2 * h)
        checks.append(close_check(f"phi_j.recursion.j{j}", fd, phi_j(j + 1, grid), 1e-8))
    checks.append(close_check("phi_j.j0_is_phi", phi_j(0, grid), phi(grid), 1e-14))
    checks.append(close_check("hermite.h3", hermite_prob(3, 1.7), 1.7**3 - 3 * 1.7, 1e-13))
    return checks


# --- suite ------------------------------------------------------------------

def _random_orthogonal(rng, n):
    Q, R = np.linalg.qr(rng.normal(size=(n, n)))
    return Q * np.sign(np.diag(R))


def run_identity_suite(seed: int = 0, n_cases: int = 50, psi_scale: float = 1.0):
    """Every Gaussian identity check, as a flat list of :class:`Check` records.

    ``psi_scale != 1`` perturbs ``Psi_sigma`` wherever it is used, which must
    make the suite fail.
    """
    rng = np.random.default_rng(seed)
    checks = []
    checks.extend(check_special_functions())
    checks.extend(check_owen_forms())
    checks.extend(check_psi(psi_scale=psi_scale))
    rhos = np.concatenate([-np.arange(0.95, 0.0, -0.05), np.arange(0.05, 0.951, 0.05)])
    checks.extend(check_truncated_correlation(np.round(rhos, 2)))

    t_grid = np.array([0.1, 0.3, 0.5, 0.7, 0.9])
    interp, ibp = [], []
    for _ in range(n_cases):
        f = Polynomial.random_multilinear(rng, 4, 4)
        cov_G = random_psd(rng, 4)
        cov_B = random_psd(rng, 4)
        interp.extend(check_gaussian_interpolation(f, cov_G, cov_B, t_grid))
        g = Polynomial.random(rng, 3, 5)
        ibp.append(check_gaussian_ibp(g, random_psd(rng, 4)))
    checks.append(_aggregate("gauss_interp.random_cases", interp))
    checks.append(_aggregate("gauss_ibp.random_cases", ibp))

    phi_cases = []
    for name in ("one", "x", "phi", "cos"):
        for sigma, rho in ((1.0, 0.6), (0.7, -0.4), (0.5, 0.3)):
            cov = np.array([[sigma**2, rho * sigma], [rho * sigma, 1.0]])
            phi_cases.append(check_phi_ibp(SMOOTH_LIBRARY[name], cov, psi_scale=psi_scale))
    for name in ("x1_phi_x2", "phi_x1_phi_x2", "quad_mix"):
        for _ in range(2):
            C = random_psd(rng, 3)
            scale = math.sqrt(C[0, 0]) / rng.uniform(0.5, 1.0)
            D = np.diag([1.0 / scale, 1.0, 1.0])
            phi_cases.append(check_phi_ibp(SMOOTH_LIBRARY[name], D @ C @ D, psi_scale=psi_scale))
    checks.append(_aggregate("phi_ibp.cases", phi_cases))

    phi_interp = []
    f11 = Polynomial(2, {(1, 1): 1.0})
    phi_interp.append(check_phi_interpolation(f11, np.eye(1), [0.2, 0.5, 0.8], tag="phi_interp.x1y1"))
    closed = [1.0 / (2 * math.pi * (1 + t) * math.sqrt(1 + 2 * t)) for t in (0.2, 0.5, 0.8)]
    phi_interp.append(close_check("phi_interp.x1y1_closed_form", phi_interp[0].value, closed, PHI_INTERP_TOL, rel=True))
    theta = 0.7
    R = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
    phi_interp.append(check_phi_interpolation(Polynomial(4, {(1, 0, 0, 1): 1.0}), R, [0.2, 0.5, 0.8],
                                              tag="phi_interp.x1y2_rotation"))
    for _ in range(3):
        f = Polynomial.random_multilinear(rng, 4, 4)
        phi_interp.append(check_phi_interpolation(f, _random_orthogonal(rng, 2), [0.25, 0.6],
                                                  tag="phi_interp.random"))
    checks.append(_aggregate("phi_interp.cases", phi_interp))
    return checks


def _aggregate(id, checks):
    passed = all(c.passed for c in checks)
    failed = [c.id for c in checks if not c.passed]
    note = f"{len(checks)} cases" + (f"; failing: {sorted(set(failed))}" if failed else "")
    return Check(id, float(sum(c.passed for c in checks)), float(len(checks)), 0, passed, note=note)
