import math

import numpy as np
import pytest
from scipy.special import owens_t

from kforr.gaussian.special import (
    InvalidParameterError,
    gamma,
    gamma_derivative,
    gaussian_cdf,
    gaussian_cdf_series,
    hermite_prob,
    owen_t,
    phi,
    phi_j,
    psi_series,
    psi_sigma,
    psi_sigma_adaptive,
    psi_sigma_derivative,
)


def test_frozen_values():
    assert gaussian_cdf(0.0) == 0.5
    assert abs(phi(1.0) - 0.341344746068543) < 1e-14
    assert abs(gamma_derivative(1, 1.0) - (-0.2419707245191434)) < 1e-15
    assert abs(gamma_derivative(2, 0.0) + 0.3989422804014327) < 1e-15
    assert abs(psi_sigma(0.0, 1.0) - 0.3133285343288750) < 1e-14
    assert abs(owen_t(0.0, 1.0) - 0.125) < 1e-14


def test_phi_symmetry():
    s = np.linspace(-5, 5, 41)
    assert np.allclose(phi(-s), -phi(s), atol=1e-16)
    assert phi(0.0) == 0.0
    assert np.all(np.abs(phi(s)) < 0.5)


def test_cdf_series():
    a = np.linspace(-4, 4, 33)
    assert np.abs(gaussian_cdf_series(a, 60) - gaussian_cdf(a)).max() < 1e-12
    with pytest.raises(InvalidParameterError):
        gaussian_cdf_series(1.0, 0)


def test_hermite_low_orders():
    s = np.linspace(-2, 2, 9)
    assert np.allclose(hermite_prob(0, s), 1)
    assert np.allclose(hermite_prob(2, s), s**2 - 1)
    assert np.allclose(hermite_prob(4, s), s**4 - 6 * s**2 + 3)


def test_gamma_derivative_by_differences():
    s = np.linspace(-3, 3, 13)
    h = 1e-5
    for n in range(1, 5):
        fd = (gamma_derivative(n - 1, s + h) - gamma_derivative(n - 1, s - h)) / (2 * h)
        assert np.abs(fd - gamma_derivative(n, s)).max() < 1e-8


def test_psi_against_adaptive():
    for s in (0.0, 0.3, 1.0, 2.5, 7.0, 40.0):
        for sigma in (0.05, 0.5, 1.0):
            assert abs(psi_sigma(s, sigma) - psi_sigma_adaptive(s, sigma)) < 1e-12


def test_psi_parameter_guard():
    for bad in (0.0, -0.2, 1.2):
        with pytest.raises(InvalidParameterError):
            psi_sigma(1.0, bad)
    with pytest.raises(InvalidParameterError):
        psi_series(1.0, 1.0)


def test_psi_series_limits():
    assert abs(psi_series(0.0, 0.6) - math.atan(0.6) / (0.6 * math.sqrt(2 * math.pi))) < 1e-15
    # sigma -> 0 keeps only phi(s)/s
    assert abs(psi_series(1.0, 1e-6) - 0.341344746068543) < 1e-10
    s = np.linspace(-3, 3, 13)
    assert np.abs(psi_series(s, 0.95) - psi_sigma(s, 0.95)).max() < 1e-8


def test_psi_derivative_integral_form():
    s = np.linspace(-2, 2, 9)
    h = 1e-4
    fd = (psi_sigma(s + h, 0.7) - psi_sigma(s - h, 0.7)) / (2 * h)
    assert np.abs(fd - psi_sigma_derivative(1, s, 0.7)).max() < 1e-8
    assert np.allclose(psi_sigma_derivative(0, s, 0.7), psi_sigma(s, 0.7))


def test_phi_j_base_and_sign():
    s = np.linspace(0.1, 4, 20)
    assert np.allclose(phi_j(0, s), phi(s), atol=1e-15)
    assert np.all(phi_j(1, s) <= 0) and np.all(phi_j(2, s) >= 0)


def test_owen_against_scipy_and_forms():
    for h in (0.0, 0.5, 1.7, 3.9):
        for a in (0.0, 0.3, 1.0):
            ref = owens_t(h, a)
            assert abs(owen_t(h, a) - ref) < 1e-13
            assert abs(owen_t(h, a, "double") - ref) < 1e-11
    with pytest.raises(InvalidParameterError):
        owen_t(1.0, 1.0, "triple")
