import math

import numpy as np
import pytest

from kforr.gaussian.identities import (
    SMOOTH_LIBRARY,
    check_gaussian_ibp,
    check_gaussian_interpolation,
    check_owen_forms,
    check_phi_ibp,
    check_phi_interpolation,
    check_psi,
    check_special_functions,
    check_truncated_correlation,
    phi_correlation_quadrature,
    run_identity_suite,
    truncated_correlation,
)
from kforr.gaussian.special import InvalidParameterError
from kforr.gaussian.wick import Polynomial, random_psd


def test_interpolation_linear_is_zero(rng):
    f = Polynomial(3, {(1, 0, 0): 1.0, (0, 0, 1): -2.0})
    checks = check_gaussian_interpolation(f, random_psd(rng, 3), random_psd(rng, 3), [0.3, 0.6])
    assert all(c.passed for c in checks)
    assert np.allclose(checks[0].value, 0.0)


def test_interpolation_x1x2_constant(rng):
    C = random_psd(rng, 2)
    checks = check_gaussian_interpolation(Polynomial(2, {(1, 1): 1.0}), C, np.zeros((2, 2)), [0.1, 0.5, 0.9])
    assert np.allclose(checks[0].value, C[0, 1])


def test_interpolation_random(rng):
    for _ in range(5):
        f = Polynomial.random_multilinear(rng, 4, 4)
        assert all(c.passed for c in check_gaussian_interpolation(f, random_psd(rng, 4), random_psd(rng, 4), [0.2, 0.8]))


def test_gaussian_ibp_cases(rng):
    C = random_psd(rng, 3)
    assert check_gaussian_ibp(Polynomial.constant(2, 4.0), C).passed
    c = check_gaussian_ibp(Polynomial.variable(2, 0), C)
    assert c.passed and abs(c.value - C[0, 1]) < 1e-14
    assert check_gaussian_ibp(Polynomial.random(rng, 3, 5), random_psd(rng, 4)).passed
    with pytest.raises(ValueError):
        check_gaussian_ibp(Polynomial.variable(2, 0), np.eye(2))


def test_phi_ibp_examples():
    cov = np.array([[1.0, 0.4], [0.4, 1.0]])
    one = check_phi_ibp(SMOOTH_LIBRARY["one"], cov)
    assert one.passed and abs(one.value) < 1e-14
    assert check_phi_ibp(SMOOTH_LIBRARY["x"], cov).passed
    phi_case = check_phi_ibp(SMOOTH_LIBRARY["phi"], cov)
    assert phi_case.passed
    assert abs(phi_case.value - truncated_correlation(0.4)) < 1e-10


def test_phi_ibp_negative_control():
    cov = np.array([[1.0, 0.6], [0.6, 1.0]])
    assert not check_phi_ibp(SMOOTH_LIBRARY["x"], cov, psi_scale=1.01).passed


def test_phi_ibp_sigma_guard():
    with pytest.raises(InvalidParameterError):
        check_phi_ibp(SMOOTH_LIBRARY["x"], np.array([[2.0, 0.1], [0.1, 1.0]]))


def test_phi_interpolation_closed_form():
    ts = [0.2, 0.5, 0.8]
    c = check_phi_interpolation(Polynomial(2, {(1, 1): 1.0}), np.eye(1), ts)
    assert c.passed
    closed = [1 / (2 * math.pi * (1 + t) * math.sqrt(1 + 2 * t)) for t in ts]
    assert np.allclose(c.value, closed, rtol=1e-6)


def test_phi_interpolation_constant_and_rotation():
    c = check_phi_interpolation(Polynomial.constant(2, 1.0), np.eye(1), [0.4])
    assert c.passed and abs(c.value[0] if np.ndim(c.value) else c.value) < 1e-10
    th = 0.7
    R = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
    assert check_phi_interpolation(Polynomial(4, {(1, 0, 0, 1): 1.0}), R, [0.2, 0.5, 0.8]).passed


def test_truncated_correlation():
    assert truncated_correlation(0.0) == 0.0
    assert abs(truncated_correlation(0.5) + truncated_correlation(-0.5)) < 1e-16
    for bad in (1.0, -1.0, 1.5):
        with pytest.raises(InvalidParameterError):
            truncated_correlation(bad)
    assert abs(phi_correlation_quadrature(1.0) - 1 / 12) < 1e-8
    assert all(c.passed for c in check_truncated_correlation([-0.9, -0.1, 0.3, 0.95]))


def test_component_suites_pass():
    for group in (check_owen_forms(), check_psi(), check_special_functions()):
        failing = [c.id for c in group if not c.passed]
        assert not failing


def test_suite_and_negative_control():
    good = run_identity_suite(seed=1, n_cases=3)
    assert all(c.passed for c in good)
    bad = run_identity_suite(seed=1, n_cases=3, psi_scale=1.01)
    assert not all(c.passed for c in bad)
