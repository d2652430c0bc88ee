import numpy as np
import pytest

from kforr.gaussian.quadrature import gaussian_expectation, reduced_factor
from kforr.gaussian.wick import (
    CovarianceSpec,
    Polynomial,
    ResourceLimitError,
    perfect_matchings,
    random_psd,
    wick_expectation,
)


def test_matching_counts():
    assert [len(perfect_matchings(n)) for n in (0, 2, 4, 6, 8)] == [1, 1, 3, 15, 105]
    assert perfect_matchings(3) == ()


def test_isserlis_four(rng):
    C = random_psd(rng, 4)
    expect = C[0, 1] * C[2, 3] + C[0, 2] * C[1, 3] + C[0, 3] * C[1, 2]
    assert abs(wick_expectation((1, 1, 1, 1), C) - expect) < 1e-14
    assert wick_expectation((1, 0, 2, 0), C) == 0.0
    assert abs(wick_expectation((4, 0, 0, 0), C) - 3 * C[0, 0] ** 2) < 1e-14


def test_degree_guard():
    with pytest.raises(ResourceLimitError):
        wick_expectation((14,), np.eye(1))


def test_second_moment_monte_carlo(rng):
    C = random_psd(rng, 3)
    x = rng.multivariate_normal(np.zeros(3), C, size=200_000)
    mc = (x[:, 0] ** 2).mean()
    se = (x[:, 0] ** 2).std() / np.sqrt(len(x))
    assert abs(wick_expectation((2, 0, 0), C) - mc) < 4 * se


def test_covariance_spec_validation():
    with pytest.raises(ValueError):
        CovarianceSpec([[1.0, 0.5], [0.4, 1.0]])
    with pytest.raises(ValueError):
        CovarianceSpec([[1.0, 2.0], [2.0, 1.0]])
    cov_spec = CovarianceSpec([[1.0, 1.0], [1.0, 1.0]], labels=["B", "G"])
    assert cov_spec.index("G") == 1
    assert abs(wick_expectation((1, 1), cov_spec) - 1.0) < 1e-15


def test_polynomial_algebra(rng):
    p = Polynomial(2, {(1, 1): 2.0, (0, 2): 1.0})
    assert p.degree == 2 and not p.is_multilinear()
    assert p.derivative(1).terms == {(1, 0): 2.0, (0, 1): 2.0}
    x = rng.normal(size=(5, 2))
    assert np.allclose(p(x), 2 * x[:, 0] * x[:, 1] + x[:, 1] ** 2)
    q = p * Polynomial.variable(2, 0) + Polynomial.constant(2, 3.0)
    assert np.allclose(q(x), p(x) * x[:, 0] + 3)
    e = p.embed(3, [2, 0])
    assert e.terms == {(1, 0, 1): 2.0, (2, 0, 0): 1.0}


def test_expectation_against_quadrature(rng):
    C = random_psd(rng, 2)
    p = Polynomial.random(rng, 2, 6)
    assert abs(p.expectation(C) - gaussian_expectation(p, C, 32)) < 1e-9


def test_reduced_factor_singular():
    C = np.array([[1.0, 1.0], [1.0, 1.0]])
    L = reduced_factor(C)
    assert L.shape == (2, 1)
    assert np.allclose(L @ L.T, C)
