"""Gaussian special functions, exact moments, quadrature and identity checks."""
from .identities import (
    SmoothFunction,
    check_gaussian_ibp,
    check_gaussian_interpolation,
    check_phi_ibp,
    check_phi_interpolation,
    check_truncated_correlation,
    phi_correlation_quadrature,
    run_identity_suite,
    truncated_correlation,
)
from .quadrature import gaussian_expectation
from .special import (
    InvalidParameterError,
    gamma,
    gaussian_cdf,
    owen_t,
    phi,
    phi_j,
    psi_series,
    psi_sigma,
)
from .wick import CovarianceSpec, Polynomial, ResourceLimitError, wick_expectation

__all__ = [
    "SmoothFunction", "check_gaussian_ibp", "check_gaussian_interpolation", "check_phi_ibp",
    "check_phi_interpolation", "check_truncated_correlation", "phi_correlation_quadrature",
    "run_identity_suite", "truncated_correlation", "gaussian_expectation", "InvalidParameterError",
    "gamma", "gaussian_cdf", "owen_t", "phi", "phi_j", "psi_series", "psi_sigma", "CovarianceSpec",
    "Polynomial", "ResourceLimitError", "wick_expectation",
]
