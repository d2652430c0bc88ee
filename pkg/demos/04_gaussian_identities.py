"""Spot-check the Gaussian identity suite and the truncated correlation."""
from kforr.gaussian.identities import run_identity_suite, truncated_correlation

for check in run_identity_suite(seed=0, n_cases=5):
    print(check.line())

for rho in (0.1, 0.5, 0.9):
    print(f"E[phi(X) phi(Y)] at rho={rho}: {truncated_correlation(rho):.6f}  (rho^2/32 = {rho * rho / 32:.6f})")
