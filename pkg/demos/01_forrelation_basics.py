"""A first look at the k-fold Forrelation value.

Run with ``python demos/01_forrelation_basics.py``.
"""
import numpy as np

from kforr import sampler
from kforr.forrelation import ForrelationParams, forr_label, forr_value
from kforr.quantum import accept_probability

rng = np.random.default_rng(7)
params = ForrelationParams(n=6, k=3)
print(f"N = {params.N}, k = {params.k}, promise gap delta = {params.delta:.3g}")

# All-ones blocks are perfectly forrelated when k is odd.
ones = np.ones((params.k, params.N), dtype=np.int8)
print("forr(all ones) =", forr_value(ones))

# Uniform inputs sit near zero; the planted distribution is biased upward.
z0 = sampler.sample_p0(rng, params, size=2000)
z1 = sampler.sample_p1(rng, params, size=2000).Z
print(f"mean forr under p0: {forr_value(z0).mean():+.5f}")
print(f"mean forr under p1: {forr_value(z1).mean():+.5f}"
      f"  (closed form {sampler.p1_mean_closed_form(params.N, params.k):.5f})")

# A single input, its label and the simulated quantum acceptance probability.
z = z1[0]
run = accept_probability(z, params)
print(f"label {forr_label(z, params).value}, accept {run.accept_probability:.4f}, "
      f"queries {run.queries}, gate estimate {run.gate_estimate}")
