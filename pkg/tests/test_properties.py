import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from kforr.forrelation import forr_value
from kforr.fourier import transform, values
from kforr.gaussian.special import psi_sigma
from kforr.wht import fwht_normalized

floats = st.floats(-1.0, 1.0, allow_nan=False)


@st.composite
def block_vectors(draw):
    k = draw(st.integers(2, 5))
    n = draw(st.integers(0, 5))
    return draw(arrays(np.float64, (k, 1 << n), elements=floats))


@settings(max_examples=200, deadline=None)
@given(block_vectors())
def test_forr_bounded(z):
    assert abs(forr_value(z)) <= 1 + 1e-10


@settings(max_examples=100, deadline=None)
@given(block_vectors())
def test_forr_multilinear_in_each_block(z):
    # scaling one block scales the value
    w = z.copy()
    w[-1] *= 0.5
    assert abs(forr_value(w) - 0.5 * forr_value(z)) < 1e-12


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10).flatmap(lambda n: arrays(np.float64, 1 << n, elements=st.floats(-1e3, 1e3))))
def test_fwht_isometry(v):
    w = fwht_normalized(v)
    assert abs(np.linalg.norm(w) - np.linalg.norm(v)) <= 1e-9 * (1 + np.linalg.norm(v))
    assert np.allclose(fwht_normalized(w), v, atol=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 6).flatmap(
    lambda m: st.tuples(arrays(np.float64, 1 << m, elements=floats),
                        arrays(np.float64, m, elements=st.floats(-0.5, 0.5)))))
def test_biased_round_trip(args):
    f, mu = args
    assert np.abs(values(transform(f, mu)) - f).max() <= 1e-12


@settings(max_examples=100, deadline=None)
@given(st.floats(-50, 50), st.floats(1e-3, 1.0))
def test_psi_range(s, sigma):
    v = psi_sigma(s, sigma)
    assert 0.0 <= v <= 1 / np.sqrt(2 * np.pi)
