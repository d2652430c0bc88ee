import numpy as np
import pytest

from kforr.wht import (
    HadamardDim,
    InvalidDimensionError,
    InvalidIndexError,
    fwht_normalized,
    fwht_unnormalized,
    hadamard_entries,
    hadamard_entry,
    hadamard_matrix,
    log2_exact,
)


def test_dim_and_log2():
    assert HadamardDim(5).N == 32
    assert HadamardDim.from_size(64).n == 6
    assert log2_exact(1) == 0
    for bad in (0, 3, 12, -4):
        with pytest.raises(InvalidDimensionError):
            log2_exact(bad)


def test_small_matrices_by_hand():
    h = 1 / np.sqrt(2)
    assert np.allclose(hadamard_matrix(1), [[h, h], [h, -h]])
    H2 = hadamard_matrix(2)
    assert np.allclose(H2 * 2, [[1, 1, 1, 1], [1, -1, 1, -1], [1, 1, -1, -1], [1, -1, -1, 1]])


def test_entry_formula_matches_matrix():
    for n in range(5):
        H = hadamard_matrix(n)
        N = 1 << n
        i, j = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
        assert np.abs(hadamard_entries(i, j, n) - H).max() <= 1e-15
        assert abs(hadamard_entry(N - 1, N - 1, n) - H[N - 1, N - 1]) <= 1e-15


def test_entry_range_errors():
    with pytest.raises(InvalidIndexError):
        hadamard_entry(4, 0, 2)
    with pytest.raises(InvalidIndexError):
        hadamard_entry(0, -1, 2)


@pytest.mark.parametrize("n", range(0, 8))
def test_fwht_matches_dense(rng, n):
    v = rng.normal(size=(3, 1 << n))
    assert np.abs(fwht_normalized(v) - v @ hadamard_matrix(n).T).max() <= 1e-12


def test_unnormalized_is_integer_on_signs(rng):
    v = rng.choice([-1, 1], size=(5, 128))
    out = fwht_unnormalized(v)
    assert np.array_equal(out, np.round(out))
    assert np.allclose(out / np.sqrt(128), fwht_normalized(v))


def test_delta_maps_to_constant():
    e0 = np.zeros(16)
    e0[0] = 1
    assert np.allclose(fwht_normalized(e0), np.full(16, 0.25))


def test_in_place_and_batches(rng):
    v = rng.normal(size=(2, 3, 64))
    expect = fwht_normalized(v)
    buf = v.copy()
    out = fwht_normalized(buf, out=buf)
    assert out is buf
    assert np.allclose(buf, expect)
    assert np.allclose(fwht_normalized(v[1, 2]), expect[1, 2])


def test_non_power_of_two_rejected():
    with pytest.raises(InvalidDimensionError):
        fwht_normalized(np.ones(12))


def test_involution_large(rng):
    v = rng.normal(size=1 << 16)
    assert np.abs(fwht_normalized(fwht_normalized(v)) - v).max() <= 1e-12
