import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from buresmetric.errors import NotHermitianError, SizeError
from buresmetric.linalg import (
    as_density,
    eigh,
    kron,
    kron_all,
    random_density_matrix,
    random_unitary,
    sqrtm_psd,
    tensor_power,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_eigh_diagonal():
    spec = eigh(np.diag([0.7, 0.3]))
    np.testing.assert_allclose(spec.eigenvalues, [0.3, 0.7])
    assert spec.dim == 2


def test_eigh_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        eigh(np.array([[0.5, 1.0], [0.0, 0.5]]))


def test_eigh_degenerate_cluster_is_orthonormal():
    rng = np.random.default_rng(1)
    u = random_unitary(6, rng)
    m = u @ np.diag([0.1, 0.1, 0.1, 0.2, 0.25, 0.25]) @ u.conj().T
    spec = eigh(m)
    v = spec.eigenvectors
    np.testing.assert_allclose(v.conj().T @ v, np.eye(6), atol=1e-12)
    np.testing.assert_allclose(spec.reconstruct(), m, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, dim=st.integers(1, 8))
def test_eigh_reconstructs(seed, dim):
    rho = random_density_matrix(dim, np.random.default_rng(seed))
    spec = eigh(rho)
    np.testing.assert_allclose(spec.reconstruct(), rho, atol=1e-12)
    assert np.all(np.diff(spec.eigenvalues) >= 0)


@settings(max_examples=25, deadline=None)
@given(seed=seeds)
def test_kron_associative(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (random_density_matrix(2, rng) for _ in range(3))
    np.testing.assert_allclose(kron(kron(a, b), c), kron(a, kron(b, c)), atol=1e-15)
    np.testing.assert_allclose(kron_all([a, b, c]), kron(a, kron(b, c)), atol=1e-15)


@settings(max_examples=25, deadline=None)
@given(seed=seeds, n=st.integers(1, 5))
def test_tensor_power_spectrum_is_product(seed, n):
    rho = random_density_matrix(2, np.random.default_rng(seed))
    lam = np.linalg.eigvalsh(rho)
    expected = lam
    for _ in range(n - 1):
        expected = np.multiply.outer(expected, lam).ravel()
    np.testing.assert_allclose(np.linalg.eigvalsh(tensor_power(rho, n)), np.sort(expected), atol=1e-14)


def test_dimension_cap():
    with pytest.raises(SizeError):
        tensor_power(np.eye(2) / 2, 14)
    assert tensor_power(np.eye(2) / 2, 3, cap=8).shape == (8, 8)


@settings(max_examples=30, deadline=None)
@given(seed=seeds, dim=st.integers(1, 6), rank=st.integers(1, 6))
def test_sqrtm_squares_back(seed, dim, rank):
    rho = random_density_matrix(dim, np.random.default_rng(seed), rank=min(rank, dim))
    root = sqrtm_psd(rho)
    np.testing.assert_allclose(root @ root, rho, atol=1e-12)
    assert np.linalg.eigvalsh(root)[0] >= -1e-12


def test_as_density_rejects_bad_trace():
    with pytest.raises(ValueError):
        as_density(np.eye(2))


def test_random_unitary_is_unitary():
    u = random_unitary(5, np.random.default_rng(7))
    np.testing.assert_allclose(u.conj().T @ u, np.eye(5), atol=1e-13)
