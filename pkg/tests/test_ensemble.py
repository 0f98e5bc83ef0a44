import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from buresmetric.ensemble import (
    EnsembleSpec,
    averaged_matrix,
    eigen_branches,
    energy_from_radius,
    full_spectrum,
    gibbs_density,
    log_multiplicities,
    log_trace,
    multiplicity,
    partition_function,
    radial_weight,
    radius_from_energy,
    reference_g_bb,
    structure_function,
)
from buresmetric.errors import DomainError, SizeError

betas = st.floats(0.05, 30.0)

# Exact rationals from a 30-digit mpmath evaluation of the Gamma-function ratio.
EXACT_SPECTRA = [
    (2, 1.0, [3 / 10, 1 / 10]),
    (3, 0.5, [7 / 32, 1 / 32]),
    (4, 2.0, [5 / 42, 5 / 126, 1 / 42]),
]


@pytest.mark.parametrize("n, beta, expected", EXACT_SPECTRA)
def test_branch_eigenvalues(n, beta, expected):
    got = [b.eigenvalue for b in eigen_branches(EnsembleSpec(n, beta))]
    np.testing.assert_allclose(got, expected, rtol=1e-13)


@pytest.mark.parametrize("n, q, m", [(1, 0, 2), (2, 0, 3), (2, 1, 1), (3, 1, 4), (4, 1, 9), (4, 2, 2), (6, 3, 5)])
def test_multiplicity_examples(n, q, m):
    assert multiplicity(n, q) == m


@pytest.mark.parametrize("n", [1, 2, 5, 12, 40, 101])
def test_multiplicities_count_every_state(n):
    assert sum(multiplicity(n, q) for q in range(n // 2 + 1)) == 2**n


def test_spec_validation():
    with pytest.raises(DomainError):
        EnsembleSpec(0, 1.0)
    with pytest.raises(DomainError):
        EnsembleSpec(3, -1.0)
    with pytest.raises(DomainError):
        multiplicity(4, 3)
    assert EnsembleSpec(4, 1.0).u == 0.0


@settings(max_examples=40, deadline=None)
@given(beta=betas, n=st.integers(1, 200))
def test_trace_is_one(beta, n):
    assert abs(float(log_trace(n, beta))) < 1e-9


def test_log_multiplicities_switch_over():
    n = 600
    exact = np.array([math.log(multiplicity(n, q)) for q in range(n // 2 + 1)])
    np.testing.assert_allclose(log_multiplicities(n), exact, rtol=0, atol=1e-11)


def test_trace_is_one_far_out():
    assert abs(float(log_trace(10_000, 0.3))) < 1e-9


def test_full_spectrum():
    vals = full_spectrum(EnsembleSpec(3, 0.5))
    assert vals.size == 8
    assert vals.sum() == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(SizeError):
        full_spectrum(EnsembleSpec(30, 1.0))


def test_partition_function_values():
    assert partition_function(1.0) == pytest.approx(2 / 3, rel=1e-14)
    assert partition_function(0.5) == pytest.approx(math.pi / 2, rel=1e-14)


@pytest.mark.parametrize("beta", [0.3, 1.0, 4.0])
def test_partition_function_normalizes_gibbs(beta):
    # E in [0, inf) split at 1 to help the integrable sqrt(E) start
    total = sum(quad(lambda e: gibbs_density(e, beta), a, b)[0] for a, b in [(0, 1), (1, np.inf)])
    assert total == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("beta", [0.2, 1.0, 3.5])
def test_radial_weight_normalized(beta):
    val, _ = quad(lambda r: radial_weight(r, beta), 0, 1)
    assert val == pytest.approx(1.0, abs=1e-8)


@settings(max_examples=30, deadline=None)
@given(r=st.floats(0.01, 0.99), beta=st.floats(0.2, 5.0))
def test_energy_chart_jacobian(r, beta):
    # density in E, pushed to r, equals the radial weight
    e = energy_from_radius(r)
    de_dr = 2 * r / (1 - r * r)
    assert radius_from_energy(e) == pytest.approx(r, rel=1e-12)
    assert gibbs_density(e, beta) * de_dr == pytest.approx(radial_weight(r, beta), rel=1e-10)
    assert structure_function(e) == pytest.approx(r, rel=1e-12)


@pytest.mark.parametrize("n, beta, expected", EXACT_SPECTRA)
def test_averaged_matrix_spectrum(n, beta, expected):
    m = averaged_matrix(EnsembleSpec(n, beta))
    counts = [multiplicity(n, q) for q in range(n // 2 + 1)]
    want = np.sort(np.repeat(expected, counts))
    np.testing.assert_allclose(np.linalg.eigvalsh(m), want, atol=1e-10)


def test_averaged_matrices_commute():
    a = averaged_matrix(EnsembleSpec(3, 0.7))
    b = averaged_matrix(EnsembleSpec(3, 2.5))
    np.testing.assert_allclose(a @ b, b @ a, atol=1e-12)


def test_averaged_matrix_small_beta():
    m = averaged_matrix(EnsembleSpec(2, 0.2))
    assert np.trace(m).real == pytest.approx(1.0, abs=1e-9)


def test_averaged_matrix_limits():
    with pytest.raises(SizeError):
        averaged_matrix(EnsembleSpec(8, 1.0))
    with pytest.raises(DomainError):
        averaged_matrix(EnsembleSpec(2, 1e4))


def test_averaged_matrix_refines_a_coarse_start():
    # two nodes per axis cannot integrate a degree-5 polynomial; doubling must recover
    m = averaged_matrix(EnsembleSpec(5, 1.5), order=2)
    np.testing.assert_allclose(np.linalg.eigvalsh(m), full_spectrum(EnsembleSpec(5, 1.5)), atol=1e-12)


@pytest.mark.parametrize(
    "n, value",
    [(2, 1 / 100), (3, 9 / 400), (4, 1377 / 39200), (5, 923 / 19600), (6, 92333 / 1587600), (7, 216877 / 3175200)],
)
def test_reference_g_bb_at_one(n, value):
    assert reference_g_bb(n, 1.0) == pytest.approx(value, rel=1e-14)


def test_reference_g_bb_grows_with_n_and_decays_in_beta():
    b = np.linspace(0.05, 20, 400)
    vals = np.array([reference_g_bb(n, b) for n in range(2, 8)])
    assert np.all(np.diff(vals, axis=0) > 0)
    assert np.all(np.diff(vals, axis=1) < 0)
