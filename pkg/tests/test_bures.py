import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from buresmetric.bures import (
    bures_distance,
    bures_distance_commuting,
    commuting_distance_grid,
    commuting_root_fidelity,
    ensemble_distance_fn,
    fidelity,
    hs_on_roots_metric,
    metric_at,
    metric_from_distance,
)
from buresmetric.ensemble import EnsembleSpec, full_spectrum, reference_distance, reference_g_bb
from buresmetric.errors import AccuracyError, BoundaryError, DomainError, NotHermitianError, ShapeError
from buresmetric.families import COMPLEX_QUBIT, REAL_QUBIT, product_family
from buresmetric.linalg import random_density_matrix, random_unitary

seeds = st.integers(min_value=0, max_value=2**32 - 1)
E = EnsembleSpec

# Frozen from a 40-digit mpmath evaluation of sum_q m_q (sqrt(l1) - sqrt(l2))^2
# with the Gamma-function eigenvalues written out independently.
ORACLE_DISTANCES = [
    (2, 1.0, 3.0, 0.098743620978580589998),
    (3, 1.0, 2.0, 0.10025300109888798314),
    (4, 1.0, 2.0, 0.12663346524157486401),
    (100, 1.0, 2.0, 0.34188727525669021764),
    (100, 0.5, 5.0, 0.95108089375586546905),
    (100, 1.0, 1.001, 0.00048595688945262411078),
    (1000, 1.0, 2.0, 0.36704018098633745821),
]

# Same oracle, g_bb = (1/2) d^2/dt^2 of the squared distance by mpmath.diff.
ORACLE_G_BB = [(10, 2.0, 0.023184899142587287775), (100, 1.0, 0.23636178120264304499), (100, 5.0, 0.01065891623281955159)]


def test_metric_at_real_qubit():
    g = metric_at(REAL_QUBIT, [0.5, 1.0])
    np.testing.assert_allclose(g, [[1 / 3, 0], [0, 1 / 16]], atol=1e-14)


def test_metric_at_center_of_complex_ball():
    g = metric_at(COMPLEX_QUBIT, [0.0, 1.0, 1.0])
    np.testing.assert_allclose(g, np.diag([0.25, 0.0, 0.0]), atol=1e-14)


def test_metric_at_boundary():
    with pytest.raises(BoundaryError):
        metric_at(REAL_QUBIT, [1.0, 0.3])


@settings(max_examples=20, deadline=None)
@given(r=st.floats(0.05, 0.95), th=st.floats(0.1, 3.0), ph=st.floats(0, 6.28), n=st.integers(1, 3))
def test_metric_is_additive_over_tensor_factors(r, th, ph, n):
    single = metric_at(COMPLEX_QUBIT, [r, th, ph])
    np.testing.assert_allclose(metric_at(product_family(COMPLEX_QUBIT, n), [r, th, ph]), n * single, rtol=1e-9, atol=1e-12)


def test_bures_distance_examples():
    pure0 = np.diag([1.0, 0.0])
    pure1 = np.diag([0.0, 1.0])
    mixed = np.eye(2) / 2
    assert bures_distance(pure0, pure0) == pytest.approx(0.0, abs=1e-7)
    assert bures_distance(pure0, pure1) == pytest.approx(math.sqrt(2), abs=1e-12)
    assert bures_distance(pure0, mixed) == pytest.approx(math.sqrt(2 - math.sqrt(2)), abs=1e-12)


def test_bures_distance_errors():
    with pytest.raises(ShapeError):
        bures_distance(np.eye(2) / 2, np.eye(3) / 3)
    with pytest.raises(NotHermitianError):
        bures_distance(np.array([[0.5, 0.1], [0.0, 0.5]]), np.eye(2) / 2)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, dim=st.integers(2, 6))
def test_distance_properties(seed, dim):
    rng = np.random.default_rng(seed)
    a, b, c = (random_density_matrix(dim, rng) for _ in range(3))
    u = random_unitary(dim, rng)
    dab = bures_distance(a, b)
    assert 0.0 <= dab <= math.sqrt(2)
    assert dab == pytest.approx(bures_distance(b, a), abs=1e-10)
    assert bures_distance(u @ a @ u.conj().T, u @ b @ u.conj().T) == pytest.approx(dab, abs=1e-9)
    assert bures_distance(a, c) <= dab + bures_distance(b, c) + 1e-9
    assert 0.0 <= fidelity(a, b) <= 1.0 + 1e-12


@pytest.mark.parametrize("n, b1, b2, expected", ORACLE_DISTANCES)
def test_commuting_distance_oracle(n, b1, b2, expected):
    assert bures_distance_commuting(E(n, b1), E(n, b2)) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_commuting_matches_dense(n):
    for b1, b2 in [(0.3, 4.0), (1.0, 1.2), (2.0, 7.0)]:
        dense = bures_distance(np.diag(full_spectrum(E(n, b1))), np.diag(full_spectrum(E(n, b2))))
        assert bures_distance_commuting(E(n, b1), E(n, b2)) == pytest.approx(dense, abs=1e-8)


def test_commuting_closed_forms():
    for b1, b2 in [(0.5, 4.0), (1.0, 3.0), (2.0, 2.5)]:
        for n in (2, 3):
            assert bures_distance_commuting(E(n, b1), E(n, b2)) == pytest.approx(reference_distance(n, b1, b2), abs=1e-10)


def test_commuting_distance_zero_on_diagonal_and_symmetric():
    assert bures_distance_commuting(E(100, 1.0), E(100, 1.0)) == 0.0
    b = np.linspace(0.05, 5, 30)
    d = commuting_distance_grid(100, b[:, None], b[None, :])
    assert np.all(np.diag(d) == 0.0)
    assert np.array_equal(d, d.T)
    assert np.all((d >= 0) & (d <= math.sqrt(2)))


def test_commuting_root_fidelity_consistent():
    s1, s2 = E(50, 0.8), E(50, 3.0)
    f = commuting_root_fidelity(s1, s2)
    assert math.sqrt(2 - 2 * f) == pytest.approx(bures_distance_commuting(s1, s2), rel=1e-10)


def test_commuting_size_mismatch():
    with pytest.raises(ShapeError):
        bures_distance_commuting(E(3, 1.0), E(4, 1.0))


@pytest.mark.parametrize("n", range(2, 8))
@pytest.mark.parametrize("beta", [0.5, 1.0, 2.0, 5.0])
def test_two_metric_routes_match_closed_form(n, beta):
    ref = reference_g_bb(n, beta)
    assert hs_on_roots_metric(E(n, beta)) == pytest.approx(ref, rel=1e-7)
    assert metric_from_distance(ensemble_distance_fn(n), beta) == pytest.approx(ref, rel=1e-7)


@pytest.mark.parametrize("n, beta, expected", ORACLE_G_BB)
def test_metric_routes_beyond_closed_forms(n, beta, expected):
    assert hs_on_roots_metric(E(n, beta)) == pytest.approx(expected, rel=1e-9)
    assert metric_from_distance(ensemble_distance_fn(n), beta) == pytest.approx(expected, rel=1e-9)


def test_metric_from_distance_errors():
    with pytest.raises(DomainError):
        metric_from_distance(ensemble_distance_fn(2), 1e-4)
    with pytest.raises(AccuracyError):
        metric_from_distance(lambda a, b: 0.0, 1.0)
    with pytest.raises(AccuracyError):
        # a distance with a kink at the diagonal has no second derivative
        metric_from_distance(lambda a, b: abs(b - a) ** 0.5, 1.0)
