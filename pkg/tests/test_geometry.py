import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from buresmetric.ensemble import reference_length
from buresmetric.errors import BoundaryError, DomainError, IntegrabilityError, PreconditionError
from buresmetric.families import COMPLEX_QUBIT, REAL_QUBIT, product_family
from buresmetric.geometry import (
    BALL,
    DISK,
    HALF_LINE,
    MetricField,
    complex_qubit_field,
    cumulative_lengths,
    ensemble_field,
    family_field,
    flat_polar_field,
    flat_spherical_field,
    gaussian_curvature_2d,
    integrate_volume,
    integrated_length,
    length_distance_excess,
    length_normalizer,
    normalize_prior,
    real_qubit_field,
    scalar_curvature,
    scalar_curvature_diag3,
    volume_element,
)

# Frozen from mpmath.quad of sqrt(g_bb) over [0, inf) at 30 digits.
ORACLE_NORMALIZERS = {
    2: 0.523598775598298870195469538156,
    3: 0.785398163397448305540409739396,
    4: 0.98740506907828513362437678958,
    5: 1.15329606355947874361528234476,
    6: 1.29427790384913740371749581129,
    7: 1.41687529171886573193273774243,
}


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_gaussian_curvature_closed_form_field(n):
    for point in [(0.2, 0.4), (0.6, 2.0), (0.9, 5.5)]:
        assert gaussian_curvature_2d(real_qubit_field(n), point) == pytest.approx(4 / n, abs=1e-6)


def test_gaussian_curvature_numerical_field():
    assert gaussian_curvature_2d(family_field(product_family(REAL_QUBIT, 3)), (0.5, 1.0)) == pytest.approx(4 / 3, abs=1e-5)


def test_flat_fields_have_no_curvature():
    assert gaussian_curvature_2d(flat_polar_field(), (1.3, 0.7)) == pytest.approx(0.0, abs=1e-6)
    assert scalar_curvature_diag3(flat_spherical_field(), (1.3, 0.7, 2.0)) == pytest.approx(0.0, abs=1e-5)


def test_scalar_curvature_is_minus_twice_gaussian():
    f = real_qubit_field(2)
    p = (0.4, 1.1)
    assert scalar_curvature(f, p) == pytest.approx(-2 * gaussian_curvature_2d(f, p), rel=1e-6)


def test_round_sphere_in_the_sign_convention():
    # 2-sphere of radius a: K = 1/a^2, so R = -2/a^2
    a = 1.7
    f = MetricField(2, lambda p: np.diag([a * a, (a * np.sin(p[0])) ** 2]), "sphere", ((0.1, 3.0), None))
    assert gaussian_curvature_2d(f, (0.8, 0.2)) == pytest.approx(1 / a**2, abs=1e-6)
    assert scalar_curvature(f, (0.8, 0.2)) == pytest.approx(-2 / a**2, abs=1e-6)


@settings(max_examples=10, deadline=None)
@given(r=st.floats(0.1, 0.9), th=st.floats(0.2, 2.9), ph=st.floats(0, 6.2))
def test_complex_scalar_curvature_constant(r, th, ph):
    assert scalar_curvature_diag3(complex_qubit_field(), (r, th, ph)) == pytest.approx(-24, abs=1e-4)
    assert scalar_curvature_diag3(complex_qubit_field(2), (r, th, ph)) == pytest.approx(-12, abs=1e-4)


def test_complex_scalar_curvature_numerical_field():
    f = family_field(COMPLEX_QUBIT, diagonal=True)
    assert scalar_curvature_diag3(f, (0.5, 1.0, 2.0)) == pytest.approx(-24, abs=1e-4)


def test_curvature_preconditions():
    with pytest.raises(BoundaryError):
        gaussian_curvature_2d(real_qubit_field(), (0.999, 1.0))
    with pytest.raises(PreconditionError):
        gaussian_curvature_2d(complex_qubit_field(), (0.5, 1.0, 1.0))
    skew = MetricField(2, lambda p: np.array([[1.0, 0.3], [0.3, 1.0]]), "skew")
    with pytest.raises(PreconditionError):
        gaussian_curvature_2d(skew, (0.5, 0.5))


def test_volume_elements():
    assert volume_element(real_qubit_field(), (0.6, 0.0)) == pytest.approx(0.6 / (4 * 0.8), rel=1e-14)
    assert volume_element(complex_qubit_field(), (0.6, 0.5, 0.0)) == pytest.approx(
        0.36 * math.sin(0.5) / (8 * 0.8), rel=1e-14
    )
    assert volume_element(ensemble_field(2), (1.0,)) == pytest.approx(0.1, rel=1e-14)


def test_volumes():
    assert integrate_volume(real_qubit_field(), DISK) == pytest.approx(math.pi / 2, rel=1e-12)
    assert integrate_volume(complex_qubit_field(), BALL) == pytest.approx(math.pi**2 / 8, rel=1e-12)
    assert integrate_volume(real_qubit_field(3), DISK) == pytest.approx(3 * math.pi / 2, rel=1e-12)
    with pytest.raises(DomainError):
        integrate_volume(real_qubit_field(), BALL)


@settings(max_examples=25, deadline=None)
@given(r=st.floats(0.01, 0.99), th=st.floats(0.01, 3.1), ph=st.floats(0, 6.28))
def test_prior_closed_forms(r, th, ph):
    disk = normalize_prior(real_qubit_field(), DISK)
    ball = normalize_prior(complex_qubit_field(), BALL)
    assert disk((r, th)) == pytest.approx(r / (2 * math.pi * math.sqrt(1 - r * r)), rel=1e-10)
    assert ball((r, th, ph)) == pytest.approx(r * r * math.sin(th) / (math.pi**2 * math.sqrt(1 - r * r)), rel=1e-10)


def test_ensemble_prior_is_normalized_length():
    prior = normalize_prior(ensemble_field(3), HALF_LINE)
    assert prior.normalization == pytest.approx(math.pi / 4, rel=1e-10)
    assert prior((1.0,)) == pytest.approx(0.15 / (math.pi / 4), rel=1e-10)


@pytest.mark.parametrize("n", range(2, 8))
def test_length_normalizers(n):
    assert length_normalizer(n) == pytest.approx(ORACLE_NORMALIZERS[n], rel=1e-10)


def test_length_normalizer_domain():
    with pytest.raises(DomainError):
        length_normalizer(8)


def test_integrated_length_refuses_unreliable_quadrature():
    # the 1/beta tail over twelve decades is beyond the requested tolerance
    with pytest.raises(IntegrabilityError):
        integrated_length(2, 0.2, 1e12)


@pytest.mark.parametrize("n", [2, 3])
def test_integrated_length_arctan_forms(n):
    for b1, b2 in [(0.1, 0.2), (0.5, 3.0), (2.0, 40.0)]:
        assert integrated_length(n, b1, b2) == pytest.approx(reference_length(n, b1, b2), abs=1e-10)


def test_cumulative_lengths_match_direct_integration():
    betas = np.array([3.0, 0.2, 1.0, 1.0, 4.5])
    cum = cumulative_lengths(2, betas)
    # the missing [0, 1e-16] piece is about 4e-9
    np.testing.assert_allclose(cum, [integrated_length(2, 1e-16, b) for b in betas], atol=1e-8)
    np.testing.assert_allclose(cum, [reference_length(2, 1e-300, b) for b in betas], atol=1e-12)
    np.testing.assert_allclose(cum, cumulative_lengths(2, betas, workers=3), rtol=0, atol=0)


@pytest.mark.parametrize("n", [2, 3, 12])
def test_length_exceeds_distance(n):
    for b1, b2 in [(0.1, 0.2), (0.3, 5.0), (1.0, 1.0001)]:
        assert length_distance_excess(n, b1, b2) >= -1e-9
