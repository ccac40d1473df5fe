"""Tests for limiting laws, Stieltjes transforms and outlier predictions."""
import math

import numpy as np
import pytest
from scipy import integrate

from nearly_hermitian.errors import ConfigurationError, DomainError
from nearly_hermitian.laws import (
    Region,
    delta_prime,
    ellipse_segment_distance,
    integrate_mp,
    integrate_semicircle,
    m_mp,
    m_sc,
    mp_cdf,
    mp_density,
    mp_outlier_equation,
    mp_point_mass,
    mp_support,
    outlier_mp,
    outlier_wigner,
    overlap_mp,
    overlap_wigner,
    region_contains,
    segment_distance,
    semicircle_cdf,
    semicircle_density,
)


def test_segment_distance():
    assert math.isclose(segment_distance(3 + 4j, -2.0, 2.0), math.sqrt(17.0))
    assert segment_distance(0.5 + 0j, -2.0, 2.0) == 0.0
    np.testing.assert_allclose(segment_distance(np.array([-3.0, 1j]), -2.0, 2.0), [1.0, 1.0])


def test_semicircle_density_and_cdf():
    assert math.isclose(semicircle_density(0.0), 1.0 / math.pi)
    assert semicircle_density(2.5) == 0.0
    assert semicircle_cdf(-3.0) == 0.0
    assert math.isclose(semicircle_cdf(0.0), 0.5)
    assert semicircle_cdf(2.0) == 1.0
    total, _ = integrate.quad(semicircle_density, -2.0, 2.0)
    assert math.isclose(total, 1.0, rel_tol=1e-8)
    partial_mass, _ = integrate.quad(semicircle_density, -2.0, 0.7)
    assert math.isclose(semicircle_cdf(0.7), partial_mass, rel_tol=1e-8)


def test_mp_support_and_point_mass():
    assert mp_support(1.0) == (0.0, 4.0)
    lo, hi = mp_support(0.25)
    assert math.isclose(lo, 0.5)
    assert math.isclose(hi, 4.5)
    assert mp_point_mass(0.25) == 0.75
    assert mp_point_mass(2.0) == 0.0
    with pytest.raises(DomainError):
        mp_support(0.0)


def test_mp_cdf_matches_density():
    assert math.isclose(mp_cdf(2.0), (math.pi / 2.0 + 1.0) / math.pi)
    mass, _ = integrate.quad(mp_density, 0.0, 3.0, limit=200)
    assert math.isclose(mp_cdf(3.0), mass, rel_tol=1e-7)
    assert mp_cdf(-1.0) == 0.0
    assert mp_cdf(5.0) == 1.0


@pytest.mark.parametrize("y", [0.25, 0.5, 2.0])
def test_mp_cdf_general_ratio(y):
    lo, hi = mp_support(y)
    assert math.isclose(mp_cdf(lo, y), mp_point_mass(y), abs_tol=1e-12)
    assert math.isclose(mp_cdf(hi, y), 1.0, rel_tol=1e-8)
    middle = (lo + hi) / 2.0
    body, _ = integrate.quad(lambda x: mp_density(x, y), lo, middle)
    assert math.isclose(mp_cdf(middle, y), mp_point_mass(y) + body, rel_tol=1e-7)


def test_mp_cdf_vectorized():
    values = mp_cdf(np.array([0.5, 1.0, 2.0]))
    assert values.shape == (3,)
    assert np.all(np.diff(values) > 0)


def test_quadrature_against_the_laws():
    assert abs(integrate_semicircle(lambda x: 1.0) - 1.0) < 1e-10
    assert abs(integrate_semicircle(lambda x: x * x) - 1.0) < 1e-10
    assert abs(integrate_mp(lambda x: 1.0) - 1.0) < 1e-10
    assert abs(integrate_mp(lambda x: x) - 1.0) < 1e-10


def test_m_sc_reference_values():
    assert np.isclose(m_sc(2.5), -0.5)
    assert np.isclose(m_sc(1j), 1j * (math.sqrt(5.0) - 1.0) / 2.0)
    assert np.isclose(m_sc(-2.5), 0.5)


@pytest.mark.parametrize("z", [3.0, -4.0 + 0.1j, 0.5 + 1j, 1e-3 + 2.5j])
def test_m_sc_solves_its_equation_and_matches_quadrature(z):
    m = m_sc(z)
    assert abs(m * m + z * m + 1.0) < 1e-12
    assert abs(m) <= 1.0
    assert abs(m - integrate_semicircle(lambda x: 1.0 / (x - z))) < 1e-8


def test_m_sc_rejects_the_cut():
    with pytest.raises(DomainError):
        m_sc(0.5)
    with pytest.raises(DomainError):
        m_sc(np.array([3.0, -2.0]))


def test_m_mp_reference_values():
    assert np.isclose(m_mp(6.25), -0.2)
    assert np.isclose(m_mp(-1.0), (math.sqrt(5.0) - 1.0) / 2.0)
    with pytest.raises(DomainError):
        m_mp(2.0)


@pytest.mark.parametrize("z", [6.25, 2 + 1j, -1.0, 5.0 - 0.5j])
def test_m_mp_matches_quadrature(z):
    m = m_mp(z)
    assert abs(z * m * m + z * m + 1.0) < 1e-12
    assert abs(m - integrate_mp(lambda x: 1.0 / (x - z))) < 1e-8


def off_cut_points(count, seed=11):
    rng = np.random.default_rng(seed)
    x = rng.uniform(-6.0, 6.0, count)
    y = rng.choice([-1.0, 1.0], count) * rng.uniform(0.05, 4.0, count)
    return x + 1j * y


def test_stieltjes_transforms_on_a_random_grid():
    z = off_cut_points(1000)
    m = m_sc(z)
    assert np.max(np.abs(m * m + z * m + 1.0)) <= 1e-12
    assert np.max(np.abs(m)) <= 1.0
    assert np.all(m.imag[z.imag > 0] > 0)
    w = m_mp(z)
    assert np.max(np.abs(z * w * w + z * w + 1.0)) <= 1e-12
    assert np.max(np.abs(1.0 + z * w)) <= 1.0
    np.testing.assert_allclose(m_sc(-z[:20]), -m_sc(z[:20]), rtol=1e-14, atol=0.0)


@pytest.mark.parametrize("lam", [2.0, -1.5, 1 + 1j, 1.5j])
def test_mp_outlier_equation_vanishes_at_prediction(lam):
    z = outlier_mp(lam).value
    assert abs(mp_outlier_equation(z, lam)) < 1e-12


def test_outlier_predictions():
    assert outlier_wigner(0.5) is None
    assert outlier_wigner(1.0) is None
    assert np.isclose(outlier_wigner(2.0).value, 2.5)
    assert np.isclose(outlier_wigner(1.5j).value, 1.5j - 1j / 1.5)
    for lam in (2.0, -3.0, 1 + 1j):
        assert np.isclose(outlier_mp(lam).value, 2.0 + outlier_wigner(lam).value)
    assert outlier_mp(-0.9) is None
    prediction = outlier_wigner(2.0)
    assert prediction.source == "wigner_additive"
    assert prediction.inputs == (2.0,)


def test_overlap_predictions():
    assert math.isclose(overlap_wigner(2.0).value, 0.75, rel_tol=1e-8)
    assert math.isclose(overlap_wigner(3.0).value, 8.0 / 9.0, rel_tol=1e-8)
    value = overlap_mp(2.0).value
    assert math.isclose(value, 0.25, rel_tol=1e-6)
    assert overlap_mp(4.0).value > value
    with pytest.raises(DomainError):
        overlap_wigner(0.5)
    with pytest.raises(DomainError):
        overlap_mp(1.0)


def midpoint_sum(f, a, b, points=10 ** 6):
    h = (b - a) / points
    x = a + h * (np.arange(points) + 0.5)
    return np.sum(f(x)) * h


def riemann_overlap_wigner(theta):
    shifted = theta + 1.0 / theta
    numerator = abs(midpoint_sum(lambda x: semicircle_density(x) / (x - shifted), -2.0, 2.0)) ** 2
    denominator = midpoint_sum(lambda x: semicircle_density(x) / np.abs(x - shifted) ** 2, -2.0, 2.0)
    return numerator / denominator


def riemann_overlap_mp(theta):
    hat = theta * (1.0 + 1.0 / theta) ** 2
    weighted = lambda x: np.sqrt(x * (4.0 - x)) / (2.0 * math.pi)  # x times the y = 1 density
    numerator = abs(midpoint_sum(lambda x: weighted(x) / (x - hat), 0.0, 4.0)) ** 2
    denominator = midpoint_sum(lambda x: x * weighted(x) / np.abs(x - hat) ** 2, 0.0, 4.0)
    return numerator / denominator


def test_overlap_wigner_closed_form_and_riemann_sum():
    assert math.isclose(overlap_wigner(10.0).value, 0.99, rel_tol=1e-8)
    value = overlap_wigner(2j).value
    assert abs(value - riemann_overlap_wigner(2j)) <= 1e-6
    assert abs(abs(m_sc(1.5j)) ** 2 - abs(integrate_semicircle(lambda x: 1.0 / (x - 1.5j))) ** 2) < 1e-8


def test_overlap_mp_against_riemann_sums():
    rng = np.random.default_rng(5)
    radii = rng.uniform(1.5, 4.0, 10)
    angles = rng.uniform(0.0, 2.0 * math.pi, 10)
    for theta in radii * np.exp(1j * angles):
        value = overlap_mp(theta).value
        assert 0.0 < value <= 1.0
        assert abs(value - riemann_overlap_mp(theta)) <= 1e-6


def test_overlap_mp_numerator_identity():
    hat = 4.5
    assert math.isclose(2.0 * (1.0 + 0.5) ** 2, hat)
    numerator = integrate_mp(lambda x: x / (x - hat))
    assert abs(numerator - (1.0 + hat * m_mp(hat))) <= 1e-8


def test_delta_prime_is_inside_the_ellipse_gap():
    assert math.isclose(delta_prime(0.5), 0.25 / 3.0)
    for delta in (0.05, 0.2, 0.5, 1.0):
        assert delta_prime(delta) < ellipse_segment_distance(1.0 + delta)
    with pytest.raises(ConfigurationError):
        delta_prime(0.0)


def test_regions():
    assert region_contains(Region.semicircle_nbhd(0.1), 2.05)
    assert not region_contains(Region.semicircle_nbhd(0.1), 2.2)
    assert region_contains(Region.mp_nbhd(0.1), -0.05 + 0.05j)
    assert region_contains(Region.ellipse(2.0), 2.4)
    assert not region_contains(Region.ellipse(2.0), 2.6)
    assert region_contains(Region.half_plane(1), 1j)
    assert not region_contains(Region.half_plane(-1), 1j)
    assert region_contains(Region.disk(0.5), 0.3 + 0.3j)
    mask = region_contains(Region.disk(1.0), np.array([0.5, 2.0]))
    np.testing.assert_array_equal(mask, [True, False])
    with pytest.raises(ConfigurationError):
        Region.half_plane(0)
    with pytest.raises(ConfigurationError):
        Region.ellipse(1.0)
