"""Tests for perturbation factors and the all-nonreal constructions."""
import math

import numpy as np
import pytest

from nearly_hermitian.errors import ConfigurationError, PreconditionError
from nearly_hermitian.linalg_core import eig_general
from nearly_hermitian.models import (
    CornerEntryPerturbation,
    DiagonalPerturbation,
    LowRankPerturbation,
    RankOnePerturbation,
)
from nearly_hermitian.perturbations import (
    apply,
    bordered_determinant_gap,
    build,
    construct_nonreal_vector,
    eigenvalues,
    factors,
    imaginary_diagonal_entry,
    norms,
    rank,
    toeplitz_example,
)


def test_diagonal_perturbation_factors():
    spec = DiagonalPerturbation(values=[2.0, 0.0, [0.0, 1.0]])
    a, b = factors(spec, 4)
    assert a.shape == (4, 2)
    assert b.shape == (2, 4)
    np.testing.assert_allclose(build(spec, 4), np.diag([2.0, 0.0, 1j, 0.0]))
    assert rank(spec, 4) == 2
    np.testing.assert_allclose(sorted(eigenvalues(spec, 4), key=lambda z: z.imag), [2.0, 1j])


def test_zero_perturbation():
    spec = DiagonalPerturbation(values=[])
    assert rank(spec, 3) == 0
    assert eigenvalues(spec, 3).size == 0
    assert norms(spec, 3) == (0.0, 0.0)
    m = np.eye(3)
    np.testing.assert_array_equal(apply(m, spec), m)


def test_too_many_diagonal_values():
    with pytest.raises(ConfigurationError):
        factors(DiagonalPerturbation(values=[1.0, 2.0, 3.0]), 2)


def test_rank_one_perturbation():
    u = [1.0, 0.0, 0.0]
    v = [0.0, [0.0, 1.0], 0.0]
    spec = RankOnePerturbation(theta=2.0, u=u, v=v)
    expected = 2.0 * np.outer(np.array(u, dtype=complex), np.array([0.0, 1j, 0.0]).conj())
    np.testing.assert_allclose(build(spec, 3), expected)
    with pytest.raises(ConfigurationError):
        factors(spec, 4)


def test_low_rank_factors_shape_check():
    spec = LowRankPerturbation(A=[[1.0], [0.0]], B=[[0.0, 1.0]])
    np.testing.assert_allclose(build(spec, 2), [[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(ConfigurationError):
        factors(spec, 3)


def test_corner_entry_counts_from_the_end():
    spec = CornerEntryPerturbation(position=(-1, -1), value=[0.0, 1.0])
    p = build(spec, 3)
    assert p[2, 2] == 1j
    assert np.count_nonzero(p) == 1
    assert imaginary_diagonal_entry(spec, 3) == (2, 1.0)
    with pytest.raises(ConfigurationError):
        factors(CornerEntryPerturbation(position=(3, 0), value=1.0), 3)


def test_imaginary_diagonal_entry_rejects_other_shapes():
    with pytest.raises(ConfigurationError):
        imaginary_diagonal_entry(CornerEntryPerturbation(position=(0, 0), value=2.0), 3)
    with pytest.raises(ConfigurationError):
        imaginary_diagonal_entry(CornerEntryPerturbation(position=(0, 1), value=1j), 3)


def test_multiplicative_apply(rng):
    m = rng.standard_normal((5, 5))
    spec = DiagonalPerturbation(values=[1.5, [0.0, 2.0]], mode="multiplicative")
    np.testing.assert_allclose(apply(m, spec), m @ (np.eye(5) + build(spec, 5)))
    additive = spec.model_copy(update={"mode": "additive"})
    np.testing.assert_allclose(apply(m, additive), m + build(spec, 5))


def test_norms_from_thin_factors():
    spectral, frobenius = norms(DiagonalPerturbation(values=[3.0, [0.0, 4.0]]), 6)
    assert math.isclose(spectral, 4.0)
    assert math.isclose(frobenius, 5.0)


def test_construct_nonreal_vector_on_diagonal_matrix():
    m = np.diag([1.0, 2.0, 3.0])
    u, v = construct_nonreal_vector(m, 2)
    values = eig_general(m + 1j * np.outer(u, v.conj())).eigenvalues
    nonreal = values[np.abs(values.imag) > 1e-9]
    real = values[np.abs(values.imag) <= 1e-9]
    assert nonreal.size == 2
    assert np.all(nonreal.imag > 0)
    np.testing.assert_allclose(real.real, [1.0], atol=1e-12)


def test_construct_nonreal_vector_negative_weights_flip_the_half_plane(rng):
    g = rng.standard_normal((6, 6))
    m = (g + g.T) / 2.0
    u, v = construct_nonreal_vector(m, 3, z=[1.0, 2.0, 1j], a=[-1.0, -0.5, -2.0])
    values = eig_general(m + 1j * np.outer(u, v.conj())).eigenvalues
    assert np.count_nonzero(values.imag < -1e-9) == 3
    assert np.count_nonzero(values.imag > 1e-9) == 0


def test_construct_nonreal_vector_preconditions():
    m = np.diag([1.0, 1.0, 2.0])
    with pytest.raises(PreconditionError):
        construct_nonreal_vector(m, 2, indices=[1, 2])
    with pytest.raises(PreconditionError):
        construct_nonreal_vector(np.diag([1.0, 2.0, 3.0]), 2, z=[1.0, 0.0])
    with pytest.raises(PreconditionError):
        construct_nonreal_vector(np.diag([1.0, 2.0, 3.0]), 2, a=[1.0, -1.0])
    with pytest.raises(PreconditionError):
        construct_nonreal_vector(np.diag([1.0, 2.0, 3.0]), 4)


def test_bordered_determinant_identity(rng):
    g = rng.standard_normal((7, 7))
    m = (g + g.T) / 2.0
    lhs, rhs = bordered_determinant_gap(m, 0.7, 0.3 + 0.5j)
    assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), 1.0)


@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_toeplitz_example_has_no_real_eigenvalue(n):
    t, corner = toeplitz_example(n)
    np.testing.assert_array_equal(t, t.T)
    values = eig_general(apply(t, corner)).eigenvalues
    assert np.min(np.abs(values.imag)) > 1e-9


def test_toeplitz_example_needs_two_rows():
    with pytest.raises(ConfigurationError):
        toeplitz_example(1)
