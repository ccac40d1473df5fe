"""Tests for seeding, atom variables and ensemble sampling."""
import math

import numpy as np
import pytest
from pydantic import ValidationError

from nearly_hermitian.ensembles import (
    atom_moments,
    is_absolutely_continuous,
    is_degenerate,
    nondegeneracy_margin,
    sample_covariance,
    sample_atom,
    sample_matrix,
    sample_unit_sphere,
    sample_wigner,
    satisfies_c0,
    satisfies_c1,
    splitmix64,
    standard_normals,
    stream_seed,
    rng_for,
)
from nearly_hermitian.errors import ConfigurationError
from nearly_hermitian.models import (
    EnsembleSpec,
    GaussianAtom,
    RademacherAtom,
    SeedPlan,
    TwoPointAtom,
    UniformAtom,
)


def goe(n, normalization="one_over_sqrt_n"):
    return EnsembleSpec(family={"kind": "goe"}, n=n, normalization=normalization)


def covariance(m, n, normalization="raw", atom=None):
    family = {"kind": "sample_covariance", "m": m}
    if atom is not None:
        family["atom"] = atom
    return EnsembleSpec(family=family, n=n, normalization=normalization)


def test_splitmix64_reference_value():
    assert splitmix64(0) == 0xE220A8397B1DCDAF
    assert 0 <= splitmix64(2 ** 64 - 1) < 2 ** 64


def test_stream_seed_is_deterministic_and_separates_streams():
    plan = SeedPlan(master_seed=7, trial_index=3, stream=1)
    assert stream_seed(plan) == stream_seed(SeedPlan(master_seed=7, trial_index=3, stream=1))
    seeds = {
        stream_seed(SeedPlan(master_seed=7, trial_index=t, stream=s))
        for t in range(5)
        for s in range(4)
    }
    assert len(seeds) == 20


def test_standard_normals_moments_and_odd_length():
    rng = rng_for(SeedPlan(master_seed=1))
    x = standard_normals(rng, 20001)
    assert x.shape == (20001,)
    assert abs(x.mean()) < 0.05
    assert abs(x.var() - 1.0) < 0.05


def test_sample_wigner_is_symmetric_and_reproducible(seed_plan):
    spec = goe(30)
    w = sample_wigner(spec, seed_plan)
    assert w.shape == (30, 30)
    np.testing.assert_array_equal(w, w.T)
    np.testing.assert_array_equal(w, sample_wigner(spec, seed_plan))
    other = sample_wigner(spec, seed_plan.substream(1))
    assert not np.array_equal(w, other)


def test_goe_diagonal_has_variance_two(seed_plan):
    w = sample_wigner(goe(400, "raw"), seed_plan)
    diagonal = np.diag(w)
    off = w[np.triu_indices(400, k=1)]
    assert abs(diagonal.var() - 2.0) < 0.5
    assert abs(off.var() - 1.0) < 0.05


def test_goe_spectrum_fills_the_semicircle(seed_plan):
    values = np.linalg.eigvalsh(sample_matrix(goe(300), seed_plan))
    assert values.max() < 2.3
    assert values.min() > -2.3


def test_sample_covariance_is_psd_with_rank_min_m_n(seed_plan):
    s = sample_covariance(covariance(5, 10), seed_plan)
    np.testing.assert_array_equal(s, s.T)
    values = np.linalg.eigvalsh(s)
    scale = values.max()
    assert values.min() > -1e-10 * scale
    assert np.count_nonzero(values > 1e-8 * scale) == 5


def test_covariance_normalizations_scale_the_same_draw(seed_plan):
    raw = sample_covariance(covariance(8, 8), seed_plan)
    scaled = sample_covariance(covariance(8, 8, "one_over_n"), seed_plan)
    np.testing.assert_allclose(scaled, raw / 8.0)
    mixed = sample_covariance(covariance(2, 8, "one_over_sqrt_mn"), seed_plan)
    np.testing.assert_allclose(mixed, sample_covariance(covariance(2, 8), seed_plan) / 4.0)


def test_sqrt_mn_normalization_needs_a_covariance(seed_plan):
    with pytest.raises(ConfigurationError):
        sample_wigner(goe(5, "one_over_sqrt_mn"), seed_plan)


def test_covariance_dimension_mismatch_is_rejected():
    with pytest.raises(ValidationError):
        EnsembleSpec(family={"kind": "sample_covariance", "m": 3, "n": 4}, n=5)


def test_unit_sphere_vectors(seed_plan):
    real = sample_unit_sphere(50, "real", seed_plan)
    complex_ = sample_unit_sphere(50, "complex", seed_plan)
    assert abs(np.linalg.norm(real) - 1.0) <= 1e-14
    assert abs(np.linalg.norm(complex_) - 1.0) <= 1e-14
    assert np.iscomplexobj(complex_)
    with pytest.raises(ConfigurationError):
        sample_unit_sphere(5, "quaternion", seed_plan)


def test_atom_moments():
    assert atom_moments(RademacherAtom()) == (0.0, 1.0, 0.0)
    uniform = atom_moments(UniformAtom())
    assert uniform.mean == 0.0
    assert math.isclose(uniform.variance, 1.0)
    skewed = atom_moments(TwoPointAtom(p=0.25, lo=-3.0, hi=1.0))
    assert skewed.mean == 0.0
    assert math.isclose(skewed.variance, 3.0)
    assert skewed.third_central != 0.0


@pytest.mark.slow
@pytest.mark.parametrize("atom", [UniformAtom(), TwoPointAtom(p=0.25, lo=-3.0, hi=1.0)])
def test_sampled_atom_moments(atom, seed_plan):
    draws = sample_atom(atom, rng_for(seed_plan), 10 ** 6)
    expected = atom_moments(atom)
    assert abs(draws.mean() - expected.mean) <= 0.01
    assert math.isclose(draws.var(), expected.variance, rel_tol=0.01)
    third = np.mean((draws - draws.mean()) ** 3)
    assert abs(third - expected.third_central) <= 0.01 * max(1.0, abs(expected.third_central))


def test_moment_conditions():
    assert satisfies_c1(GaussianAtom())
    assert satisfies_c1(UniformAtom())
    assert not satisfies_c1(GaussianAtom(variance=2.0))
    assert not satisfies_c1(GaussianAtom(mean=1.0))
    assert satisfies_c0(GaussianAtom(), GaussianAtom(variance=2.0))
    assert satisfies_c0(RademacherAtom(), RademacherAtom())
    assert not satisfies_c0(TwoPointAtom(p=0.25, lo=-math.sqrt(3.0), hi=1.0 / math.sqrt(3.0)), GaussianAtom(variance=2.0))


def test_degeneracy_and_continuity():
    assert nondegeneracy_margin(RademacherAtom()) == 0.5
    assert is_degenerate(TwoPointAtom(p=1.0, lo=-1.0, hi=1.0))
    assert is_degenerate(TwoPointAtom(p=0.5, lo=2.0, hi=2.0))
    assert is_degenerate(GaussianAtom(variance=0.0))
    assert not is_degenerate(GaussianAtom())
    assert is_absolutely_continuous(UniformAtom())
    assert not is_absolutely_continuous(RademacherAtom())
    assert not is_absolutely_continuous(GaussianAtom(variance=0.0))


def test_zero_variance_offdiagonal_is_rejected(seed_plan):
    spec = EnsembleSpec(family={"kind": "wigner", "offdiag": {"kind": "gaussian", "variance": 0.0}}, n=4)
    with pytest.raises(ConfigurationError):
        sample_wigner(spec, seed_plan)
