"""Tests for the experiment runners on small, fast configurations."""
import math

import numpy as np
import pytest

from nearly_hermitian import bounds
from nearly_hermitian.errors import ConfigurationError, ExperimentError, PreconditionError
from nearly_hermitian.experiments import EXPERIMENTS, classify, critical, run_experiment
from nearly_hermitian.experiments.interlacing import (
    half_plane_of_roots,
    hermite_biehler_pair,
    hermite_biehler_side,
    interlacing_margin,
)
from nearly_hermitian.experiments.outliers import default_delta, predict_outliers
from nearly_hermitian.experiments.runner import TrialOutcome, aggregate_metrics, run_trials
from nearly_hermitian.models import TrialRecord

FIG3_DIAGONAL = [[0.0, 1.5], [1.0, 1.0], 2.0]


def test_every_experiment_name_has_a_runner():
    assert len(EXPERIMENTS) == 14
    assert all(callable(runner) for runner in EXPERIMENTS.values())


# Trial loop

def test_run_trials_sorts_records_and_aggregates(make_spec):
    spec = make_spec(experiment="interlacing", n=4, trials=6, params={"threshold": 0.5})

    def trial(spec, seed):
        return TrialOutcome(seed.trial_index % 2 == 0, {"index": seed.trial_index, "label": "x"})

    report = run_trials(spec, 1, trial, workers=3)
    assert [r.trial for r in report.per_trial] == list(range(6))
    assert report.pass_rate == 0.5
    assert report.passed
    assert report.aggregate.means == {"index": 2.5}
    assert report.aggregate.maxima == {"index": 5.0}


def test_aggregate_metrics_skips_missing_values():
    records = [
        TrialRecord(trial=0, seed=1, passed=True, metrics={"overlap": 0.5}),
        TrialRecord(trial=1, seed=2, passed=False, metrics={"overlap": None}),
    ]
    stats = aggregate_metrics(records)
    assert stats.pass_rate == 0.5
    assert stats.means == {"overlap": 0.5}


def test_reports_do_not_depend_on_worker_count(make_spec):
    spec = make_spec(
        experiment="nonreal_wigner",
        n=20,
        trials=4,
        perturbation={"kind": "corner_entry", "position": [-1, -1], "value": "1j"},
    )
    serial = run_experiment(spec, 99, workers=1)
    threaded = run_experiment(spec, 99, workers=4)
    assert serial.model_dump() == threaded.model_dump()
    assert [r.seed for r in serial.per_trial] == [r.seed for r in threaded.per_trial]


# Nonreal spectra

def test_nonreal_wigner_upper_half_plane(make_spec):
    spec = make_spec(
        experiment="nonreal_wigner",
        n=30,
        trials=3,
        perturbation={"kind": "corner_entry", "position": [-1, -1], "value": "1j"},
        params={"threshold": 1.0, "dump_eigenvalues": True, "dump_trials": 1},
    )
    report = run_experiment(spec, 5)
    assert report.passed
    assert all(r.metrics["n_wrong_side"] == 0 for r in report.per_trial)
    assert all(r.metrics["min_signed_im"] > 0 for r in report.per_trial)
    assert len(report.eigenvalue_dump) == 30
    assert {row.trial for row in report.eigenvalue_dump} == {0}


def test_nonreal_wigner_lower_half_plane_for_negative_gamma(make_spec):
    spec = make_spec(
        experiment="nonreal_wigner",
        n=15,
        trials=2,
        perturbation={"kind": "corner_entry", "position": [0, 0], "value": [0.0, -2.0]},
    )
    report = run_experiment(spec, 5)
    assert report.passed


def test_nonreal_wigner_rejects_degenerate_atom(make_spec):
    spec = make_spec(
        experiment="nonreal_wigner",
        ensemble={"family": {"kind": "wigner", "offdiag": {"kind": "two_point", "p": 1.0, "lo": 1.0, "hi": -1.0}}, "n": 5},
        perturbation={"kind": "corner_entry", "position": [0, 0], "value": "1j"},
    )
    with pytest.raises(ConfigurationError):
        run_experiment(spec, 5)


def test_nonreal_wigner_rejects_real_entry(make_spec):
    spec = make_spec(
        experiment="nonreal_wigner",
        n=5,
        perturbation={"kind": "corner_entry", "position": [0, 0], "value": 1.0},
    )
    with pytest.raises(ConfigurationError):
        run_experiment(spec, 5)


def test_nonreal_sampcov_counts(make_spec):
    spec = make_spec(
        experiment="nonreal_sampcov",
        ensemble={"family": {"kind": "sample_covariance", "m": 5}, "n": 10, "normalization": "raw"},
        perturbation={"kind": "corner_entry", "position": [0, 0], "value": "1j", "mode": "multiplicative"},
        trials=3,
        params={"threshold": 1.0},
    )
    report = run_experiment(spec, 11)
    assert report.passed
    for record in report.per_trial:
        assert record.metrics["n_zero"] == 5
        assert record.metrics["n_off_line"] == 5


def test_nonreal_sampcov_needs_continuous_atom(make_spec):
    spec = make_spec(
        experiment="nonreal_sampcov",
        ensemble={"family": {"kind": "sample_covariance", "m": 5, "atom": {"kind": "rademacher"}}, "n": 5, "normalization": "raw"},
        perturbation={"kind": "corner_entry", "position": [0, 0], "value": "1j", "mode": "multiplicative"},
    )
    with pytest.raises(ConfigurationError):
        run_experiment(spec, 11)


def test_nonreal_deterministic_on_explicit_matrix(make_spec):
    spec = make_spec(
        experiment="nonreal_deterministic",
        n=4,
        trials=1,
        params={
            "matrix": [[1, 0, 0, 0], [0, 2, 0, 0], [0, 0, 3, 0], [0, 0, 0, 4]],
            "k": 2,
            "toeplitz_n": 4,
            "threshold": 1.0,
        },
    )
    report = run_experiment(spec, 0)
    assert report.passed
    metrics = report.per_trial[0].metrics
    assert metrics["n_side"] == 2
    assert metrics["multiplicative_checked"] is True
    assert metrics["multiplicative_n_side"] == 2
    assert metrics["toeplitz_min_abs_im"] > 0


def test_nonreal_deterministic_on_sampled_matrices(make_spec):
    spec = make_spec(experiment="nonreal_deterministic", n=12, trials=3, params={"k": 3, "threshold": 1.0})
    assert run_experiment(spec, 8).passed


def test_nonreal_deterministic_repeated_eigenvalues(make_spec):
    spec = make_spec(
        experiment="nonreal_deterministic",
        n=3,
        trials=1,
        params={"matrix": [[2, 0, 0], [0, 2, 0], [0, 0, 1]], "k": 2},
    )
    with pytest.raises(PreconditionError):
        run_experiment(spec, 0)


# Interlacing

def test_interlacing_margin():
    assert interlacing_margin([3.0, 1.0, -1.0], [2.0, 0.0]) == 1.0
    assert interlacing_margin([3.0, 1.0], [1.0]) == 0.0
    assert interlacing_margin([1.0], []) == math.inf
    with pytest.raises(ValueError):
        interlacing_margin([1.0, 2.0], [1.0, 2.0])


def test_half_plane_of_roots():
    assert half_plane_of_roots([1 + 1j, -2 + 0.5j]) == 1
    assert half_plane_of_roots([1 - 1j]) == -1
    assert half_plane_of_roots([1 + 1j, 1 - 1j]) == 0


def test_hermite_biehler_criterion():
    assert hermite_biehler_side(np.array([-1.0, 1.0]), np.array([0.0])) != 0
    assert hermite_biehler_side(np.array([-1.0, 1.0]), np.array([2.0])) == 0
    rng = np.random.default_rng(3)
    for _ in range(10):
        assert hermite_biehler_side(*hermite_biehler_pair(rng, 6, True)) != 0
        assert hermite_biehler_side(*hermite_biehler_pair(rng, 6, False)) == 0


def test_run_interlacing(make_spec):
    report = run_experiment(make_spec(experiment="interlacing", n=10, trials=4, params={"threshold": 1.0}), 17)
    assert report.passed
    assert all(r.metrics["interlacing_margin"] > 0 for r in report.per_trial)
    assert all(r.metrics["bordered_side"] == 1 for r in report.per_trial)


# Outliers

def test_default_delta():
    assert default_delta(np.array([], dtype=complex)) == 0.5
    assert math.isclose(default_delta(np.array([1.5j, 1 + 1j, 2.0])), 0.9 * (math.sqrt(2.0) - 1.0))
    with pytest.raises(ConfigurationError):
        default_delta(np.array([1.0 + 0j]))


def test_predict_outliers_skips_small_eigenvalues():
    predictions = predict_outliers(np.array([0.5, 2.0, -3.0]), "wigner", 0.3)
    assert [p.value for p in predictions] == [2.5, -3.0 - 1.0 / 3.0]


def test_classify_keeps_small_values_in_the_covariance_bulk():
    values = np.array([0.0, 0.01j, 2.0, 4.01, 6.0 + 1j])
    wigner = classify(values, "wigner", 0.1)
    assert sorted(wigner.outliers.tolist(), key=abs) == [4.01, 6.0 + 1j]
    covariance = classify(values, "mp", 0.1)
    assert covariance.outliers.tolist() == [6.0 + 1j]
    assert covariance.bulk.size == 4


@pytest.mark.slow
def test_outliers_wigner(make_spec):
    spec = make_spec(
        experiment="outliers_wigner",
        n=400,
        trials=3,
        perturbation={"kind": "diagonal", "values": [3.0]},
        params={"delta": 0.9, "match_tolerance": 0.3, "threshold": 0.6, "dump_eigenvalues": True, "dump_trials": 1},
    )
    report = run_experiment(spec, 2024)
    assert report.passed
    assert report.predictions == [complex(3.0 + 1.0 / 3.0)]
    kinds = [row.kind for row in report.eigenvalue_dump]
    assert kinds.count("eigenvalue") == 400
    assert kinds.count("prediction") == 1


def test_outliers_wigner_rejects_delta_gap_violation(make_spec):
    spec = make_spec(
        experiment="outliers_wigner",
        n=10,
        perturbation={"kind": "diagonal", "values": [1.05]},
        params={"delta": 0.1},
    )
    with pytest.raises(ConfigurationError):
        run_experiment(spec, 1)


def test_outliers_mp_requires_multiplicative_mode(make_spec):
    spec = make_spec(experiment="outliers_mp", n=10, perturbation={"kind": "diagonal", "values": [2.0]})
    with pytest.raises(ConfigurationError):
        run_experiment(spec, 1)


@pytest.mark.slow
def test_outliers_mp(make_spec):
    spec = make_spec(
        experiment="outliers_mp",
        n=400,
        trials=3,
        perturbation={"kind": "diagonal", "values": [3.0], "mode": "multiplicative"},
        params={"delta": 0.9, "match_tolerance": 0.5, "threshold": 0.6},
    )
    report = run_experiment(spec, 2024)
    assert report.predictions == [complex(2.0 + 3.0 + 1.0 / 3.0)]
    assert report.passed


def test_bulk_im_bound(make_spec):
    spec = make_spec(
        experiment="bulk_im_bound",
        n=300,
        trials=2,
        perturbation={"kind": "diagonal", "values": FIG3_DIAGONAL},
        params={"epsilon": 0.5, "threshold": 0.5},
    )
    report = run_experiment(spec, 4)
    assert report.passed
    assert report.per_trial[0].metrics["im_bound"] == pytest.approx(300 ** -0.5)


@pytest.mark.slow
def test_bulk_im_at_small_epsilon_exceeds_the_bound(make_spec):
    # At n = 1000 the bulk sits near 0.02 off the axis: above n^-0.8, inside the n^-0.4 used by verify.
    spec = make_spec(
        experiment="bulk_im_bound",
        n=1000,
        trials=3,
        perturbation={"kind": "diagonal", "values": FIG3_DIAGONAL},
        params={"epsilon": 0.2, "threshold": 0.5},
    )
    report = run_experiment(spec, 42)
    observed = [trial.metrics["max_bulk_abs_im"] for trial in report.per_trial]
    assert report.per_trial[0].metrics["im_bound"] == pytest.approx(1000 ** -0.8)
    assert min(observed) > 1000 ** -0.8
    assert max(observed) < 1000 ** -0.4
    assert not report.passed


# Overlaps

@pytest.mark.slow
def test_overlap_wigner(make_spec):
    spec = make_spec(
        experiment="overlap_wigner",
        n=400,
        trials=4,
        params={"theta": 3.0, "delta": 0.9, "overlap_tolerance": 0.1, "location_tolerance": 0.3, "threshold": 0.5},
    )
    report = run_experiment(spec, 7)
    assert report.summary["predicted_overlap"] == pytest.approx(8.0 / 9.0)
    assert report.passed


def test_overlap_requires_spike_strength(make_spec):
    with pytest.raises(ConfigurationError):
        run_experiment(make_spec(experiment="overlap_wigner", n=10, params={"theta": 0.5}), 1)
    with pytest.raises(ConfigurationError):
        run_experiment(make_spec(experiment="overlap_wigner", n=10), 1)


def test_overlap_nonnormal_spike(make_spec):
    spec = make_spec(
        experiment="overlap_wigner",
        n=300,
        trials=2,
        params={
            "theta": 3.0,
            "delta": 0.9,
            "nonnormal": True,
            "field": "complex",
            "location_tolerance": 0.3,
            "threshold": 0.5,
        },
    )
    report = run_experiment(spec, 3)
    assert all(r.metrics["n_outliers"] == 1 for r in report.per_trial)


# Critical points, global and isotropic laws

def test_critical_points_dump(make_spec):
    spec = make_spec(
        experiment="critical_points",
        n=40,
        trials=1,
        perturbation={"kind": "diagonal", "values": FIG3_DIAGONAL},
        params={"threshold": 0.0, "dump_eigenvalues": True},
    )
    report = run_experiment(spec, 12)
    kinds = [row.kind for row in report.eigenvalue_dump]
    assert kinds.count("eigenvalue") == 40
    assert kinds.count("critical_point") == 39
    assert report.per_trial[0].metrics["gauss_lucas_ok"] is True


def test_critical_points_match_outliers_through_checked_assignment(make_spec, monkeypatch):
    calls = []

    def recording_match(points, targets):
        result = bounds.match_into(points, targets)
        calls.append(result)
        return result

    monkeypatch.setattr(critical, "match_into", recording_match)
    spec = make_spec(
        experiment="critical_points",
        n=60,
        trials=2,
        perturbation={"kind": "diagonal", "values": FIG3_DIAGONAL},
        params={"threshold": 0.0},
    )
    report = run_experiment(spec, 12)
    with_outliers = [r for r in report.per_trial if r.metrics["n_outliers"] > 0]
    assert len(calls) == len(with_outliers)
    for record, result in zip(with_outliers, calls):
        assert record.metrics["max_outlier_distance"] == pytest.approx(float(np.max(result.pair_costs)))


@pytest.mark.slow
def test_global_law_wigner(make_spec):
    spec = make_spec(
        experiment="global_law_wigner",
        n=400,
        trials=2,
        perturbation={"kind": "diagonal", "values": FIG3_DIAGONAL},
        params={"ks_threshold": 0.08},
    )
    report = run_experiment(spec, 21)
    assert report.passed
    assert report.per_trial[0].metrics["nonreal_mass_bound"] == pytest.approx(3 / 400 + 0.01)


@pytest.mark.slow
def test_global_law_mp(make_spec):
    spec = make_spec(
        experiment="global_law_mp",
        n=400,
        trials=2,
        perturbation={"kind": "diagonal", "values": [2.0], "mode": "multiplicative"},
        params={"ks_threshold": 0.08},
    )
    assert run_experiment(spec, 21).passed


def test_global_law_rectangular_covariance(make_spec):
    spec = make_spec(
        experiment="global_law_mp",
        ensemble={"family": {"kind": "sample_covariance", "m": 100}, "n": 400, "normalization": "one_over_sqrt_mn"},
        trials=1,
        params={"ks_threshold": 0.08},
    )
    assert run_experiment(spec, 21).passed


def test_global_law_rejects_unscaled_wigner(make_spec):
    spec = make_spec(
        experiment="global_law_wigner",
        ensemble={"family": {"kind": "goe"}, "n": 10, "normalization": "raw"},
    )
    with pytest.raises(ConfigurationError):
        run_experiment(spec, 1)


@pytest.mark.slow
def test_isotropic_law(make_spec):
    spec = make_spec(
        experiment="isotropic_law",
        n=400,
        trials=3,
        params={"isotropic_tolerance": 0.25, "threshold": 0.6},
    )
    report = run_experiment(spec, 30)
    assert report.passed
    assert report.predictions[0] == pytest.approx(-0.5)


def test_isotropic_law_rejects_perturbation(make_spec):
    spec = make_spec(experiment="isotropic_law", n=10, perturbation={"kind": "diagonal", "values": [2.0]})
    with pytest.raises(ConfigurationError):
        run_experiment(spec, 1)


def test_bounds_suite(make_spec):
    report = run_experiment(make_spec(experiment="bounds_suite", n=8, trials=5, params={"threshold": 1.0}), 9)
    assert report.passed
    metrics = report.per_trial[0].metrics
    assert metrics["kahan_pair_ok"] is True
    assert metrics["sylvester_error"] < 1e-8


def test_unexpected_failures_become_experiment_errors(make_spec, monkeypatch):
    spec = make_spec(experiment="interlacing", n=4, trials=1)

    def broken(spec, master_seed, workers=1):
        raise KeyError("boom")

    monkeypatch.setitem(EXPERIMENTS, "interlacing", broken)
    with pytest.raises(ExperimentError):
        run_experiment(spec, 1)
