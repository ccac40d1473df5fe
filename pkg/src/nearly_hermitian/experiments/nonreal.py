"""Perturbations that push every eigenvalue off the real line."""
import logging
from typing import Dict, Optional, Tuple

import numpy as np

from .. import config
from ..bounds import match_spectra, paired_order
from ..ensembles import sample_matrix
from ..errors import ConfigurationError
from ..linalg_core import as_matrix, eig_general, eig_hermitian, spectral_norm, trace_defect
from ..models import ExperimentReport, ExperimentSpec, SeedPlan
from ..perturbations import apply, construct_nonreal_vector, imaginary_diagonal_entry, toeplitz_example
from .common import (
    MATRIX_STREAM,
    half_plane_sign,
    require_covariance,
    require_mode,
    require_wigner,
    sample_pair,
    trace_tolerance,
)
from .runner import TrialOutcome, dump_rows, run_trials, wants_dump

logger = logging.getLogger(__name__)


def run_nonreal_wigner(spec: ExperimentSpec, master_seed: int, workers: int = 1) -> ExperimentReport:
    """W/sqrt(n) + i gamma e_j e_j^* has every eigenvalue in the half-plane of gamma.

    Raises:
        ConfigurationError: If the ensemble is not Wigner with a nondegenerate
            off-diagonal atom, or P is not a single imaginary diagonal entry
    """
    require_wigner(spec, nondegenerate=True)
    require_mode(spec, "additive")
    n = spec.ensemble.n
    j, gamma = imaginary_diagonal_entry(spec.perturbation, n)
    sign = half_plane_sign(gamma)
    logger.info(f"Running {spec.name}: n={n}, entry {j}, gamma={gamma}")

    def trial(spec: ExperimentSpec, seed: SeedPlan) -> TrialOutcome:
        _, perturbed = sample_pair(spec, seed)
        values = eig_general(perturbed).eigenvalues
        signed = sign * values.imag
        defect = trace_defect(perturbed, values)
        wrong_side = int(np.count_nonzero(signed <= 0.0))
        metrics = {
            "min_abs_im": float(np.min(np.abs(values.imag))),
            "min_signed_im": float(np.min(signed)),
            "n_wrong_side": wrong_side,
            "trace_defect": defect,
        }
        dump = dump_rows(seed.trial_index, paired_order(values), "eigenvalue") if wants_dump(spec, seed) else []
        return TrialOutcome(wrong_side == 0 and defect <= trace_tolerance(n), metrics, dump)

    return run_trials(spec, master_seed, trial, workers)


def _min_relative_gap(values: np.ndarray) -> float:
    ordered = np.sort(values)
    if ordered.size < 2:
        return float("inf")
    return float(np.min(np.diff(ordered)) / max(np.max(np.abs(ordered)), np.finfo(float).tiny))


def run_nonreal_sampcov(spec: ExperimentSpec, master_seed: int, workers: int = 1) -> ExperimentReport:
    """S (I + i gamma e_j e_j^*) has min(m, n) eigenvalues off the line and the rest at 0.

    Alongside the counts each trial records how far S is from the almost-sure
    structure used by the argument: the smallest relative gap between its
    nonzero eigenvalues and the smallest |j-th coordinate| of their
    eigenvectors.
    """
    family = require_covariance(spec, continuous=True)
    require_mode(spec, "multiplicative")
    n = spec.ensemble.n
    j, gamma = imaginary_diagonal_entry(spec.perturbation, n)
    sign = half_plane_sign(gamma)
    r = min(family.m, n)
    tol = spec.params.zero_tol
    logger.info(f"Running {spec.name}: m={family.m}, n={n}, r={r}, gamma={gamma}")

    def trial(spec: ExperimentSpec, seed: SeedPlan) -> TrialOutcome:
        s, perturbed = sample_pair(spec, seed)
        reference = eig_hermitian(s)
        scale = max(float(np.max(np.abs(reference.eigenvalues))), np.finfo(float).tiny)
        values = eig_general(perturbed).eigenvalues
        at_zero = np.abs(values) <= tol * scale
        off_line = ~at_zero & (sign * values.imag > 0.0)
        nonzero = reference.eigenvalues[:r]
        metrics = {
            "n_zero": int(np.count_nonzero(at_zero)),
            "n_off_line": int(np.count_nonzero(off_line)),
            "expected_off_line": r,
            "min_positive_im": float(np.min(sign * values[off_line].imag, initial=np.inf)),
            "min_relative_gap": _min_relative_gap(nonzero),
            "min_eigvec_coordinate": float(np.min(np.abs(reference.eigenvectors[j, :r]))),
        }
        passed = metrics["n_zero"] == n - r and metrics["n_off_line"] == r
        dump = []
        if wants_dump(spec, seed):
            dump = dump_rows(seed.trial_index, paired_order(values), "eigenvalue")
            dump += dump_rows(seed.trial_index, reference.eigenvalues, "reference_eigenvalue")
        return TrialOutcome(passed, metrics, dump)

    return run_trials(spec, master_seed, trial, workers)


def _count_split(values: np.ndarray, shared: np.ndarray, sign: int, scale: float) -> Tuple[int, Optional[float]]:
    """(eigenvalues on the chosen side, worst distance of the rest to ``shared``)."""
    side = sign * values.imag > 1e-9 * scale
    rest = values[~side]
    if rest.size != shared.size:
        return int(np.count_nonzero(side)), None
    if rest.size == 0:
        return int(np.count_nonzero(side)), 0.0
    return int(np.count_nonzero(side)), float(np.max(match_spectra(rest, shared).pair_costs))


def _deterministic_matrix(spec: ExperimentSpec, seed: SeedPlan) -> np.ndarray:
    if spec.params.matrix is None:
        return sample_matrix(spec.ensemble, seed.substream(MATRIX_STREAM))
    m = as_matrix(np.asarray(spec.params.matrix, dtype=complex))
    if m.shape[0] != spec.ensemble.n:
        raise ConfigurationError(f"params.matrix has size {m.shape[0]}, ensemble n={spec.ensemble.n}")
    return m


def run_nonreal_deterministic(spec: ExperimentSpec, master_seed: int, workers: int = 1) -> ExperimentReport:
    """Exactly k nonreal eigenvalues for M + i u v^* and for M (I + i gamma v v^*).

    The matrix comes from ``params.matrix`` or is sampled from the ensemble.
    The multiplicative variant is only checked when the selected eigenvalues
    of M are positive. With ``params.toeplitz_n`` set, each trial also checks
    that the tridiagonal Toeplitz example has no real eigenvalue.

    Raises:
        PreconditionError: From construct_nonreal_vector on repeated selected
            eigenvalues or invalid z and a
    """
    params = spec.params
    k = params.k or 1
    sign = half_plane_sign(params.gamma)
    weights = params.a if params.a is not None else [float(sign)] * k
    if weights:
        sign = 1 if weights[0] > 0 else -1
    toeplitz = toeplitz_example(params.toeplitz_n) if params.toeplitz_n else None
    logger.info(f"Running {spec.name}: k={k}, side={sign:+d}")

    def trial(spec: ExperimentSpec, seed: SeedPlan) -> TrialOutcome:
        m = _deterministic_matrix(spec, seed)
        reference = eig_hermitian(m)
        n = reference.eigenvalues.size
        u, v = construct_nonreal_vector(m, k, z=params.z, a=weights)
        scale = max(1.0, spectral_norm(m))
        shared = reference.eigenvalues[k:]

        values = eig_general(m + 1j * np.outer(u, v.conj())).eigenvalues
        n_side, distance = _count_split(values, shared, sign, scale)
        additive_ok = n_side == k and distance is not None and distance <= config.MATCH_TOL * scale
        metrics: Dict[str, object] = {
            "n_side": n_side,
            "expected_side": k,
            "max_shared_distance": distance,
            "min_side_abs_im": float(np.sort(np.abs(values.imag))[n - k]) if k else None,
        }

        multiplicative_ok = True
        selected = reference.eigenvalues[:k]
        metrics["multiplicative_checked"] = bool(np.all(selected > 0))
        if metrics["multiplicative_checked"]:
            gamma = params.gamma
            mult = m @ (np.eye(n) + 1j * gamma * np.outer(v, v.conj()))
            mult_values = eig_general(mult).eigenvalues
            mult_side, mult_distance = _count_split(mult_values, shared, half_plane_sign(gamma), scale)
            multiplicative_ok = mult_side == k and mult_distance is not None and mult_distance <= config.MATCH_TOL * scale
            metrics["multiplicative_n_side"] = mult_side
            metrics["multiplicative_max_shared_distance"] = mult_distance

        toeplitz_ok = True
        if toeplitz is not None:
            t, corner = toeplitz
            t_values = eig_general(apply(t, corner)).eigenvalues
            min_im = float(np.min(np.abs(t_values.imag)))
            toeplitz_ok = min_im > 1e-9
            metrics["toeplitz_min_abs_im"] = min_im

        dump = dump_rows(seed.trial_index, paired_order(values), "eigenvalue") if wants_dump(spec, seed) else []
        return TrialOutcome(additive_ok and multiplicative_ok and toeplitz_ok, metrics, dump)

    return run_trials(spec, master_seed, trial, workers)
