"""Global laws and the isotropic law for perturbed Wigner and covariance matrices."""
import logging
import math
from functools import partial
from typing import Callable, List, Tuple

import numpy as np

from .. import config
from ..bounds import kolmogorov_distance, paired_order
from ..ensembles import sample_matrix, sample_unit_sphere
from ..errors import ConfigurationError
from ..laws import m_mp, m_sc, mp_cdf, semicircle_cdf
from ..linalg_core import eig_general, resolvent_form
from ..models import ExperimentReport, ExperimentSpec, SeedPlan
from ..perturbations import norms, rank
from .common import (
    MATRIX_STREAM,
    SECOND_VECTOR_STREAM,
    VECTOR_STREAM,
    require_covariance,
    require_mode,
    require_wigner,
    require_zero_perturbation,
    sample_pair,
)
from .runner import TrialOutcome, dump_rows, run_trials, wants_dump

logger = logging.getLogger(__name__)

DEFAULT_Z_POINTS = {
    "wigner": [2.5 + 0j, 1j],
    "mp": [6.25 + 0j, 2 + 1j, -1 + 0j],
}


def limiting_cdf(spec: ExperimentSpec) -> Tuple[Callable, str]:
    """Distribution function the spectrum of ``spec`` should follow, with a label.

    Raises:
        ConfigurationError: If the normalization has no limit among the
            supported laws
    """
    ensemble = spec.ensemble
    if spec.law == "wigner":
        require_wigner(spec)
        if ensemble.normalization != "one_over_sqrt_n":
            raise ConfigurationError("The semicircle law needs normalization one_over_sqrt_n")
        return semicircle_cdf, "semicircle"
    family = require_covariance(spec)
    if ensemble.normalization == "one_over_sqrt_mn":
        y = family.m / ensemble.n
    elif ensemble.normalization == "one_over_n" and family.m == ensemble.n:
        y = 1.0
    else:
        raise ConfigurationError(
            "The Marchenko-Pastur law needs one_over_sqrt_mn, or one_over_n with m = n"
        )
    return partial(mp_cdf, y=y), f"marchenko_pastur(y={y:.4g})"


def run_global_law(spec: ExperimentSpec, master_seed: int, workers: int = 1) -> ExperimentReport:
    """Empirical spectral distribution of the perturbed matrix against its limit.

    The real parts must be within the Kolmogorov threshold of the limiting
    law, and the fraction of eigenvalues with |Im| above ``nonreal_mass_tol``
    may not exceed rank(P)/n plus the configured slack. The tolerance
    defaults to n^(-1/2).
    """
    cdf, label = limiting_cdf(spec)
    require_mode(spec, "additive" if spec.law == "wigner" else "multiplicative")
    params = spec.params
    n = spec.ensemble.n
    r = rank(spec.perturbation, n)
    _, hs_norm = norms(spec.perturbation, n)
    mass_bound = r / n + params.nonreal_mass_slack
    mass_tol = params.nonreal_mass_tol or n ** config.NONREAL_MASS_EXPONENT
    logger.info(f"Running {spec.name}: limit {label}, rank(P)={r}, nonreal above {mass_tol:.3g}")

    def trial(spec: ExperimentSpec, seed: SeedPlan) -> TrialOutcome:
        _, perturbed = sample_pair(spec, seed)
        values = eig_general(perturbed).eigenvalues
        ks = kolmogorov_distance(values.real, cdf)
        mass = float(np.count_nonzero(np.abs(values.imag) > mass_tol)) / n
        metrics = {
            "ks_distance": ks,
            "nonreal_mass": mass,
            "nonreal_mass_bound": mass_bound,
            "nonreal_mass_tol": mass_tol,
            "p_hs_gate": hs_norm / math.sqrt(n),
        }
        dump = dump_rows(seed.trial_index, paired_order(values), "eigenvalue") if wants_dump(spec, seed) else []
        return TrialOutcome(ks <= params.ks_threshold and mass <= mass_bound, metrics, dump)

    return run_trials(spec, master_seed, trial, workers)


def _quadratic_form_deviation(u: np.ndarray) -> float:
    """|u^* A u - tr(A)/n| for A projecting onto the first half of the coordinates."""
    n = u.size
    half = n // 2
    return float(abs(np.sum(np.abs(u[:half]) ** 2) - half / n))


def run_isotropic_law(spec: ExperimentSpec, master_seed: int, workers: int = 1) -> ExperimentReport:
    """Resolvent quadratic forms against the Stieltjes transform of the limit.

    For each configured z the trial measures |u^* G(z) u - m(z)| and
    |u^* G(z) v - m(z) u^* v| with independent unit vectors u and v, together
    with the concentration of u^* A u around tr(A)/n.

    Raises:
        ConfigurationError: If a perturbation is set or the ensemble is not
            W/sqrt(n) or S/n with m = n
        DomainError: If a z point lies on the limiting support
    """
    require_zero_perturbation(spec)
    law = spec.law
    if law == "wigner":
        require_wigner(spec)
        if spec.ensemble.normalization != "one_over_sqrt_n":
            raise ConfigurationError("isotropic_law on Wigner matrices needs normalization one_over_sqrt_n")
        transform = m_sc
    else:
        require_covariance(spec, square=True)
        if spec.ensemble.normalization != "one_over_n":
            raise ConfigurationError("isotropic_law on covariance matrices needs normalization one_over_n")
        transform = m_mp
    params = spec.params
    points: List[complex] = [complex(z) for z in (params.z_points or DEFAULT_Z_POINTS[law])]
    limits = [complex(transform(z)) for z in points]
    logger.info(f"Running {spec.name}: law={law}, z={points}")

    def trial(spec: ExperimentSpec, seed: SeedPlan) -> TrialOutcome:
        m = sample_matrix(spec.ensemble, seed.substream(MATRIX_STREAM))
        n = m.shape[0]
        u = sample_unit_sphere(n, params.field, seed.substream(VECTOR_STREAM))
        v = sample_unit_sphere(n, params.field, seed.substream(SECOND_VECTOR_STREAM))
        cross = complex(np.vdot(u, v))
        diagonal, off_diagonal = [], []
        for z, limit in zip(points, limits):
            diagonal.append(abs(resolvent_form(m, z, u, u) - limit))
            off_diagonal.append(abs(resolvent_form(m, z, u, v) - limit * cross))
        quadratic = _quadratic_form_deviation(u)
        metrics = {
            "max_diagonal_deviation": max(diagonal),
            "max_off_diagonal_deviation": max(off_diagonal),
            "quadratic_form_deviation": quadratic,
        }
        passed = max(diagonal + off_diagonal + [quadratic]) <= params.isotropic_tolerance
        return TrialOutcome(passed, metrics)

    return run_trials(spec, master_seed, trial, workers, predictions=limits)
