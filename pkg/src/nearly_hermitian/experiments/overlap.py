"""Overlap of the outlier eigenvector with the spike direction."""
import logging
import math
from typing import Any, Dict, List, Tuple

import numpy as np

from .. import config
from ..ensembles import sample_matrix, sample_unit_sphere
from ..errors import ConfigurationError
from ..laws import delta_prime, outlier_mp, outlier_wigner, overlap_mp, overlap_wigner
from ..linalg_core import eig_general, refine_eigenvector
from ..models import ExperimentReport, ExperimentSpec, SeedPlan, TrialRecord
from .common import (
    MATRIX_STREAM,
    SECOND_VECTOR_STREAM,
    VECTOR_STREAM,
    require_covariance,
    require_wigner,
    require_zero_perturbation,
)
from .outliers import classify
from .runner import TrialOutcome, dump_rows, figure_rows, run_trials, wants_dump

logger = logging.getLogger(__name__)

NONNORMAL_ANGLE = math.pi / 4.0


def spike_factors(
    u: np.ndarray, theta: complex, seed: SeedPlan, nonnormal: bool, field: str
) -> Tuple[np.ndarray, np.ndarray]:
    """Factors of theta u u^*, or of sigma u w^* with w^* u = theta / sigma.

    The non-normal spike tilts w away from u by a fixed angle, so P keeps the
    single nonzero eigenvalue theta while ||P|| = |theta| / cos(angle).
    """
    if not nonnormal:
        return (theta * u)[:, None], u.conj()[None, :]
    g = sample_unit_sphere(u.size, field, seed.substream(SECOND_VECTOR_STREAM)).astype(complex)
    g = g - np.vdot(u, g) * u
    perp = g / np.linalg.norm(g)
    c = math.cos(NONNORMAL_ANGLE) * np.exp(-1j * np.angle(theta))
    w = c * u + math.sin(NONNORMAL_ANGLE) * perp
    sigma = abs(theta) / math.cos(NONNORMAL_ANGLE)
    return (sigma * u)[:, None], w.conj()[None, :]


def run_overlap(spec: ExperimentSpec, master_seed: int, workers: int = 1) -> ExperimentReport:
    """Mean |u^* v|^2 over trials against the analytic overlap limit.

    The spike is built from a fresh unit vector u per trial; ``spec.perturbation``
    must be left at zero. A trial fails with diagnostics when the spectrum
    does not have exactly one outlier.

    Raises:
        ConfigurationError: If theta is missing or |theta| <= 1
    """
    law = spec.law
    params = spec.params
    if law == "wigner":
        require_wigner(spec)
    else:
        require_covariance(spec, square=True)
    require_zero_perturbation(spec)
    if params.theta is None or abs(params.theta) <= 1.0:
        raise ConfigurationError(f"{spec.name} needs params.theta with |theta| > 1, got {params.theta}")
    theta = complex(params.theta)
    location = (outlier_wigner if law == "wigner" else outlier_mp)(theta).value
    expected = (overlap_wigner if law == "wigner" else overlap_mp)(theta).value
    delta = params.delta
    if delta is None:
        delta = min(config.DELTA_CAP, config.DELTA_SHRINK * (abs(theta) - 1.0))
    dprime = delta_prime(delta)
    logger.info(f"Running {spec.name}: theta={theta}, outlier at {location:.4g}, predicted overlap {expected:.4f}")

    def trial(spec: ExperimentSpec, seed: SeedPlan) -> TrialOutcome:
        m = sample_matrix(spec.ensemble, seed.substream(MATRIX_STREAM))
        n = m.shape[0]
        u = sample_unit_sphere(n, params.field, seed.substream(VECTOR_STREAM)).astype(complex)
        a, b = spike_factors(u, theta, seed, params.nonnormal, params.field)
        if law == "mp":
            a = m @ a
        perturbed = m + a @ b
        values = eig_general(perturbed).eigenvalues
        outliers = classify(values, law, dprime).outliers
        metrics: Dict[str, Any] = {"n_outliers": len(outliers), "overlap": None, "location_error": None}
        dump = []
        if wants_dump(spec, seed):
            dump = dump_rows(seed.trial_index, values, "eigenvalue") + figure_rows(spec, seed, [location])
        if len(outliers) != 1:
            logger.warning(f"Trial {seed.trial_index} of {spec.name}: {len(outliers)} outliers, expected 1")
            return TrialOutcome(False, metrics, dump)
        v, residual = refine_eigenvector(perturbed, outliers[0])
        metrics["overlap"] = float(abs(np.vdot(u, v)) ** 2)
        metrics["location_error"] = float(abs(outliers[0] - location))
        metrics["eigvec_residual"] = residual
        return TrialOutcome(metrics["location_error"] <= params.location_tolerance, metrics, dump)

    def summarize(records: List[TrialRecord]) -> Tuple[bool, Dict[str, Any]]:
        overlaps = [r.metrics["overlap"] for r in records if r.metrics.get("overlap") is not None]
        if not overlaps:
            return False, {"predicted_overlap": expected, "mean_overlap": None, "overlap_error": None}
        mean = float(np.mean(overlaps))
        error = abs(mean - expected)
        return error <= params.overlap_tolerance, {
            "predicted_overlap": expected,
            "mean_overlap": mean,
            "overlap_error": error,
        }

    return run_trials(spec, master_seed, trial, workers, predictions=[location], summary_fn=summarize)
