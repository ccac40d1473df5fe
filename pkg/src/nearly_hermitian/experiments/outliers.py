"""Outlier location and bulk confinement for additive Wigner and multiplicative covariance models."""
import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .. import config
from ..bounds import match_spectra, paired_order
from ..errors import ConfigurationError
from ..laws import Prediction, Region, delta_prime, outlier_mp, outlier_wigner, region_contains
from ..linalg_core import eig_general, trace_defect
from ..models import ExperimentReport, ExperimentSpec, SeedPlan
from ..perturbations import eigenvalues as perturbation_eigenvalues
from .common import require_covariance, require_mode, require_wigner, sample_pair, trace_tolerance
from .runner import TrialOutcome, dump_rows, figure_rows, run_trials, wants_dump

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OutlierClassification:
    """Partition of a spectrum into outliers and bulk."""
    outliers: np.ndarray
    bulk: np.ndarray
    delta_prime: float


def default_delta(values: np.ndarray) -> float:
    """Largest gap around the unit circle left by P's eigenvalues, shrunk and capped."""
    if values.size == 0:
        return config.DELTA_CAP
    gap = float(np.min(np.abs(np.abs(values) - 1.0)))
    if gap == 0.0:
        raise ConfigurationError("Perturbation has an eigenvalue on the unit circle; no delta-gap exists")
    return min(config.DELTA_CAP, config.DELTA_SHRINK * gap)


def check_delta_gap(values: np.ndarray, delta: float) -> None:
    if values.size and np.any(np.abs(np.abs(values) - 1.0) < delta):
        raise ConfigurationError(f"Perturbation eigenvalues violate the delta-gap for delta={delta}")


def classify(eigenvalues: np.ndarray, law: str, dprime: float) -> OutlierClassification:
    """Split eigenvalues by the delta'-neighborhood of the limiting support.

    The covariance path also keeps the disk |z| <= delta' in the bulk.
    """
    values = np.asarray(eigenvalues, dtype=complex)
    if law == "wigner":
        bulk_mask = region_contains(Region.semicircle_nbhd(dprime), values)
    else:
        bulk_mask = region_contains(Region.mp_nbhd(dprime), values) | region_contains(Region.disk(dprime), values)
    bulk_mask = np.asarray(bulk_mask, dtype=bool)
    return OutlierClassification(paired_order(values[~bulk_mask]), paired_order(values[bulk_mask]), dprime)


def predict_outliers(values: np.ndarray, law: str, delta: float) -> List[Prediction]:
    predict = outlier_wigner if law == "wigner" else outlier_mp
    large = [lam for lam in values if abs(lam) >= 1.0 + delta]
    return [predict(lam) for lam in sorted(large, key=lambda c: (-c.real, -c.imag))]


def outlier_setup(spec: ExperimentSpec) -> Tuple[str, float, float, List[Prediction]]:
    """Validate the model and derive (law, delta, delta', predictions)."""
    law = spec.law
    if law == "wigner":
        require_wigner(spec)
        require_mode(spec, "additive")
    else:
        require_covariance(spec, square=True)
        require_mode(spec, "multiplicative")
    values = perturbation_eigenvalues(spec.perturbation, spec.ensemble.n)
    delta = spec.params.delta if spec.params.delta is not None else default_delta(values)
    check_delta_gap(values, delta)
    return law, delta, delta_prime(delta), predict_outliers(values, law, delta)


def match_to_predictions(outliers: np.ndarray, predictions: List[Prediction]) -> Optional[float]:
    """Largest distance in the optimal outlier/prediction matching, None if counts differ."""
    if len(outliers) != len(predictions):
        return None
    if not predictions:
        return 0.0
    match = match_spectra(outliers, [p.value for p in predictions])
    return float(np.max(match.pair_costs))


def run_outliers(spec: ExperimentSpec, master_seed: int, workers: int = 1) -> ExperimentReport:
    """Count outliers and compare them with lambda + 1/lambda or 2 + lambda + 1/lambda.

    Raises:
        ConfigurationError: If P violates the delta-gap or the model does not
            fit the law
    """
    law, delta, dprime, predictions = outlier_setup(spec)
    tolerance = spec.params.match_tolerance
    n = spec.ensemble.n
    logger.info(f"Running {spec.name}: law={law}, delta={delta:.4g}, delta'={dprime:.4g}, j={len(predictions)}")

    def trial(spec: ExperimentSpec, seed: SeedPlan) -> TrialOutcome:
        _, perturbed = sample_pair(spec, seed)
        values = eig_general(perturbed).eigenvalues
        classification = classify(values, law, dprime)
        distance = match_to_predictions(classification.outliers, predictions)
        defect = trace_defect(perturbed, values)
        passed = distance is not None and distance <= tolerance and defect <= trace_tolerance(n)
        if distance is None:
            logger.warning(
                f"Trial {seed.trial_index}: {len(classification.outliers)} eigenvalues outside the "
                f"delta'-region, expected {len(predictions)}"
            )
        metrics = {
            "n_outliers": len(classification.outliers),
            "expected_outliers": len(predictions),
            "n_bulk": len(classification.bulk),
            "max_match_distance": distance,
            "trace_defect": defect,
        }
        dump = []
        if wants_dump(spec, seed):
            dump = dump_rows(seed.trial_index, paired_order(values), "eigenvalue")
            dump += figure_rows(spec, seed, [p.value for p in predictions])
        return TrialOutcome(passed, metrics, dump)

    return run_trials(spec, master_seed, trial, workers, predictions=[p.value for p in predictions])


def run_bulk_im_bound(spec: ExperimentSpec, master_seed: int, workers: int = 1) -> ExperimentReport:
    """Bulk eigenvalues within n^(-1+eps) of the real axis and near the limiting support."""
    law, _, dprime, predictions = outlier_setup(spec)
    n = spec.ensemble.n
    eps = spec.params.epsilon
    im_bound = n ** (-1.0 + eps)
    edge = (2.0 if law == "wigner" else 4.0) + n ** (-2.0 / 3.0 + eps)

    def trial(spec: ExperimentSpec, seed: SeedPlan) -> TrialOutcome:
        _, perturbed = sample_pair(spec, seed)
        values = eig_general(perturbed).eigenvalues
        bulk = classify(values, law, dprime).bulk
        max_im = float(np.max(np.abs(bulk.imag), initial=0.0))
        if law == "wigner":
            max_re = float(np.max(np.abs(bulk.real), initial=0.0))
            re_ok = max_re <= edge
            metrics = {"max_bulk_abs_re": max_re}
        else:
            exempt = np.abs(bulk) <= dprime
            away = bulk[~exempt]
            min_re = float(np.min(away.real, initial=np.inf))
            max_re = float(np.max(away.real, initial=0.0))
            re_ok = bool(np.all((away.real > 0.0) & (away.real <= edge)))
            metrics = {"min_bulk_re": min_re if away.size else None, "max_bulk_re": max_re}
        metrics.update({"max_bulk_abs_im": max_im, "im_bound": im_bound, "re_bound": edge, "n_bulk": len(bulk)})
        dump = dump_rows(seed.trial_index, paired_order(values), "eigenvalue") if wants_dump(spec, seed) else []
        return TrialOutcome(max_im <= im_bound and re_ok, metrics, dump)

    return run_trials(spec, master_seed, trial, workers, predictions=[p.value for p in predictions])
