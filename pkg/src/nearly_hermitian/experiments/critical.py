"""Critical points of the characteristic polynomial of a perturbed Wigner matrix."""
import logging

import numpy as np

from ..bounds import gauss_lucas_check, kolmogorov_distance, match_into, paired_order
from ..laws import semicircle_cdf
from ..linalg_core import critical_companion, eig_general
from ..models import ExperimentReport, ExperimentSpec, SeedPlan
from .common import sample_pair
from .outliers import classify, outlier_setup
from .runner import TrialOutcome, dump_rows, figure_rows, run_trials, wants_dump

logger = logging.getLogger(__name__)


def critical_points(eigenvalues: np.ndarray) -> np.ndarray:
    """The n - 1 critical points of prod (z - lambda_j).

    The companion matrix carries one extra eigenvalue at 0; the computed
    eigenvalue nearest the origin is dropped.
    """
    values = eig_general(critical_companion(eigenvalues)).eigenvalues
    return np.delete(values, int(np.argmin(np.abs(values))))


def run_critical_points(spec: ExperimentSpec, master_seed: int, workers: int = 1) -> ExperimentReport:
    """Critical points follow the semicircle law, except those next to outliers.

    Per trial: the Kolmogorov distance of the real parts to the semicircle
    law, the imaginary spread of the non-outlier critical points, the distance
    from each outlier eigenvalue to its matched critical point, and the
    Gauss-Lucas hull condition.
    """
    law, _, dprime, predictions = outlier_setup(spec)
    params = spec.params
    logger.info(f"Running {spec.name}: n={spec.ensemble.n}, {len(predictions)} predicted outliers")

    def trial(spec: ExperimentSpec, seed: SeedPlan) -> TrialOutcome:
        _, perturbed = sample_pair(spec, seed)
        values = eig_general(perturbed).eigenvalues
        critical = critical_points(values)
        outliers = classify(values, law, dprime).outliers

        ks = kolmogorov_distance(critical.real, semicircle_cdf)
        matched = np.zeros(critical.size, dtype=bool)
        max_outlier_distance = 0.0
        if outliers.size:
            match = match_into(outliers, critical)
            matched[match.permutation] = True
            max_outlier_distance = float(np.max(match.pair_costs))
        max_im = float(np.max(np.abs(critical[~matched].imag), initial=0.0))
        hull = gauss_lucas_check(values, critical)

        metrics = {
            "ks_distance": ks,
            "max_nonoutlier_abs_im": max_im,
            "n_outliers": int(outliers.size),
            "max_outlier_distance": max_outlier_distance,
            "gauss_lucas_excess": hull.lhs,
            "gauss_lucas_ok": hull.satisfied,
        }
        passed = (
            ks <= params.ks_threshold
            and max_im <= params.critical_im_max
            and max_outlier_distance <= params.critical_tolerance
            and hull.satisfied
        )
        dump = []
        if wants_dump(spec, seed):
            dump = dump_rows(seed.trial_index, paired_order(values), "eigenvalue")
            dump += dump_rows(seed.trial_index, paired_order(critical), "critical_point")
            dump += figure_rows(spec, seed, [p.value for p in predictions])
        return TrialOutcome(passed, metrics, dump)

    return run_trials(spec, master_seed, trial, workers, predictions=[p.value for p in predictions])
