"""Experiment runners keyed by experiment name."""
import logging
from typing import Callable, Dict

from ..errors import ExperimentError, NearlyHermitianError
from ..models import ExperimentReport, ExperimentSpec
from .critical import run_critical_points
from .global_law import run_global_law, run_isotropic_law
from .interlacing import run_interlacing
from .nonreal import run_nonreal_deterministic, run_nonreal_sampcov, run_nonreal_wigner
from .outliers import OutlierClassification, classify, run_bulk_im_bound, run_outliers
from .overlap import run_overlap
from .suite import run_bounds_suite

# Configure logging
logger = logging.getLogger(__name__)

Runner = Callable[[ExperimentSpec, int, int], ExperimentReport]

EXPERIMENTS: Dict[str, Runner] = {
    "nonreal_wigner": run_nonreal_wigner,
    "nonreal_sampcov": run_nonreal_sampcov,
    "nonreal_deterministic": run_nonreal_deterministic,
    "interlacing": run_interlacing,
    "global_law_wigner": run_global_law,
    "global_law_mp": run_global_law,
    "outliers_wigner": run_outliers,
    "outliers_mp": run_outliers,
    "bulk_im_bound": run_bulk_im_bound,
    "overlap_wigner": run_overlap,
    "overlap_mp": run_overlap,
    "critical_points": run_critical_points,
    "bounds_suite": run_bounds_suite,
    "isotropic_law": run_isotropic_law,
}


def run_experiment(spec: ExperimentSpec, master_seed: int, workers: int = 1) -> ExperimentReport:
    """Run one configured experiment.

    Args:
        spec: Validated experiment configuration
        master_seed: Run-level seed
        workers: Number of trial worker threads

    Returns:
        ExperimentReport with per-trial records and aggregates

    Raises:
        NearlyHermitianError: Configuration and precondition errors pass through
        ExperimentError: If the runner fails unexpectedly
    """
    try:
        logger.info(f"Starting experiment {spec.name} ({spec.experiment}, {spec.trials} trials)")
        report = EXPERIMENTS[spec.experiment](spec, master_seed, workers)
        logger.info(f"Successfully ran experiment {spec.name}")
        return report
    except NearlyHermitianError:
        raise
    except Exception as e:
        logger.error(f"Error running experiment {spec.name}: {str(e)}")
        raise ExperimentError(f"Failed to run experiment {spec.name}: {str(e)}")


__all__ = [
    "EXPERIMENTS",
    "OutlierClassification",
    "classify",
    "run_experiment",
]
