"""Checks and helpers shared by the experiment runners."""
import logging
from typing import Tuple

import numpy as np

from .. import config
from ..ensembles import is_absolutely_continuous, is_degenerate, sample_matrix, wigner_family
from ..errors import ConfigurationError
from ..models import ExperimentSpec, SampleCovarianceFamily, SeedPlan
from ..perturbations import apply, factors

logger = logging.getLogger(__name__)

MATRIX_STREAM = 0
VECTOR_STREAM = 1
SECOND_VECTOR_STREAM = 2
AUXILIARY_STREAM = 3


def require_wigner(spec: ExperimentSpec, nondegenerate: bool = False) -> None:
    family = wigner_family(spec.ensemble)
    if nondegenerate and is_degenerate(family.offdiag):
        raise ConfigurationError(f"{spec.name}: off-diagonal atom is degenerate")


def require_covariance(spec: ExperimentSpec, square: bool = False, continuous: bool = False) -> SampleCovarianceFamily:
    family = spec.ensemble.family
    if not isinstance(family, SampleCovarianceFamily):
        raise ConfigurationError(f"{spec.name} needs a sample_covariance ensemble")
    if square and family.m != spec.ensemble.n:
        raise ConfigurationError(f"{spec.name} needs m = n, got m={family.m}, n={spec.ensemble.n}")
    if continuous and not is_absolutely_continuous(family.atom):
        raise ConfigurationError(f"{spec.name} needs an absolutely continuous atom")
    return family


def require_mode(spec: ExperimentSpec, mode: str) -> None:
    perturbation = spec.perturbation
    if is_zero(spec):
        return
    if perturbation.mode != mode:
        raise ConfigurationError(f"{spec.name} needs a {mode} perturbation, got {perturbation.mode}")


def is_zero(spec: ExperimentSpec) -> bool:
    a, _ = factors(spec.perturbation, spec.ensemble.n)
    return a.shape[1] == 0 or not np.any(a)


def require_zero_perturbation(spec: ExperimentSpec) -> None:
    if not is_zero(spec):
        raise ConfigurationError(f"{spec.name} takes no perturbation")


def sample_pair(spec: ExperimentSpec, seed: SeedPlan) -> Tuple[np.ndarray, np.ndarray]:
    """(M, perturbed M) for one trial."""
    m = sample_matrix(spec.ensemble, seed.substream(MATRIX_STREAM))
    return m, apply(m, spec.perturbation)


def half_plane_sign(value: float) -> int:
    if value == 0:
        raise ConfigurationError("Imaginary scale gamma must be nonzero")
    return 1 if value > 0 else -1


def trace_tolerance(n: int) -> float:
    return config.ZERO_TOL * n
