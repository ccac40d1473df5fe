"""Classical perturbation inequalities on sampled matrices."""
import logging
import math
from typing import Dict

import numpy as np

from ..bounds import BoundReport, hoffman_wielandt_check, kahan_check, lipschitz_shift_check, sun_check
from ..ensembles import rng_for, standard_normals
from ..linalg_core import eig_general, eig_hermitian, eigenvalue_criterion, sylvester_det_check
from ..models import ExperimentReport, ExperimentSpec, SeedPlan
from .common import VECTOR_STREAM, require_wigner, sample_pair
from .runner import TrialOutcome, run_trials

logger = logging.getLogger(__name__)

CRITERION_TOL = 1e-6
CRITERION_SEPARATION = 1e-2
SYLVESTER_RTOL = 1e-8


def _complex_gaussian(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    g = standard_normals(rng, 2 * rows * cols)
    return (g[: rows * cols] + 1j * g[rows * cols:]).reshape(rows, cols) / math.sqrt(2.0)


def random_normal_matrix(rng: np.random.Generator, n: int) -> np.ndarray:
    """U diag(d) U^* with U unitary from the QR of a complex Gaussian matrix."""
    q, _ = np.linalg.qr(_complex_gaussian(rng, n, n))
    d = _complex_gaussian(rng, n, 1).ravel() * 2.0
    return (q * d) @ q.conj().T


def _record(metrics: Dict[str, object], name: str, report: BoundReport) -> bool:
    metrics[f"{name}_lhs"] = report.lhs
    metrics[f"{name}_rhs"] = report.rhs
    metrics[f"{name}_ok"] = report.satisfied
    return report.satisfied


def run_bounds_suite(spec: ExperimentSpec, master_seed: int, workers: int = 1) -> ExperimentReport:
    """Hoffman-Wielandt, Kahan, Sun and Lipschitz-shift bounds plus the eigenvalue criterion.

    Each trial samples a Wigner matrix M and, from an independent stream, a
    Hermitian P, a general complex P, a normal matrix for Sun's bound and a
    rank-two perturbation whose outliers are fed to the eigenvalue criterion.
    """
    require_wigner(spec)
    logger.info(f"Running {spec.name}: n={spec.ensemble.n}")

    def trial(spec: ExperimentSpec, seed: SeedPlan) -> TrialOutcome:
        m, _ = sample_pair(spec, seed)
        n = m.shape[0]
        rng = rng_for(seed.substream(VECTOR_STREAM))
        g = standard_normals(rng, n * n).reshape(n, n)
        hermitian_p = (g + g.T) / (2.0 * math.sqrt(n))
        general_p = _complex_gaussian(rng, n, n) / math.sqrt(n)
        normal_m = random_normal_matrix(rng, n)

        metrics: Dict[str, object] = {}
        ok = _record(metrics, "hoffman_wielandt", hoffman_wielandt_check(m, hermitian_p))
        for name, report in zip(("kahan_sup", "kahan_sum", "kahan_pair"), kahan_check(m, general_p)):
            ok = _record(metrics, name, report) and ok
        ok = _record(metrics, "sun", sun_check(normal_m, general_p)) and ok
        ok = _record(metrics, "lipschitz_shift", lipschitz_shift_check(m, general_p)) and ok

        a = 2.0 * _complex_gaussian(rng, n, 2) / math.sqrt(n)
        b = np.diag([1.0, 1j]) @ a.conj().T
        big, small = sylvester_det_check(a, b)
        sylvester_error = abs(big - small) / max(abs(big), abs(small), np.finfo(float).tiny)
        reference = eig_hermitian(m, vectors=False).eigenvalues
        values = eig_general(m + a @ b).eigenvalues
        separated = [z for z in values if np.min(np.abs(reference - z)) >= CRITERION_SEPARATION]
        residuals = [abs(eigenvalue_criterion(m, a, b, z)) for z in separated]
        criterion = max(residuals, default=0.0)
        metrics.update({
            "sylvester_error": sylvester_error,
            "criterion_points": len(separated),
            "max_criterion_residual": criterion,
        })
        ok = ok and sylvester_error <= SYLVESTER_RTOL and criterion <= CRITERION_TOL
        return TrialOutcome(ok, metrics)

    return run_trials(spec, master_seed, trial, workers)
