"""Strict interlacing of Wigner spectra and the Hermite-Biehler criterion."""
import logging
from typing import Tuple

import numpy as np

from ..ensembles import rng_for
from ..linalg_core import eig_general, eig_hermitian, poly_from_roots, poly_roots
from ..models import ExperimentReport, ExperimentSpec, SeedPlan
from ..perturbations import bordered_determinant_gap
from .common import AUXILIARY_STREAM, SECOND_VECTOR_STREAM, half_plane_sign, require_wigner, sample_pair
from .runner import TrialOutcome, run_trials

logger = logging.getLogger(__name__)

BORDERED_RTOL = 1e-8
HALF_PLANE_RTOL = 1e-9


def interlacing_margin(outer: np.ndarray, inner: np.ndarray) -> float:
    """Smallest gap in outer_1 > inner_1 > outer_2 > ... > inner_(n-1) > outer_n.

    Both arrays are sorted descending; a positive margin means strict
    interlacing.
    """
    outer = np.sort(np.asarray(outer, dtype=float))[::-1]
    inner = np.sort(np.asarray(inner, dtype=float))[::-1]
    if outer.size != inner.size + 1:
        raise ValueError(f"Cannot interlace {inner.size} values with {outer.size}")
    if inner.size == 0:
        return float("inf")
    return float(min(np.min(outer[:-1] - inner), np.min(inner - outer[1:])))


def half_plane_of_roots(roots: np.ndarray) -> int:
    """+1 or -1 when every root is strictly inside that half-plane, else 0."""
    roots = np.asarray(roots, dtype=complex)
    tol = HALF_PLANE_RTOL * max(1.0, float(np.max(np.abs(roots), initial=0.0)))
    if np.all(roots.imag > tol):
        return 1
    if np.all(roots.imag < -tol):
        return -1
    return 0


def hermite_biehler_pair(rng: np.random.Generator, degree: int, interlacing: bool) -> Tuple[np.ndarray, np.ndarray]:
    """Real zeros (alpha, beta) of P (degree d) and Q (degree d - 1).

    The interlacing pair puts one beta strictly inside each gap of alpha. The
    other moves the first beta into the second gap, leaving the first gap
    empty.
    """
    alpha = np.cumsum(rng.uniform(0.5, 1.5, size=degree)) - 0.75 * degree
    gaps = np.diff(alpha)
    beta = alpha[:-1] + gaps * rng.uniform(0.2, 0.8, size=degree - 1)
    if not interlacing:
        beta[0] = (alpha[1] + beta[1]) / 2.0
    return alpha, beta


def hermite_biehler_side(alpha: np.ndarray, beta: np.ndarray) -> int:
    """Half-plane of the zeros of P + iQ, 0 when they are not all on one side."""
    return half_plane_of_roots(poly_roots(poly_from_roots(alpha) + 1j * poly_from_roots(beta)))


def run_interlacing(spec: ExperimentSpec, master_seed: int, workers: int = 1) -> ExperimentReport:
    """Interlacing of W with its leading minor, checked three ways per trial.

    Each trial measures the strict interlacing margin, verifies that
    W + diag(0, ..., 0, i gamma) has its spectrum in one half-plane exactly
    when the margin is positive, checks the bordered determinant identity at
    a random point, and runs the Hermite-Biehler criterion in both directions
    on freshly constructed zero sets.
    """
    require_wigner(spec)
    params = spec.params
    sign = half_plane_sign(params.gamma)
    degree = params.hb_degree
    logger.info(f"Running {spec.name}: n={spec.ensemble.n}, Hermite-Biehler degree {degree}")

    def trial(spec: ExperimentSpec, seed: SeedPlan) -> TrialOutcome:
        w, _ = sample_pair(spec, seed)
        n = w.shape[0]
        outer = eig_hermitian(w, vectors=False).eigenvalues
        inner = eig_hermitian(w[:-1, :-1], vectors=False).eigenvalues
        margin = interlacing_margin(outer, inner)

        bordered = w.astype(complex)
        bordered[-1, -1] += 1j * params.gamma
        side = half_plane_of_roots(eig_general(bordered).eigenvalues)
        consistent = (margin > 0) == (side == sign)

        aux = rng_for(seed.substream(AUXILIARY_STREAM))
        z = complex(aux.uniform(-2.0, 2.0), aux.uniform(0.1, 1.0))
        lhs, rhs = bordered_determinant_gap(w, params.gamma, z)
        bordered_error = abs(lhs - rhs) / max(abs(lhs), abs(rhs), np.finfo(float).tiny)

        hb_rng = rng_for(seed.substream(SECOND_VECTOR_STREAM))
        hb_interlacing = hermite_biehler_side(*hermite_biehler_pair(hb_rng, degree, True))
        hb_crossed = hermite_biehler_side(*hermite_biehler_pair(hb_rng, degree, False))
        hb_ok = hb_interlacing != 0 and hb_crossed == 0

        metrics = {
            "interlacing_margin": margin,
            "bordered_side": side,
            "bordered_consistent": consistent,
            "bordered_identity_error": bordered_error,
            "hb_interlacing_side": hb_interlacing,
            "hb_crossed_side": hb_crossed,
            "n": n,
        }
        passed = margin > 0 and consistent and bordered_error <= BORDERED_RTOL and hb_ok
        return TrialOutcome(passed, metrics)

    return run_trials(spec, master_seed, trial, workers)
