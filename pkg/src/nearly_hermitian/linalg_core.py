"""Dense complex linear algebra on top of LAPACK.

Eigenvalues come from ``scipy.linalg`` (Householder tridiagonalization with
implicit QL/QR for Hermitian input, Hessenberg reduction with shifted QR and
deflation otherwise). Everything here is pure and thread-safe.
"""
import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt
import scipy.linalg
from numpy.polynomial import Polynomial

from . import config
from .errors import ContractViolation, ResolventError, SolverError

logger = logging.getLogger(__name__)

ComplexMatrix = npt.NDArray[np.complexfloating]


def as_matrix(a, square: bool = True) -> np.ndarray:
    """Validate a finite 2-D array, keeping real storage when possible."""
    arr = np.asarray(a)
    if arr.ndim != 2:
        raise ContractViolation(f"Expected a matrix, got array of shape {arr.shape}")
    if square and arr.shape[0] != arr.shape[1]:
        raise ContractViolation(f"Expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ContractViolation("Matrix has non-finite entries")
    if np.iscomplexobj(arr) and not np.any(arr.imag):
        arr = arr.real
    if not np.issubdtype(arr.dtype, np.inexact):
        arr = arr.astype(float)
    return arr


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues counted with multiplicity, optional unit eigenvectors."""
    eigenvalues: np.ndarray
    eigenvectors: Optional[np.ndarray] = None
    residual: Optional[float] = None
    driver: str = ""

    def __len__(self) -> int:
        return len(self.eigenvalues)


def _max_residual(a: np.ndarray, values: np.ndarray, vectors: np.ndarray) -> float:
    if values.size == 0:
        return 0.0
    return float(np.max(np.linalg.norm(a @ vectors - vectors * values, axis=0)))


def eig_hermitian(a, vectors: bool = True) -> Spectrum:
    """Spectrum of a Hermitian matrix.

    Args:
        a: Square Hermitian matrix
        vectors: Whether to return orthonormal eigenvectors

    Returns:
        Spectrum with real eigenvalues sorted descending

    Raises:
        ContractViolation: If ``a`` is not Hermitian within tolerance
        SolverError: If LAPACK fails to converge
    """
    a = as_matrix(a)
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    if np.max(np.abs(a - a.conj().T), initial=0.0) > config.HERMITIAN_TOL * scale:
        raise ContractViolation("eig_hermitian called with a non-Hermitian matrix")
    try:
        if vectors:
            values, vecs = scipy.linalg.eigh(a)
        else:
            values, vecs = scipy.linalg.eigh(a, eigvals_only=True), None
    except np.linalg.LinAlgError as e:
        raise SolverError(f"Hermitian eigensolver did not converge: {e}", matrix_size=a.shape[0])
    values = values[::-1]
    residual = None
    if vecs is not None:
        vecs = vecs[:, ::-1]
        residual = _max_residual(a, values, vecs)
        if residual > config.HERMITIAN_RESIDUAL_TOL * max(scale, 1.0) * a.shape[0]:
            logger.warning(f"Hermitian eigensolver residual {residual:.3e} at n={a.shape[0]}")
    return Spectrum(values, vecs, residual, driver="eigh")


def eig_general(a, vectors: bool = False) -> Spectrum:
    """Spectrum of an arbitrary square matrix.

    Raises:
        SolverError: If the QR iteration does not converge; the message
            reports how many eigenvalues LAPACK had deflated.
    """
    a = as_matrix(a)
    n = a.shape[0]
    try:
        if vectors:
            values, vecs = scipy.linalg.eig(a, right=True)
            vecs = vecs / np.linalg.norm(vecs, axis=0)
        else:
            values, vecs = scipy.linalg.eigvals(a), None
    except np.linalg.LinAlgError as e:
        raise SolverError(f"General eigensolver did not converge: {e}", matrix_size=n)
    values = np.asarray(values, dtype=complex)
    residual = _max_residual(a, values, vecs) if vecs is not None else None
    return Spectrum(values, vecs, residual, driver="geev")


def trace_defect(a, eigenvalues: np.ndarray) -> float:
    """|sum of eigenvalues - trace|, the cheapest sanity check on a spectrum."""
    return float(abs(np.sum(eigenvalues) - np.trace(np.asarray(a))))


def refine_eigenvector(a, eigenvalue: complex, steps: int = config.INVERSE_ITERATION_STEPS) -> Tuple[np.ndarray, float]:
    """Unit right eigenvector for a computed eigenvalue by inverse iteration.

    Returns:
        (vector, relative residual ||A v - lambda v|| / max(1, ||A||))

    Raises:
        SolverError: If the residual stays above the gate
    """
    a = as_matrix(a)
    n = a.shape[0]
    norm = max(1.0, float(np.linalg.norm(a, 1)))
    shift = eigenvalue + 64 * np.finfo(float).eps * norm * (1 + 1j)
    lu = scipy.linalg.lu_factor(a - shift * np.eye(n), check_finite=False)
    x = np.ones(n, dtype=complex) / np.sqrt(n)
    x[::2] *= -1.0
    residual = np.inf
    for _ in range(steps):
        x = scipy.linalg.lu_solve(lu, x, check_finite=False)
        x = x / np.linalg.norm(x)
        residual = float(np.linalg.norm(a @ x - eigenvalue * x)) / norm
        if residual <= config.EIGVEC_RESIDUAL_GATE:
            break
    if residual > config.EIGVEC_RESIDUAL_GATE:
        raise SolverError(
            f"Inverse iteration residual {residual:.3e} above gate at eigenvalue {eigenvalue}",
            matrix_size=n,
        )
    return x, residual


def frobenius_norm(a) -> float:
    """Frobenius (Hilbert-Schmidt) norm.

    Args:
        a: Finite matrix, not necessarily square

    Returns:
        sqrt of the sum of squared entry moduli
    """
    a = as_matrix(a, square=False)
    return float(np.sqrt(np.sum(np.abs(a) ** 2)))


def spectral_norm(a) -> float:
    """Largest singular value."""
    a = as_matrix(a, square=False)
    if a.size == 0:
        return 0.0
    return float(scipy.linalg.svdvals(a)[0])


def re_im_parts(a) -> Tuple[np.ndarray, np.ndarray]:
    """Hermitian parts with A = Re(A) + i Im(A)."""
    a = as_matrix(a)
    adj = a.conj().T
    return (a + adj) / 2.0, (a - adj) / 2j


def log_abs_det(a) -> Tuple[complex, float]:
    """(phase, log|det|) from an LU factorization with partial pivoting."""
    a = as_matrix(a)
    if a.shape[0] == 0:
        return 1.0 + 0j, 0.0
    lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    diag = np.diag(lu)
    if np.any(diag == 0):
        return 0j, -np.inf
    swaps = np.count_nonzero(piv != np.arange(piv.size))
    phase = complex((-1) ** swaps) * np.prod(diag / np.abs(diag))
    return complex(phase), float(np.sum(np.log(np.abs(diag))))


def det(a) -> complex:
    """Determinant from the LU phase and log-magnitude."""
    phase, logmag = log_abs_det(a)
    if phase == 0:
        return 0j
    return complex(phase * np.exp(logmag))


def resolvent_form(a, z: complex, u, v) -> complex:
    """u^* (A - zI)^{-1} v through an LU solve.

    Raises:
        ResolventError: If the reciprocal condition estimate of A - zI is
            below the singularity tolerance
    """
    a = as_matrix(a)
    n = a.shape[0]
    u = np.asarray(u, dtype=complex).ravel()
    v = np.asarray(v, dtype=complex).ravel()
    if u.size != n or v.size != n:
        raise ContractViolation(f"Vectors of length {u.size}, {v.size} do not match matrix size {n}")
    shifted = a - z * np.eye(n)
    anorm = float(np.linalg.norm(shifted, 1))
    lu, piv = scipy.linalg.lu_factor(shifted, check_finite=False)
    gecon, = scipy.linalg.get_lapack_funcs(("gecon",), (lu,))
    rcond, info = gecon(lu, anorm, norm="1")
    if anorm == 0.0 or rcond <= config.TOL_SING:
        raise ResolventError(
            f"Shift z={z} is numerically an eigenvalue (rcond={rcond:.3e})",
            matrix_size=n,
            condition_estimate=float(np.inf if rcond == 0 else 1.0 / rcond),
        )
    x = scipy.linalg.lu_solve((lu, piv), v, check_finite=False)
    return complex(np.vdot(u, x))


def eigenvalue_criterion(m, a, b, z: complex) -> complex:
    """det(I + (M - zI)^{-1} P) for P = A B, evaluated as det(I_k + B (M - zI)^{-1} A).

    Vanishes exactly at the eigenvalues of M + P that are not eigenvalues of M.
    """
    m = as_matrix(m)
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    b = np.atleast_2d(np.asarray(b, dtype=complex))
    n = m.shape[0]
    lu = scipy.linalg.lu_factor(m - z * np.eye(n), check_finite=False)
    solved = scipy.linalg.lu_solve(lu, a, check_finite=False)
    k = b.shape[0]
    return det(np.eye(k) + b @ solved)


def sylvester_det_check(a, b) -> Tuple[complex, complex]:
    """(det(I_n + AB), det(I_k + BA)) for conformable A (n x k), B (k x n)."""
    a = as_matrix(a, square=False)
    b = as_matrix(b, square=False)
    if a.shape[1] != b.shape[0] or a.shape[0] != b.shape[1]:
        raise ContractViolation(f"Shapes {a.shape} and {b.shape} are not conformable")
    n, k = a.shape
    return det(np.eye(n) + a @ b), det(np.eye(k) + b @ a)


# Polynomials

def poly_from_roots(roots: Sequence[complex]) -> Polynomial:
    """Monic polynomial with the given roots, ascending coefficients."""
    return Polynomial.fromroots(np.asarray(roots, dtype=complex))


def _require_nonzero(p: Polynomial) -> Polynomial:
    p = p.trim()
    if p.degree() == 0 and p.coef[0] == 0:
        raise ContractViolation("Zero polynomial has no roots or derivative degree")
    return p


def poly_derivative(p: Polynomial) -> Polynomial:
    p = _require_nonzero(p)
    if p.degree() < 1:
        raise ContractViolation("Derivative needs a polynomial of degree >= 1")
    return p.deriv()


def poly_roots(p: Polynomial) -> np.ndarray:
    """Roots as eigenvalues of the companion matrix."""
    p = _require_nonzero(p)
    if p.degree() < 1:
        raise ContractViolation("Roots need a polynomial of degree >= 1")
    companion = np.asarray(p.coef, dtype=complex)
    companion = companion / companion[-1]
    d = p.degree()
    c = np.zeros((d, d), dtype=complex)
    c[1:, :-1] = np.eye(d - 1)
    c[:, -1] = -companion[:-1]
    return eig_general(c).eigenvalues


def critical_companion(eigenvalues: Sequence[complex]) -> np.ndarray:
    """D (I - J/n) whose spectrum is the critical points of prod (z - x_j) plus 0."""
    x = np.asarray(eigenvalues, dtype=complex)
    n = x.size
    if n < 2:
        raise ContractViolation("critical_companion needs at least two eigenvalues")
    return x[:, None] * (np.eye(n) - 1.0 / n)
