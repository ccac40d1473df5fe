"""Low-rank perturbations and the all-nonreal constructions."""
import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from . import config
from .errors import ConfigurationError, PreconditionError
from .linalg_core import as_matrix, det, eig_general, eig_hermitian, spectral_norm
from .models import (
    CornerEntryPerturbation,
    DiagonalPerturbation,
    LowRankPerturbation,
    PerturbationSpec,
    RankOnePerturbation,
)

logger = logging.getLogger(__name__)


def _index(i: int, n: int, what: str) -> int:
    if not -n <= i < n:
        raise ConfigurationError(f"{what} index {i} out of range for n={n}")
    return i % n


def factors(spec: PerturbationSpec, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Factor P = A B with A of shape n x k and B of shape k x n.

    Raises:
        ConfigurationError: If the declared vectors or factors do not fit n
    """
    if isinstance(spec, DiagonalPerturbation):
        values = np.asarray(spec.values, dtype=complex)
        if values.size > n:
            raise ConfigurationError(f"Diagonal perturbation has {values.size} entries for n={n}")
        support = np.flatnonzero(values)
        a = np.zeros((n, support.size), dtype=complex)
        b = np.zeros((support.size, n), dtype=complex)
        a[support, np.arange(support.size)] = values[support]
        b[np.arange(support.size), support] = 1.0
        return a, b
    if isinstance(spec, RankOnePerturbation):
        u = np.asarray(spec.u, dtype=complex)
        v = np.asarray(spec.v, dtype=complex)
        if u.size != n or v.size != n:
            raise ConfigurationError(f"rank_one vectors of length {u.size}, {v.size} for n={n}")
        return (spec.theta * u)[:, None], v.conj()[None, :]
    if isinstance(spec, LowRankPerturbation):
        a = np.asarray(spec.A, dtype=complex)
        b = np.asarray(spec.B, dtype=complex)
        if a.ndim != 2 or b.ndim != 2 or a.shape[0] != n or b.shape != (a.shape[1], n):
            raise ConfigurationError(f"Factors of shape {a.shape}, {b.shape} do not fit n={n}")
        return a, b
    if isinstance(spec, CornerEntryPerturbation):
        row = _index(spec.position[0], n, "Row")
        col = _index(spec.position[1], n, "Column")
        a = np.zeros((n, 1), dtype=complex)
        b = np.zeros((1, n), dtype=complex)
        a[row, 0] = spec.value
        b[0, col] = 1.0
        return a, b
    raise ConfigurationError(f"Unknown perturbation kind: {spec!r}")


def build(spec: PerturbationSpec, n: int) -> np.ndarray:
    """Dense n x n realization of P.

    Args:
        spec: Perturbation specification
        n: Matrix dimension

    Returns:
        The complex matrix A B built from the low-rank factors

    Raises:
        ConfigurationError: If an index in the spec is outside -n..n-1
    """
    a, b = factors(spec, n)
    return a @ b


def apply(m, spec: PerturbationSpec) -> np.ndarray:
    """M + P (additive) or M (I + P) (multiplicative) via column operations.

    Args:
        m: Square matrix to perturb
        spec: Perturbation specification; its mode picks the composition

    Returns:
        A new matrix; ``m`` is left untouched
    """
    m = as_matrix(m)
    a, b = factors(spec, m.shape[0])
    if a.shape[1] == 0:
        return m.copy()
    if spec.mode == "multiplicative":
        a = m @ a
    return m + a @ b


def eigenvalues(spec: PerturbationSpec, n: int) -> np.ndarray:
    """Nonzero part of the spectrum of P, read off the k x k matrix B A."""
    a, b = factors(spec, n)
    if a.shape[1] == 0:
        return np.zeros(0, dtype=complex)
    values = eig_general(b @ a).eigenvalues
    return values[np.abs(values) > 0]


def rank(spec: PerturbationSpec, n: int) -> int:
    """Numerical rank of P."""
    a, b = factors(spec, n)
    if a.shape[1] == 0:
        return 0
    return int(np.linalg.matrix_rank(a @ b))


def imaginary_diagonal_entry(spec: PerturbationSpec, n: int) -> Tuple[int, float]:
    """(position, gamma) when P = i gamma e_j e_j^*, otherwise a configuration error."""
    a, b = factors(spec, n)
    p = a @ b
    nonzero = np.argwhere(p != 0)
    if len(nonzero) != 1 or nonzero[0][0] != nonzero[0][1]:
        raise ConfigurationError("Perturbation must have exactly one nonzero diagonal entry")
    j = int(nonzero[0][0])
    value = p[j, j]
    if value.real != 0.0:
        raise ConfigurationError(f"Diagonal entry {value} is not purely imaginary")
    return j, float(value.imag)


def _canonical_phase(vectors: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude coordinate of each column positive real."""
    idx = np.argmax(np.abs(vectors), axis=0)
    pivots = vectors[idx, np.arange(vectors.shape[1])]
    return vectors * (np.abs(pivots) / pivots)


def construct_nonreal_vector(
    m,
    k: int,
    z: Optional[Sequence[complex]] = None,
    a: Optional[Sequence[float]] = None,
    indices: Optional[Sequence[int]] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """Vectors (u, v) such that M + i u v^* has exactly k nonreal eigenvalues.

    With w_j the unit eigenvectors of the k selected eigenvalues,
    v = sum z_j w_j and u = sum a_j z_j w_j. The remaining n - k eigenvalues
    of M are shared with M + i u v^*; the k new ones lie in the half-plane of
    sign(a).

    Args:
        m: Hermitian matrix
        k: Number of selected eigenvalues
        z: Nonzero mixing coefficients (default all ones)
        a: Weights of one strict sign (default all ones)
        indices: Positions in the descending spectrum (default the top k)

    Returns:
        Tuple (u, v)

    Raises:
        PreconditionError: If selected eigenvalues repeat, some z_j is zero or
            the a_j do not share a strict sign
    """
    spectrum = eig_hermitian(m)
    n = spectrum.eigenvalues.size
    if not 1 <= k <= n:
        raise PreconditionError(f"k={k} must lie in [1, {n}]")
    selected = np.arange(k) if indices is None else np.asarray(indices, dtype=int)
    if selected.size != k or len(set(selected.tolist())) != k:
        raise PreconditionError("indices must name k distinct eigenvalues")
    z = np.ones(k, dtype=complex) if z is None else np.asarray(z, dtype=complex)
    a = np.ones(k) if a is None else np.asarray(a, dtype=float)
    if z.size != k or a.size != k:
        raise PreconditionError(f"z and a need {k} entries, got {z.size} and {a.size}")
    if np.any(z == 0):
        raise PreconditionError("Mixing coefficients z_j must be nonzero")
    if not (np.all(a > 0) or np.all(a < 0)):
        raise PreconditionError("Weights a_j must all share one strict sign")

    values = spectrum.eigenvalues[selected]
    gap = config.DISTINCT_GAP * max(spectrum_norm(spectrum.eigenvalues), np.finfo(float).tiny)
    if k > 1:
        diffs = np.abs(values[:, None] - values[None, :]) + np.eye(k) * np.inf
        if np.min(diffs) <= gap:
            raise PreconditionError("Selected eigenvalues are not distinct")

    w = _canonical_phase(spectrum.eigenvectors[:, selected].astype(complex))
    v = w @ z
    u = w @ (a * z)
    return u, v


def spectrum_norm(values: np.ndarray) -> float:
    return float(np.max(np.abs(values))) if values.size else 0.0


def bordered_determinant_gap(m, gamma: float, z: complex) -> Tuple[complex, complex]:
    """Both sides of det(M + P - zI) = det(M - zI) + i gamma det(B - zI).

    P = diag(0, ..., 0, i gamma) and B is the leading (n-1) x (n-1) minor of M.
    """
    m = as_matrix(m)
    n = m.shape[0]
    p = np.zeros((n, n), dtype=complex)
    p[-1, -1] = 1j * gamma
    eye = np.eye(n)
    lhs = det(m + p - z * eye)
    rhs = det(m - z * eye) + 1j * gamma * det(m[:-1, :-1] - z * eye[:-1, :-1])
    return lhs, rhs


def toeplitz_example(n: int) -> Tuple[np.ndarray, CornerEntryPerturbation]:
    """Tridiagonal Toeplitz matrix with ones off the diagonal, and P with (1, n)-entry i."""
    if n < 2:
        raise ConfigurationError("Toeplitz example needs n >= 2")
    t = np.eye(n, k=1) + np.eye(n, k=-1)
    return t, CornerEntryPerturbation(position=(0, n - 1), value=1j)


def norms(spec: PerturbationSpec, n: int) -> Tuple[float, float]:
    """(spectral, Frobenius) norm of P from the k x k core of its thin QR factors."""
    a, b = factors(spec, n)
    if a.shape[1] == 0:
        return 0.0, 0.0
    _, ra = np.linalg.qr(a)
    _, rb = np.linalg.qr(b.conj().T)
    core = ra @ rb.conj().T
    return spectral_norm(core), float(np.linalg.norm(core))
