"""Perturbation inequalities and multiset matching of spectra."""
import logging
import math
from dataclasses import asdict, dataclass
from typing import Callable, Dict, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial import ConvexHull, QhullError

from . import config
from .errors import ContractViolation
from .linalg_core import as_matrix, eig_general, eig_hermitian, frobenius_norm, re_im_parts, spectral_norm

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MatchResult:
    """Optimal assignment: row i is matched to column permutation[i]."""
    permutation: np.ndarray
    total_cost: float
    pair_costs: np.ndarray


@dataclass(frozen=True)
class BoundReport:
    lhs: float
    rhs: float
    satisfied: bool
    slack: float

    @classmethod
    def compare(cls, lhs: float, rhs: float) -> "BoundReport":
        satisfied = lhs <= rhs + config.BOUND_SLACK * (1.0 + rhs)
        return cls(float(lhs), float(rhs), bool(satisfied), float(rhs - lhs))

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


def min_cost_assignment(cost) -> MatchResult:
    """Minimum-cost perfect matching (Hungarian method).

    Raises:
        ContractViolation: If the matrix is not square, has NaN or negative entries
    """
    cost = np.asarray(cost, dtype=float)
    if cost.ndim != 2 or cost.shape[0] != cost.shape[1]:
        raise ContractViolation(f"Assignment cost must be square, got shape {cost.shape}")
    if np.any(np.isnan(cost)) or not np.all(np.isfinite(cost)):
        raise ContractViolation("Assignment cost has NaN or infinite entries")
    if np.any(cost < 0):
        raise ContractViolation("Assignment cost must be non-negative")
    rows, cols = linear_sum_assignment(cost)
    permutation = np.empty(cost.shape[0], dtype=int)
    permutation[rows] = cols
    pair_costs = cost[np.arange(cost.shape[0]), permutation]
    return MatchResult(permutation, float(np.sum(pair_costs)), pair_costs)


def match_spectra(first, second, power: int = 1) -> MatchResult:
    """Match two multisets of complex numbers on |a_i - b_j|^power."""
    first = np.asarray(first, dtype=complex).ravel()
    second = np.asarray(second, dtype=complex).ravel()
    if first.size != second.size:
        raise ContractViolation(f"Cannot match multisets of sizes {first.size} and {second.size}")
    return min_cost_assignment(np.abs(first[:, None] - second[None, :]) ** power)


def match_into(points, targets) -> MatchResult:
    """Match each point to a distinct target, minimizing the summed distance.

    The cost matrix is padded with zero-cost rows so the square assignment
    leaves the unused targets free.

    Args:
        points: k complex numbers
        targets: At least k complex numbers

    Returns:
        MatchResult of length k; permutation[i] indexes into targets

    Raises:
        ContractViolation: If there are more points than targets
    """
    points = np.asarray(points, dtype=complex).ravel()
    targets = np.asarray(targets, dtype=complex).ravel()
    if points.size > targets.size:
        raise ContractViolation(f"Cannot match {points.size} points into {targets.size} targets")
    cost = np.zeros((targets.size, targets.size))
    cost[: points.size] = np.abs(points[:, None] - targets[None, :])
    full = min_cost_assignment(cost)
    pair_costs = full.pair_costs[: points.size]
    return MatchResult(full.permutation[: points.size], float(np.sum(pair_costs)), pair_costs)


def _require_hermitian(a, name: str) -> np.ndarray:
    a = as_matrix(a)
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    if np.max(np.abs(a - a.conj().T), initial=0.0) > config.HERMITIAN_TOL * scale:
        raise ContractViolation(f"{name} must be Hermitian")
    return a


def hoffman_wielandt_check(m, p) -> BoundReport:
    """min over permutations of sum |lambda_pi(j)(M) - lambda_j(M+P)|^2 <= ||P||_2^2."""
    m = _require_hermitian(m, "M")
    p = _require_hermitian(p, "P")
    if m.shape != p.shape:
        raise ContractViolation(f"M {m.shape} and P {p.shape} differ in size")
    before = eig_hermitian(m, vectors=False).eigenvalues
    after = eig_hermitian(m + p, vectors=False).eigenvalues
    return BoundReport.compare(match_spectra(before, after, power=2).total_cost, frobenius_norm(p) ** 2)


def paired_order(values) -> np.ndarray:
    """Descending real part, ties broken by descending imaginary part."""
    values = np.asarray(values, dtype=complex)
    return values[np.lexsort((-values.imag, -values.real))]


def kahan_check(m, p) -> Tuple[BoundReport, BoundReport, BoundReport]:
    """Kahan's three bounds for Hermitian M and arbitrary P.

    Returns:
        (sup |nu_k| <= ||Im P||, sum nu_k^2 <= ||Im P||_2^2,
         sum |(mu_k + i nu_k) - lambda_k|^2 <= 2 ||P||_2^2) with both spectra
        in paired order
    """
    m = _require_hermitian(m, "M")
    p = as_matrix(p)
    if m.shape != p.shape:
        raise ContractViolation(f"M {m.shape} and P {p.shape} differ in size")
    lam = eig_hermitian(m, vectors=False).eigenvalues
    if np.array_equal(p, p.conj().T):
        perturbed = paired_order(eig_hermitian(m + p, vectors=False).eigenvalues)
    else:
        perturbed = paired_order(eig_general(m + p).eigenvalues)
    _, im_p = re_im_parts(p)
    nu = perturbed.imag
    sup_report = BoundReport.compare(np.max(np.abs(nu), initial=0.0), spectral_norm(im_p))
    sum_report = BoundReport.compare(np.sum(nu ** 2), frobenius_norm(im_p) ** 2)
    pair_report = BoundReport.compare(np.sum(np.abs(perturbed - lam) ** 2), 2.0 * frobenius_norm(p) ** 2)
    return sup_report, sum_report, pair_report


def sun_check(m, p) -> BoundReport:
    """Sun's bound n ||P||_2^2 for normal M and arbitrary P.

    Raises:
        ContractViolation: If M is not normal within tolerance
    """
    m = as_matrix(m)
    p = as_matrix(p)
    if m.shape != p.shape:
        raise ContractViolation(f"M {m.shape} and P {p.shape} differ in size")
    commutator = m @ m.conj().T - m.conj().T @ m
    if frobenius_norm(commutator) > config.NORMALITY_TOL * frobenius_norm(m) ** 2:
        raise ContractViolation("sun_check requires a normal matrix M")
    before = eig_general(m).eigenvalues
    after = eig_general(m + p).eigenvalues
    n = m.shape[0]
    return BoundReport.compare(match_spectra(before, after, power=2).total_cost, n * frobenius_norm(p) ** 2)


def _evaluate_cdf(cdf: Callable, points: np.ndarray) -> np.ndarray:
    values = np.asarray(cdf(points), dtype=float)
    if values.shape != points.shape:
        values = np.array([float(cdf(x)) for x in points])
    return values


def kolmogorov_distance(samples, cdf: Callable) -> float:
    """sup_x |F_emp(x) - cdf(x)|, checked on both sides of every sample point."""
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    if x.size == 0:
        raise ContractViolation("kolmogorov_distance needs at least one sample")
    points = np.unique(x)
    n = x.size
    right = np.searchsorted(x, points, side="right") / n
    left = np.searchsorted(x, points, side="left") / n
    at = _evaluate_cdf(cdf, points)
    before = _evaluate_cdf(cdf, np.nextafter(points, -np.inf))
    return float(max(np.max(np.abs(right - at)), np.max(np.abs(left - before))))


def lipschitz_shift_check(m, p, clip: float = 3.0) -> BoundReport:
    """Shift of the spectral average of f(z) = clip(Re z) under M -> M + P.

    The bound sqrt(2) Lip(f) ||P||_2 / sqrt(n) holds for Hermitian M and
    any P; here Lip(f) = 1.
    """
    m = _require_hermitian(m, "M")
    p = as_matrix(p)
    n = m.shape[0]

    def f(values: np.ndarray) -> np.ndarray:
        return np.clip(np.real(values), -clip, clip)

    before = eig_hermitian(m, vectors=False).eigenvalues
    after = eig_general(m + p).eigenvalues
    lhs = abs(np.mean(f(before)) - np.mean(f(after)))
    return BoundReport.compare(lhs, math.sqrt(2.0) * frobenius_norm(p) / math.sqrt(n))


def gauss_lucas_check(roots, critical, tol: float = 1e-8) -> BoundReport:
    """Critical points lie in the convex hull of the roots.

    lhs is the largest distance of a critical point outside the hull.
    """
    roots = np.asarray(roots, dtype=complex).ravel()
    critical = np.asarray(critical, dtype=complex).ravel()
    scale = max(1.0, float(np.max(np.abs(roots), initial=0.0)))
    if np.ptp(roots.imag) <= tol * scale:
        lo, hi = roots.real.min(), roots.real.max()
        centre = roots.imag.mean()
        dx = np.maximum.reduce([lo - critical.real, np.zeros(critical.size), critical.real - hi])
        outside = float(np.max(np.hypot(dx, critical.imag - centre), initial=0.0))
    else:
        points = np.column_stack([roots.real, roots.imag])
        try:
            hull = ConvexHull(points)
        except QhullError:
            hull = ConvexHull(points, qhull_options="QJ")
        query = np.column_stack([critical.real, critical.imag])
        signed = query @ hull.equations[:, :2].T + hull.equations[:, 2]
        outside = float(max(0.0, np.max(signed, initial=0.0)))
    return BoundReport.compare(outside, tol * scale)
