"""Limiting laws, Stieltjes transforms, spectral regions and predictions."""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple, Union

import numpy as np
from scipy import integrate

from . import config
from .errors import ConfigurationError, DomainError

logger = logging.getLogger(__name__)

ArrayLike = Union[complex, float, np.ndarray]


def _scalar_or_array(values: np.ndarray, like) -> ArrayLike:
    if np.ndim(like) == 0:
        return values.item()
    return values


def segment_distance(z: ArrayLike, lo: float, hi: float) -> ArrayLike:
    """Euclidean distance from z to the real segment [lo, hi]."""
    z_arr = np.asarray(z, dtype=complex)
    dx = np.maximum.reduce([lo - z_arr.real, np.zeros(z_arr.shape), z_arr.real - hi])
    return _scalar_or_array(np.hypot(dx, z_arr.imag), z)


# Densities and distribution functions

def semicircle_density(x: ArrayLike) -> ArrayLike:
    """sqrt(4 - x^2) / (2 pi) on [-2, 2], zero elsewhere."""
    x_arr = np.asarray(x, dtype=float)
    inside = np.abs(x_arr) <= 2.0
    values = np.where(inside, np.sqrt(np.clip(4.0 - x_arr ** 2, 0.0, None)) / (2.0 * math.pi), 0.0)
    return _scalar_or_array(values, x)


def semicircle_cdf(x: ArrayLike) -> ArrayLike:
    x_arr = np.clip(np.asarray(x, dtype=float), -2.0, 2.0)
    values = 0.5 + (x_arr * np.sqrt(4.0 - x_arr ** 2) + 4.0 * np.arcsin(x_arr / 2.0)) / (4.0 * math.pi)
    return _scalar_or_array(np.clip(values, 0.0, 1.0), x)


def mp_support(y: float = 1.0) -> Tuple[float, float]:
    """(lambda_-, lambda_+) of the Marchenko-Pastur law with ratio y."""
    if y <= 0:
        raise DomainError(f"Marchenko-Pastur ratio must be positive, got {y}")
    root = math.sqrt(y)
    return root * (1.0 - 1.0 / root) ** 2, root * (1.0 + 1.0 / root) ** 2


def mp_point_mass(y: float = 1.0) -> float:
    """Mass at the origin, reported separately from the density."""
    return max(0.0, 1.0 - y)


def mp_density(x: ArrayLike, y: float = 1.0) -> ArrayLike:
    lo, hi = mp_support(y)
    x_arr = np.asarray(x, dtype=float)
    inside = (x_arr > 0.0) & (x_arr >= lo) & (x_arr <= hi)
    safe = np.where(inside, x_arr, 1.0)
    body = math.sqrt(y) / (2.0 * math.pi * safe) * np.sqrt(np.clip((safe - lo) * (hi - safe), 0.0, None))
    return _scalar_or_array(np.where(inside, body, 0.0), x)


def _mp_cdf_scalar(x: float, y: float) -> float:
    if x < 0.0:
        return 0.0
    lo, hi = mp_support(y)
    if y == 1.0:
        if x >= 4.0:
            return 1.0
        phi = math.acos(1.0 - x / 2.0)
        return (phi + math.sin(phi)) / math.pi
    mass = mp_point_mass(y)
    if x <= lo:
        return mass
    centre, half = (hi + lo) / 2.0, (hi - lo) / 2.0
    upper = math.pi if x >= hi else math.acos((centre - x) / half)
    scale = math.sqrt(y) * half ** 2 / (2.0 * math.pi)
    body, _ = integrate.quad(
        lambda phi: scale * math.sin(phi) ** 2 / (centre - half * math.cos(phi)),
        0.0,
        upper,
        epsabs=config.QUAD_EPSABS,
        epsrel=config.QUAD_EPSREL,
        limit=config.QUAD_LIMIT,
    )
    return min(1.0, mass + body)


def mp_cdf(x: ArrayLike, y: float = 1.0) -> ArrayLike:
    """Distribution function including the point mass at 0 when y < 1."""
    x_arr = np.asarray(x, dtype=float)
    values = np.array([_mp_cdf_scalar(float(v), y) for v in x_arr.ravel()]).reshape(x_arr.shape)
    return _scalar_or_array(values, x)


# Quadrature against the limiting laws

def _quad_complex(g: Callable[[float], complex], a: float, b: float) -> complex:
    options = dict(epsabs=config.QUAD_EPSABS, epsrel=config.QUAD_EPSREL, limit=config.QUAD_LIMIT)
    re, _ = integrate.quad(lambda t: complex(g(t)).real, a, b, **options)
    im, _ = integrate.quad(lambda t: complex(g(t)).imag, a, b, **options)
    return complex(re, im)


def integrate_semicircle(f: Callable[[float], complex]) -> complex:
    """Integral of f against the semicircle density, with x = 2 cos(phi)."""
    return _quad_complex(lambda phi: 2.0 / math.pi * math.sin(phi) ** 2 * f(2.0 * math.cos(phi)), 0.0, math.pi)


def integrate_mp(f: Callable[[float], complex]) -> complex:
    """Integral of f against the y = 1 Marchenko-Pastur density, with x = 4 sin^2(phi/2)."""
    return _quad_complex(lambda phi: (1.0 + math.cos(phi)) / math.pi * f(2.0 - 2.0 * math.cos(phi)), 0.0, math.pi)


# Stieltjes transforms

def _small_root(w: np.ndarray) -> np.ndarray:
    """Root of t^2 + w t + 1 = 0 with |t| <= 1, from the larger root."""
    s = np.sqrt(w * w - 4.0)
    plus, minus = (-w + s) / 2.0, (-w - s) / 2.0
    big = np.where(np.abs(plus) >= np.abs(minus), plus, minus)
    return 1.0 / big


def m_sc(z: ArrayLike) -> ArrayLike:
    """Stieltjes transform of the semicircle law, the |m| <= 1 root of m^2 + z m + 1.

    Raises:
        DomainError: If z is within the branch-cut tolerance of [-2, 2]
    """
    z_arr = np.asarray(z, dtype=complex)
    if np.any(np.asarray(segment_distance(z_arr, -2.0, 2.0)) <= config.BRANCH_CUT_TOL):
        raise DomainError(f"m_sc is not defined on the cut [-2, 2] (z={z})")
    return _scalar_or_array(_small_root(z_arr), z)


def m_mp(z: ArrayLike) -> ArrayLike:
    """Stieltjes transform of the y = 1 Marchenko-Pastur law.

    The root of z m^2 + z m + 1 with |1 + z m| <= 1; since t = 1 + z m solves
    t^2 + (z - 2) t + 1 = 0, the branch is the same certificate as m_sc at z - 2.

    Raises:
        DomainError: If z is within the branch-cut tolerance of [0, 4]
    """
    z_arr = np.asarray(z, dtype=complex)
    if np.any(np.asarray(segment_distance(z_arr, 0.0, 4.0)) <= config.BRANCH_CUT_TOL):
        raise DomainError(f"m_mp is not defined on the cut [0, 4] (z={z})")
    t = _small_root(z_arr - 2.0)
    return _scalar_or_array((t - 1.0) / z_arr, z)


def mp_outlier_equation(z: complex, lam: complex) -> complex:
    """1 + (1 + z m_mp(z)) lambda, which vanishes at z = lambda (1 + 1/lambda)^2."""
    return 1.0 + (1.0 + z * m_mp(z)) * lam


# Regions

@dataclass(frozen=True)
class Region:
    """A subset of the complex plane used to separate bulk and outliers."""
    kind: str
    size: float

    @classmethod
    def semicircle_nbhd(cls, delta: float) -> "Region":
        return cls("semicircle_nbhd", delta)

    @classmethod
    def mp_nbhd(cls, delta: float) -> "Region":
        return cls("mp_nbhd", delta)

    @classmethod
    def ellipse(cls, r: float) -> "Region":
        if r <= 1.0:
            raise ConfigurationError(f"Ellipse parameter must exceed 1, got {r}")
        return cls("ellipse", r)

    @classmethod
    def half_plane(cls, sign: int) -> "Region":
        if sign not in (1, -1):
            raise ConfigurationError(f"Half-plane sign must be +1 or -1, got {sign}")
        return cls("half_plane", float(sign))

    @classmethod
    def disk(cls, radius: float) -> "Region":
        return cls("disk", radius)


def ellipse_level(r: float, z: ArrayLike) -> ArrayLike:
    """Normalized quadratic form of E_r; equal to 1 on the boundary."""
    if r <= 1.0:
        raise ConfigurationError(f"Ellipse parameter must exceed 1, got {r}")
    z_arr = np.asarray(z, dtype=complex)
    level = (z_arr.real / (r + 1.0 / r)) ** 2 + (z_arr.imag / (r - 1.0 / r)) ** 2
    return _scalar_or_array(level, z)


def region_contains(region: Region, z: ArrayLike) -> Union[bool, np.ndarray]:
    """Membership of z in a region, closed except for half planes.

    Args:
        region: Region to test against
        z: Complex scalar or array

    Returns:
        bool for a scalar z, boolean array otherwise

    Raises:
        ConfigurationError: If the region kind is unknown
    """
    z_arr = np.asarray(z, dtype=complex)
    if region.kind == "semicircle_nbhd":
        inside = np.asarray(segment_distance(z_arr, -2.0, 2.0)) <= region.size
    elif region.kind == "mp_nbhd":
        inside = np.asarray(segment_distance(z_arr, 0.0, 4.0)) <= region.size
    elif region.kind == "ellipse":
        inside = np.asarray(ellipse_level(region.size, z_arr)) <= 1.0 + 1e-12
    elif region.kind == "half_plane":
        inside = region.size * z_arr.imag > 0.0
    elif region.kind == "disk":
        inside = np.abs(z_arr) <= region.size
    else:
        raise ConfigurationError(f"Unknown region kind {region.kind!r}")
    return bool(inside) if np.ndim(z) == 0 else inside


def ellipse_segment_distance(r: float, samples: int = 4097) -> float:
    """Distance from the boundary of E_r to [-2, 2], on a dense parametrization."""
    theta = np.linspace(0.0, math.pi / 2.0, samples)
    boundary = (r + 1.0 / r) * np.cos(theta) + 1j * (r - 1.0 / r) * np.sin(theta)
    return float(np.min(segment_distance(boundary, -2.0, 2.0)))


def delta_prime(delta: float) -> float:
    """Bulk neighborhood radius delta^2 / (2 (1 + delta)) for a delta-gap around |lambda| = 1.

    Raises:
        ConfigurationError: If delta is not positive
        DomainError: If the value fails the ellipse-distance certificate
    """
    if delta <= 0:
        raise ConfigurationError(f"delta must be positive, got {delta}")
    value = delta ** 2 / (2.0 * (1.0 + delta))
    if not value < ellipse_segment_distance(1.0 + delta):
        raise DomainError(f"delta'={value} does not separate E_(1+delta) from [-2, 2]")
    return value


# Predictions

@dataclass(frozen=True)
class Prediction:
    value: complex
    source: str
    inputs: Tuple[complex, ...] = field(default_factory=tuple)


def outlier_wigner(lam: complex) -> Optional[Prediction]:
    """lambda + 1/lambda for |lambda| > 1; None when lambda creates no outlier."""
    lam = complex(lam)
    if abs(lam) <= 1.0:
        return None
    return Prediction(lam + 1.0 / lam, "wigner_additive", (lam,))


def outlier_mp(lam: complex) -> Optional[Prediction]:
    """lambda (1 + 1/lambda)^2 = 2 + lambda + 1/lambda for |lambda| > 1."""
    lam = complex(lam)
    if abs(lam) <= 1.0:
        return None
    return Prediction(2.0 + lam + 1.0 / lam, "mp_multiplicative", (lam,))


def overlap_wigner(theta: complex) -> Prediction:
    """Limit of |u^* v|^2 for the outlier eigenvector of W/sqrt(n) + theta u u^*.

    Raises:
        DomainError: If |theta| <= 1
    """
    theta = complex(theta)
    if abs(theta) <= 1.0:
        raise DomainError(f"Overlap needs |theta| > 1, got {theta}")
    shifted = theta + 1.0 / theta
    numerator = abs(m_sc(shifted)) ** 2
    denominator = integrate_semicircle(lambda x: 1.0 / abs(x - shifted) ** 2).real
    return Prediction(numerator / denominator, "overlap_wigner", (theta,))


def overlap_mp(theta: complex) -> Prediction:
    """Limit of |u^* v|^2 for the outlier eigenvector of S/n (I + theta u u^*).

    Raises:
        DomainError: If |theta| <= 1
    """
    theta = complex(theta)
    if abs(theta) <= 1.0:
        raise DomainError(f"Overlap needs |theta| > 1, got {theta}")
    hat = theta * (1.0 + 1.0 / theta) ** 2
    numerator = abs(integrate_mp(lambda x: x / (x - hat))) ** 2
    denominator = integrate_mp(lambda x: x * x / abs(x - hat) ** 2).real
    return Prediction(numerator / denominator, "overlap_mp", (theta,))
