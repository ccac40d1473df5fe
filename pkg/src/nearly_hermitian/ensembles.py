"""Seeded sampling of Wigner, GOE and sample covariance matrices."""
import logging
import math
from typing import NamedTuple

import numpy as np
import numpy.typing as npt

from .errors import ConfigurationError
from .models import (
    AtomSpec,
    EnsembleSpec,
    GaussianAtom,
    GOEFamily,
    RademacherAtom,
    SampleCovarianceFamily,
    SeedPlan,
    TwoPointAtom,
    UniformAtom,
    WignerFamily,
)

logger = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One step of the splitmix64 avalanche mix on a 64-bit word."""
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def stream_seed(seed: SeedPlan) -> int:
    """Per-trial stream seed = mix(master_seed, trial_index), then the stream tag."""
    s = splitmix64(seed.master_seed)
    s = splitmix64(s ^ seed.trial_index)
    return splitmix64(s ^ seed.stream)


def rng_for(seed: SeedPlan) -> np.random.Generator:
    """PCG64 generator for one (master seed, trial, stream) triple.

    Args:
        seed: Seed plan naming the stream

    Returns:
        A fresh generator; equal plans give identical draws
    """
    return np.random.Generator(np.random.PCG64(stream_seed(seed)))


def standard_normals(rng: np.random.Generator, size: int) -> np.ndarray:
    """Box-Muller normals; each uniform pair yields a cos/sin pair of outputs."""
    pairs = (size + 1) // 2
    u1 = 1.0 - rng.random(pairs)  # in (0, 1]
    u2 = rng.random(pairs)
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * math.pi * u2
    out = np.empty(2 * pairs)
    out[0::2] = radius * np.cos(angle)
    out[1::2] = radius * np.sin(angle)
    return out[:size]


# Atom variables

class AtomMoments(NamedTuple):
    mean: float
    variance: float
    third_central: float


def atom_moments(atom: AtomSpec) -> AtomMoments:
    """Analytic mean, variance and third central moment of an atom.

    Args:
        atom: Atom variable specification

    Returns:
        AtomMoments(mean, variance, third_central)

    Raises:
        ConfigurationError: If the atom kind is unknown
    """
    if isinstance(atom, GaussianAtom):
        return AtomMoments(atom.mean, atom.variance, 0.0)
    if isinstance(atom, RademacherAtom):
        return AtomMoments(0.0, 1.0, 0.0)
    if isinstance(atom, UniformAtom):
        return AtomMoments((atom.a + atom.b) / 2.0, (atom.b - atom.a) ** 2 / 12.0, 0.0)
    if isinstance(atom, TwoPointAtom):
        p, d = atom.p, atom.lo - atom.hi
        mean = p * atom.lo + (1.0 - p) * atom.hi
        return AtomMoments(mean, p * (1.0 - p) * d * d, p * (1.0 - p) * (1.0 - 2.0 * p) * d ** 3)
    raise ConfigurationError(f"Unknown atom kind: {atom!r}")


def is_absolutely_continuous(atom: AtomSpec) -> bool:
    if isinstance(atom, GaussianAtom):
        return atom.variance > 0.0
    return isinstance(atom, UniformAtom)


def nondegeneracy_margin(atom: AtomSpec) -> float:
    """Largest mu with P(atom = x) <= 1 - mu for every real x."""
    if isinstance(atom, RademacherAtom):
        return 0.5
    if isinstance(atom, TwoPointAtom):
        if atom.lo == atom.hi:
            return 0.0
        return 1.0 - max(atom.p, 1.0 - atom.p)
    if isinstance(atom, GaussianAtom) and atom.variance == 0.0:
        return 0.0
    return 1.0


def is_degenerate(atom: AtomSpec) -> bool:
    return nondegeneracy_margin(atom) <= 0.0


def satisfies_c0(offdiag: AtomSpec, diag: AtomSpec) -> bool:
    """Moment condition behind the Wigner outlier results, either branch.

    The sub-exponential tail constant is not checked: every shipped atom is
    bounded or Gaussian.
    """
    xi, zeta = atom_moments(offdiag), atom_moments(diag)
    if xi.mean != 0.0 or zeta.mean != 0.0:
        return False
    if math.isclose(xi.variance, 1.0) and math.isclose(zeta.variance, 1.0):
        return True
    return (
        math.isclose(xi.variance, 1.0)
        and math.isclose(zeta.variance, 2.0)
        and xi.third_central == 0.0
        and zeta.third_central == 0.0
    )


def satisfies_c1(atom: AtomSpec) -> bool:
    """Mean zero and unit variance; all shipped atoms have finite moments."""
    moments = atom_moments(atom)
    return moments.mean == 0.0 and math.isclose(moments.variance, 1.0)


def sample_atom(atom: AtomSpec, rng: np.random.Generator, size: int) -> np.ndarray:
    """``size`` independent draws of the atom from ``rng``."""
    if isinstance(atom, GaussianAtom):
        return atom.mean + math.sqrt(atom.variance) * standard_normals(rng, size)
    if isinstance(atom, RademacherAtom):
        return np.where(rng.random(size) < 0.5, -1.0, 1.0)
    if isinstance(atom, UniformAtom):
        return atom.a + (atom.b - atom.a) * rng.random(size)
    if isinstance(atom, TwoPointAtom):
        return np.where(rng.random(size) < atom.p, atom.lo, atom.hi)
    raise ConfigurationError(f"Unknown atom kind: {atom!r}")


# Ensembles

def wigner_family(spec: EnsembleSpec) -> WignerFamily:
    if isinstance(spec.family, GOEFamily):
        return spec.family.as_wigner()
    if isinstance(spec.family, WignerFamily):
        return spec.family
    raise ConfigurationError(f"Ensemble family {spec.family.kind!r} is not a Wigner family")


def _scale(spec: EnsembleSpec, m: int = 0) -> float:
    n = spec.n
    if spec.normalization == "raw":
        return 1.0
    if spec.normalization == "one_over_sqrt_n":
        return 1.0 / math.sqrt(n)
    if spec.normalization == "one_over_n":
        return 1.0 / n
    if m <= 0:
        raise ConfigurationError("Normalization one_over_sqrt_mn needs a sample covariance ensemble")
    return 1.0 / math.sqrt(m * n)


def sample_wigner(spec: EnsembleSpec, seed: SeedPlan) -> npt.NDArray[np.float64]:
    """Draw a real symmetric Wigner matrix.

    Entries above the diagonal are drawn first in row-major order, then the
    diagonal; the lower triangle is a copy of the upper one.

    Args:
        spec: Ensemble description with a wigner or goe family
        seed: Stream address of the draw

    Returns:
        Scaled n x n real symmetric matrix

    Raises:
        ConfigurationError: If the family is not Wigner or the off-diagonal
            atom has no variance
    """
    family = wigner_family(spec)
    if atom_moments(family.offdiag).variance <= 0.0:
        raise ConfigurationError("Off-diagonal atom must have positive variance")
    n = spec.n
    rng = rng_for(seed)
    rows, cols = np.triu_indices(n, k=1)
    w = np.zeros((n, n))
    w[rows, cols] = sample_atom(family.offdiag, rng, rows.size)
    w[cols, rows] = w[rows, cols]
    w[np.diag_indices(n)] = sample_atom(family.diag, rng, n)
    return w * _scale(spec)


def sample_covariance(spec: EnsembleSpec, seed: SeedPlan) -> npt.NDArray[np.float64]:
    """Draw S = X^T X for an m x n matrix X of iid atoms, scaled by the ensemble normalization."""
    family = spec.family
    if not isinstance(family, SampleCovarianceFamily):
        raise ConfigurationError(f"Ensemble family {family.kind!r} is not sample_covariance")
    m, n = family.m, spec.n
    rng = rng_for(seed)
    x = sample_atom(family.atom, rng, m * n).reshape(m, n)
    s = x.T @ x
    upper = np.triu(s)
    s = upper + np.triu(upper, k=1).T
    return s * _scale(spec, m)


def sample_matrix(spec: EnsembleSpec, seed: SeedPlan) -> npt.NDArray[np.float64]:
    """Real symmetric draw of the ensemble, Wigner or sample covariance.

    Args:
        spec: Validated ensemble specification
        seed: Seed plan for the matrix stream

    Returns:
        n x n real symmetric matrix scaled by the ensemble normalization
    """
    if isinstance(spec.family, SampleCovarianceFamily):
        return sample_covariance(spec, seed)
    return sample_wigner(spec, seed)


def sample_unit_sphere(n: int, field: str, seed: SeedPlan) -> np.ndarray:
    """Uniform unit vector in R^n or C^n as a normalized Gaussian vector."""
    if n < 1:
        raise ConfigurationError("Unit vector dimension must be positive")
    rng = rng_for(seed)
    if field == "real":
        q = standard_normals(rng, n)
    elif field == "complex":
        g = standard_normals(rng, 2 * n)
        q = (g[:n] + 1j * g[n:]) / math.sqrt(2.0)
    else:
        raise ConfigurationError(f"Unknown field {field!r}")
    return q / np.linalg.norm(q)
