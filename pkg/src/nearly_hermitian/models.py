"""Data models for experiment configuration and reports."""
import math
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, NamedTuple, Optional, Set, Tuple, Union

from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    PlainSerializer,
    model_validator,
)

from . import config


def coerce_complex(value: Any) -> complex:
    """Accept a number, a ``[re, im]`` pair or a complex literal string."""
    if isinstance(value, bool):
        raise ValueError("booleans are not complex numbers")
    if isinstance(value, (int, float, complex)):
        result = complex(value)
    elif isinstance(value, (list, tuple)) and len(value) == 2:
        re, im = value
        if isinstance(re, bool) or isinstance(im, bool):
            raise ValueError("booleans are not complex numbers")
        result = complex(float(re), float(im))
    elif isinstance(value, str):
        try:
            result = complex(value.replace(" ", ""))
        except ValueError:
            raise ValueError(f"cannot parse complex number from {value!r}")
    else:
        raise ValueError(f"expected a complex number, got {type(value).__name__}")
    if not (math.isfinite(result.real) and math.isfinite(result.imag)):
        raise ValueError("complex value must be finite")
    return result


def complex_to_pair(value: complex) -> List[float]:
    return [value.real, value.imag]


ComplexValue = Annotated[
    Any,
    BeforeValidator(coerce_complex),
    PlainSerializer(complex_to_pair, return_type=List[float]),
]


class StrictModel(BaseModel):
    """Base model rejecting unknown keys."""
    model_config = ConfigDict(extra="forbid")


# Atom variables

class GaussianAtom(StrictModel):
    """Normal atom variable."""
    kind: Literal["gaussian"] = "gaussian"
    mean: float = Field(0.0, description="Mean of the atom")
    variance: float = Field(1.0, ge=0.0, description="Variance of the atom")


class RademacherAtom(StrictModel):
    """Symmetric +-1 atom variable."""
    kind: Literal["rademacher"] = "rademacher"


class UniformAtom(StrictModel):
    """Uniform atom on [a, b]; the default has mean 0 and unit variance."""
    kind: Literal["uniform"] = "uniform"
    a: float = Field(-math.sqrt(3.0), description="Lower end of the support")
    b: float = Field(math.sqrt(3.0), description="Upper end of the support")

    @model_validator(mode="after")
    def check_interval(self) -> "UniformAtom":
        if not self.a < self.b:
            raise ValueError("uniform atom requires a < b")
        return self


class TwoPointAtom(StrictModel):
    """Atom equal to ``lo`` with probability ``p`` and to ``hi`` otherwise."""
    kind: Literal["two_point"] = "two_point"
    p: float = Field(..., ge=0.0, le=1.0, description="Probability of the value lo")
    lo: float = Field(..., description="First value")
    hi: float = Field(..., description="Second value")


AtomSpec = Annotated[
    Union[GaussianAtom, RademacherAtom, UniformAtom, TwoPointAtom],
    Field(discriminator="kind"),
]


# Ensembles

Normalization = Literal["raw", "one_over_sqrt_n", "one_over_n", "one_over_sqrt_mn"]


class WignerFamily(StrictModel):
    """Real symmetric Wigner matrix with off-diagonal and diagonal atoms."""
    kind: Literal["wigner"] = "wigner"
    offdiag: AtomSpec = Field(default_factory=GaussianAtom, description="Atom above the diagonal")
    diag: AtomSpec = Field(default_factory=GaussianAtom, description="Atom on the diagonal")


class GOEFamily(StrictModel):
    """Gaussian orthogonal ensemble, diagonal variance 2."""
    kind: Literal["goe"] = "goe"

    def as_wigner(self) -> WignerFamily:
        return WignerFamily(offdiag=GaussianAtom(), diag=GaussianAtom(variance=2.0))


class SampleCovarianceFamily(StrictModel):
    """S = X^T X for an m x n matrix X with iid entries."""
    kind: Literal["sample_covariance"] = "sample_covariance"
    atom: AtomSpec = Field(default_factory=GaussianAtom, description="Entry distribution of X")
    m: int = Field(..., gt=0, description="Number of rows of X")
    n: Optional[int] = Field(None, gt=0, description="Number of columns of X (defaults to the ensemble n)")


Family = Annotated[
    Union[WignerFamily, GOEFamily, SampleCovarianceFamily],
    Field(discriminator="kind"),
]


class EnsembleSpec(StrictModel):
    """Declarative description of a random matrix model."""
    family: Family = Field(default_factory=GOEFamily, description="Ensemble family")
    n: int = Field(..., gt=0, description="Matrix dimension")
    normalization: Normalization = Field("one_over_sqrt_n", description="Scaling applied to the sample")

    @model_validator(mode="after")
    def check_dimensions(self) -> "EnsembleSpec":
        if isinstance(self.family, SampleCovarianceFamily):
            if self.family.n is None:
                self.family = self.family.model_copy(update={"n": self.n})
            elif self.family.n != self.n:
                raise ValueError(
                    f"sample covariance n={self.family.n} does not match ensemble n={self.n}"
                )
        return self


class SeedPlan(StrictModel):
    """Addresses one independent random stream of one trial."""
    master_seed: int = Field(..., ge=0, lt=2 ** 64, description="Run-level seed")
    trial_index: int = Field(0, ge=0, description="Trial number")
    stream: int = Field(0, ge=0, description="Independent draw inside a trial")

    def substream(self, stream: int) -> "SeedPlan":
        return SeedPlan(master_seed=self.master_seed, trial_index=self.trial_index, stream=stream)


# Perturbations

Mode = Literal["additive", "multiplicative"]


class DiagonalPerturbation(StrictModel):
    """diag(values, 0, ..., 0); an empty list is the zero perturbation."""
    kind: Literal["diagonal"] = "diagonal"
    values: List[ComplexValue] = Field(default_factory=list, description="Leading diagonal entries")
    mode: Mode = "additive"


class RankOnePerturbation(StrictModel):
    """theta * u v^*."""
    kind: Literal["rank_one"] = "rank_one"
    theta: ComplexValue = Field(..., description="Scale of the rank-one term")
    u: List[ComplexValue] = Field(..., description="Left vector")
    v: List[ComplexValue] = Field(..., description="Right vector")
    mode: Mode = "additive"


class LowRankPerturbation(StrictModel):
    """A B with A of shape n x k and B of shape k x n."""
    kind: Literal["low_rank_factors"] = "low_rank_factors"
    A: List[List[ComplexValue]] = Field(..., description="Left factor, n x k")
    B: List[List[ComplexValue]] = Field(..., description="Right factor, k x n")
    mode: Mode = "additive"


class CornerEntryPerturbation(StrictModel):
    """Single nonzero entry; negative positions count from the end."""
    kind: Literal["corner_entry"] = "corner_entry"
    position: Tuple[int, int] = Field(..., description="(row, col) of the entry")
    value: ComplexValue = Field(..., description="Entry value")
    mode: Mode = "additive"


PerturbationSpec = Annotated[
    Union[DiagonalPerturbation, RankOnePerturbation, LowRankPerturbation, CornerEntryPerturbation],
    Field(discriminator="kind"),
]


# Experiments

ExperimentName = Literal[
    "nonreal_wigner",
    "nonreal_sampcov",
    "nonreal_deterministic",
    "interlacing",
    "global_law_wigner",
    "global_law_mp",
    "outliers_wigner",
    "outliers_mp",
    "bulk_im_bound",
    "overlap_wigner",
    "overlap_mp",
    "critical_points",
    "bounds_suite",
    "isotropic_law",
]

Law = Literal["wigner", "mp"]

COVARIANCE_EXPERIMENTS = {"nonreal_sampcov", "global_law_mp", "outliers_mp", "overlap_mp"}


class ExperimentParams(StrictModel):
    """Tunable parameters shared by the experiment runners."""
    law: Optional[Law] = Field(None, description="Limiting law for experiments serving both ensembles")
    epsilon: float = Field(config.DEFAULT_EPSILON, gt=0.0, lt=1.0, description="Exponent slack in n^(-1+eps)")
    threshold: float = Field(config.DEFAULT_THRESHOLD, ge=0.0, le=1.0, description="Required pass rate")
    delta: Optional[float] = Field(None, gt=0.0, description="Gap around the unit circle; derived from P when omitted")
    gamma: float = Field(1.0, description="Imaginary scale of constructed perturbations")
    theta: Optional[ComplexValue] = Field(None, description="Spike strength for overlap experiments")
    nonnormal: bool = Field(False, description="Use P = sigma u w^* instead of theta u u^*")
    field: Literal["real", "complex"] = Field("real", description="Field of random unit vectors")
    k: Optional[int] = Field(None, gt=0, description="Number of selected eigenvalues")
    z: Optional[List[ComplexValue]] = Field(None, description="Mixing coefficients z_j")
    a: Optional[List[float]] = Field(None, description="Weights a_j, all of one strict sign")
    matrix: Optional[List[List[ComplexValue]]] = Field(None, description="Explicit Hermitian matrix")
    toeplitz_n: Optional[int] = Field(None, ge=2, description="Size of the tridiagonal Toeplitz example")
    match_tolerance: float = Field(0.1, gt=0.0, description="Outlier to prediction distance")
    location_tolerance: float = Field(0.1, gt=0.0, description="Overlap outlier location tolerance")
    overlap_tolerance: float = Field(config.OVERLAP_TOLERANCE, gt=0.0, description="Mean overlap tolerance")
    ks_threshold: float = Field(config.KS_THRESHOLD, gt=0.0, description="Kolmogorov distance bound")
    critical_im_max: float = Field(config.CRITICAL_IM_MAX, gt=0.0, description="Bound on non-outlier critical |Im|")
    critical_tolerance: float = Field(0.5, gt=0.0, description="Outlier critical point to outlier distance")
    nonreal_mass_tol: Optional[float] = Field(
        None, gt=0.0, description="|Im| counted as nonreal; n^(-1/2) when omitted"
    )
    nonreal_mass_slack: float = Field(config.NONREAL_MASS_SLACK, ge=0.0, description="Allowed nonreal mass beyond rank/n")
    zero_tol: float = Field(config.ZERO_TOL, gt=0.0, description="Relative size of a numerically zero eigenvalue")
    z_points: Optional[List[ComplexValue]] = Field(None, description="Spectral parameters for the isotropic law")
    isotropic_tolerance: float = Field(0.1, gt=0.0, description="Isotropic law deviation bound")
    hb_degree: int = Field(6, ge=3, le=12, description="Degree of constructed Hermite-Biehler pairs")
    dump_eigenvalues: bool = Field(False, description="Keep spectra for figure emission")
    dump_trials: Optional[int] = Field(None, gt=0, description="Number of leading trials to dump")
    circles: Optional[List[ComplexValue]] = Field(None, description="Figure circle centers")
    circle_radius: Optional[float] = Field(None, gt=0.0, description="Figure circle radius")


def _zero_perturbation() -> DiagonalPerturbation:
    return DiagonalPerturbation(values=[])


class ExperimentSpec(StrictModel):
    """One experiment: ensemble, perturbation, trial count and parameters."""
    name: Optional[str] = Field(None, description="Report label; defaults to the experiment name")
    experiment: ExperimentName = Field(..., description="Experiment runner")
    ensemble: EnsembleSpec = Field(..., description="Random model")
    perturbation: PerturbationSpec = Field(default_factory=_zero_perturbation, description="Deterministic perturbation")
    trials: int = Field(config.DEFAULT_TRIALS, gt=0, description="Number of seeded trials")
    params: ExperimentParams = Field(default_factory=ExperimentParams, description="Runner parameters")

    @model_validator(mode="before")
    @classmethod
    def expand_shorthand(cls, data: Any) -> Any:
        """Fill the ensemble from a bare ``n`` and default to the experiment's family."""
        if not isinstance(data, dict) or "n" not in data:
            return data
        data = dict(data)
        n = data.pop("n")
        ensemble = data.get("ensemble")
        if ensemble is None:
            data["ensemble"] = default_ensemble(data.get("experiment"), n, data.get("params"))
        elif isinstance(ensemble, dict) and "n" not in ensemble:
            data["ensemble"] = {**ensemble, "n": n}
        return data

    @model_validator(mode="after")
    def default_name(self) -> "ExperimentSpec":
        if self.name is None:
            self.name = self.experiment
        return self

    @property
    def law(self) -> Law:
        if self.params.law is not None:
            return self.params.law
        if self.experiment in COVARIANCE_EXPERIMENTS:
            return "mp"
        return "wigner"


def default_ensemble(experiment: Optional[str], n: Any, params: Any = None) -> Dict[str, Any]:
    """Ensemble a bare ``{"experiment": ..., "n": ...}`` entry expands to."""
    law = params.get("law") if isinstance(params, dict) else None
    if experiment in COVARIANCE_EXPERIMENTS or law == "mp":
        normalization = "raw" if experiment == "nonreal_sampcov" else "one_over_n"
        return {
            "family": {"kind": "sample_covariance", "atom": {"kind": "gaussian"}, "m": n},
            "n": n,
            "normalization": normalization,
        }
    return {"family": {"kind": "goe"}, "n": n, "normalization": "one_over_sqrt_n"}


class RunConfig(StrictModel):
    """A validated run: experiments plus run-level settings."""
    experiments: List[ExperimentSpec] = Field(..., min_length=1, description="Experiments to run")
    master_seed: int = Field(config.DEFAULT_MASTER_SEED, ge=0, lt=2 ** 64, description="Run-level seed")
    output_dir: Path = Field(config.REPORTS_DIR, description="Directory for reports and figure data")
    emit: Set[Literal["csv", "json"]] = Field(default_factory=lambda: {"csv", "json"}, description="Figure data formats")
    workers: int = Field(config.DEFAULT_WORKERS, gt=0, description="Parallel trial workers")

    def echo(self) -> Dict[str, Any]:
        """Config as recorded in reports; machine-dependent settings are left out."""
        echo = self.model_dump(mode="json", exclude={"output_dir", "workers"})
        echo["emit"] = sorted(self.emit)
        return echo


# Reports

class DumpRow(NamedTuple):
    trial: int
    index: int
    re: float
    im: float
    kind: str


class TrialRecord(BaseModel):
    """Outcome of a single seeded trial."""
    trial: int = Field(..., description="Trial index")
    seed: int = Field(..., description="Derived 64-bit stream seed")
    passed: bool = Field(..., description="Whether the trial met its criterion")
    metrics: Dict[str, Any] = Field(default_factory=dict, description="Per-trial measurements")


class AggregateStats(BaseModel):
    """Reduction of per-trial records."""
    pass_rate: float = Field(..., description="passes / trials")
    means: Dict[str, float] = Field(default_factory=dict, description="Mean of each numeric metric")
    maxima: Dict[str, float] = Field(default_factory=dict, description="Maximum of each numeric metric")


class ExperimentReport(BaseModel):
    """Per-trial and aggregated results of one experiment."""
    name: str
    experiment: str
    threshold: float
    passed: bool
    per_trial: List[TrialRecord]
    aggregate: AggregateStats
    summary: Dict[str, Any] = Field(default_factory=dict, description="Experiment-level metrics")
    predictions: List[ComplexValue] = Field(default_factory=list, description="Analytic predictions")
    eigenvalue_dump: List[DumpRow] = Field(default_factory=list, exclude=True)

    @property
    def pass_rate(self) -> float:
        return self.aggregate.pass_rate
