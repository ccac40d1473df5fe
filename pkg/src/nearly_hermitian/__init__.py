"""Spectral experiments on nearly Hermitian random matrices."""
from .errors import (
    ConfigurationError,
    ContractViolation,
    DomainError,
    ExperimentError,
    NearlyHermitianError,
    PreconditionError,
    ResolventError,
    SolverError,
)
from .experiments import EXPERIMENTS, run_experiment
from .models import EnsembleSpec, ExperimentReport, ExperimentSpec, RunConfig, SeedPlan
from .report_writer import ReportWriter

__version__ = "1.0.0"
__all__ = [
    "EXPERIMENTS",
    "ConfigurationError",
    "ContractViolation",
    "DomainError",
    "EnsembleSpec",
    "ExperimentError",
    "ExperimentReport",
    "ExperimentSpec",
    "NearlyHermitianError",
    "PreconditionError",
    "ReportWriter",
    "ResolventError",
    "RunConfig",
    "SeedPlan",
    "SolverError",
    "run_experiment",
]
