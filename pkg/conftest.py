"""Shared pytest fixtures for the nearly Hermitian experiment harness."""
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent / "src"))

from nearly_hermitian.models import ExperimentSpec, SeedPlan  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def seed_plan():
    return SeedPlan(master_seed=42, trial_index=0, stream=0)


@pytest.fixture
def make_spec():
    """Build a validated ExperimentSpec from keyword shorthand."""
    def _make(**data):
        return ExperimentSpec.model_validate(data)
    return _make
