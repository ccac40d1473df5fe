"""Configuration settings for the nearly Hermitian experiment harness."""
import os
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()

# File paths
PACKAGE_DIR = Path(__file__).parent
BASE_DIR = PACKAGE_DIR.parent.parent
DATA_DIR = BASE_DIR / "data"
PRESETS_DIR = DATA_DIR / "presets"
TEMPLATES_DIR = PACKAGE_DIR / "templates"
REPORTS_DIR = Path(os.getenv("NHRM_OUTPUT_DIR", str(BASE_DIR / "reports")))

# Output files
SUMMARY_TEMPLATE_FILE = "summary_template.md"
REPORT_FILE = "report.json"
SUMMARY_FILE = "summary.md"
LOG_FILE = "run.log"
CSV_FLOAT_FORMAT = "%.17g"

# Logging
LOG_LEVEL = os.getenv("NHRM_LOG_LEVEL", "INFO")
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# Run settings
DEFAULT_MASTER_SEED = int(os.getenv("NHRM_MASTER_SEED", "42"))
DEFAULT_WORKERS = int(os.getenv("NHRM_WORKERS", str(min(4, os.cpu_count() or 1))))
DEFAULT_TRIALS = 10
DEFAULT_EPSILON = 0.2
DEFAULT_THRESHOLD = 0.95

# Solver tolerances
HERMITIAN_TOL = 1e-12
HERMITIAN_RESIDUAL_TOL = 1e-10
TOL_SING = 1e-12
EIGVEC_RESIDUAL_GATE = 1e-8
INVERSE_ITERATION_STEPS = 3
BOUND_SLACK = 1e-9
NORMALITY_TOL = 1e-10
DISTINCT_GAP = 1e-9
MATCH_TOL = 1e-7
BRANCH_CUT_TOL = 1e-9

# Quadrature
QUAD_EPSABS = 1e-13
QUAD_EPSREL = 1e-10
QUAD_LIMIT = 200

# Experiment defaults
ZERO_TOL = 1e-8
NONREAL_MASS_EXPONENT = -0.5
NONREAL_MASS_SLACK = 0.01
KS_THRESHOLD = 0.05
CRITICAL_IM_MAX = 0.05
OVERLAP_TOLERANCE = 0.05
DELTA_CAP = 0.5
DELTA_SHRINK = 0.9

# Figure dump kinds, in their row order within a (trial, index) pair
DUMP_KINDS = [
    "eigenvalue",
    "reference_eigenvalue",
    "critical_point",
    "prediction",
    "circle_center",
]
