"""Command-line entry point: run configs, reproduce figures, run the acceptance suite."""
import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from pydantic import ValidationError

from . import config
from .errors import ConfigurationError, NearlyHermitianError, PreconditionError
from .experiments import run_experiment
from .models import ExperimentReport, RunConfig
from .presets import FIGURES, expand_entry, load_preset, verify_suite
from .report_writer import ReportWriter, results_table

# Configure logging
logger = logging.getLogger(__name__)

RUN_LEVEL_KEYS = ("master_seed", "output_dir", "emit", "workers")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2


def setup_logging(output_dir: Path, level: str = config.LOG_LEVEL) -> None:
    """Log to ``run.log`` in the output directory and to stderr."""
    output_dir.mkdir(parents=True, exist_ok=True)
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format=config.LOG_FORMAT,
        handlers=[
            logging.FileHandler(output_dir / config.LOG_FILE),
            logging.StreamHandler(),
        ],
        force=True,
    )


def _format_validation_error(error: ValidationError) -> str:
    problems = []
    for item in error.errors():
        path = ".".join(str(part) for part in item["loc"]) or "<root>"
        problems.append(f"{path}: {item['msg']}")
    return "; ".join(problems)


def build_run_config(data: Dict[str, Any]) -> RunConfig:
    """Validate a run document, expanding preset references.

    Raises:
        ConfigurationError: Naming the dotted path of every schema violation
    """
    data = dict(data)
    data["experiments"] = [
        expand_entry({"preset": e} if isinstance(e, str) else e) for e in data.get("experiments", [])
    ]
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigurationError(f"Invalid configuration: {_format_validation_error(e)}")


def parse_config(text: bytes) -> RunConfig:
    """Parse a UTF-8 JSON run configuration.

    Accepts a full ``{"experiments": [...]}`` document, a single experiment
    object, or a preset reference such as ``{"preset": "fig3", "trials": 5}``.
    Run-level keys of a single-experiment document apply to the run.

    Args:
        text: Raw configuration bytes

    Returns:
        Validated RunConfig

    Raises:
        ConfigurationError: If the text is not UTF-8 JSON or violates the schema
    """
    try:
        data = json.loads(text.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ConfigurationError(f"Configuration is not UTF-8 JSON: {str(e)}")
    if isinstance(data, str):
        data = {"preset": data}
    if not isinstance(data, dict):
        raise ConfigurationError("Configuration must be a JSON object")
    if "experiments" not in data:
        run_level = {k: data.pop(k) for k in RUN_LEVEL_KEYS if k in data}
        data = {**run_level, "experiments": [data]}
    return build_run_config(data)


def apply_overrides(run_config: RunConfig, args: argparse.Namespace) -> RunConfig:
    """Command-line flags take precedence over the configuration file."""
    if args.seed is None and args.out is None and args.workers is None and args.trials is None:
        return run_config
    data = run_config.model_dump(mode="json")
    if args.seed is not None:
        data["master_seed"] = args.seed
    if args.out is not None:
        data["output_dir"] = args.out
    if args.workers is not None:
        data["workers"] = args.workers
    if args.trials is not None:
        for experiment in data["experiments"]:
            experiment["trials"] = args.trials
    return build_run_config(data)


def load_run_config(args: argparse.Namespace) -> RunConfig:
    """Run configuration for the parsed subcommand, with flag overrides applied.

    Raises:
        ConfigurationError: If the config file cannot be read or validated
    """
    if args.command == "run":
        path = Path(args.config)
        try:
            text = path.read_bytes()
        except OSError as e:
            raise ConfigurationError(f"Cannot read configuration {path}: {str(e)}")
        run_config = parse_config(text)
    elif args.command == "figure":
        run_config = build_run_config({"experiments": [load_preset(args.name)]})
    else:
        run_config = build_run_config({"experiments": verify_suite(quick=args.quick)})
    return apply_overrides(run_config, args)


def run_all(run_config: RunConfig) -> List[ExperimentReport]:
    """Run every experiment of the config in order."""
    reports = []
    for spec in run_config.experiments:
        reports.append(run_experiment(spec, run_config.master_seed, run_config.workers))
    return reports


def _positive_int(value: str) -> int:
    number = int(value)
    if number <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return number


def _seed(value: str) -> int:
    number = int(value, 0)
    if not 0 <= number < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed must fit in 64 bits, got {value}")
    return number


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=None, help="Master seed (default from config or NHRM_MASTER_SEED)")
    common.add_argument("--trials", type=_positive_int, default=None, help="Override the trial count of every experiment")
    common.add_argument("--out", default=None, help="Output directory")
    common.add_argument("--workers", type=_positive_int, default=None, help="Parallel trial workers")
    common.add_argument("--log-level", default=config.LOG_LEVEL, help="Logging level")
    common.add_argument("--record-timing", action="store_true", help="Record wall_time_ms in report.json")

    parser = argparse.ArgumentParser(
        prog="nearly-hermitian",
        description="Experiments on low-rank perturbations of Wigner and sample covariance matrices.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    run = subparsers.add_parser("run", parents=[common], help="Run experiments from a JSON config")
    run.add_argument("--config", required=True, help="Path to the JSON configuration")
    figure = subparsers.add_parser("figure", parents=[common], help="Reproduce the data behind a figure")
    figure.add_argument("name", choices=FIGURES, help="Figure preset")
    verify = subparsers.add_parser("verify", parents=[common], help="Run the acceptance suite")
    verify.add_argument("--quick", action="store_true", help="Reduced dimensions")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the command line and return the exit code.

    Returns:
        0 when every experiment meets its threshold, 1 when one does not or a
        run fails, 2 on configuration and precondition errors
    """
    args = build_parser().parse_args(argv)
    try:
        run_config = load_run_config(args)
    except ConfigurationError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    setup_logging(run_config.output_dir, args.log_level)
    logger.info(f"Running {len(run_config.experiments)} experiment(s) with master seed {run_config.master_seed}")
    start = time.perf_counter()
    try:
        reports = run_all(run_config)
        wall_time_ms = (time.perf_counter() - start) * 1000.0 if args.record_timing else None
        writer = ReportWriter(run_config.output_dir)
        path = writer.write_all(run_config, reports, wall_time_ms, figure_data=args.command == "figure")
    except (ConfigurationError, PreconditionError) as e:
        logger.error(f"Configuration error: {str(e)}")
        return EXIT_CONFIG
    except NearlyHermitianError as e:
        logger.error(f"Run failed: {str(e)}")
        return EXIT_FAILED

    print(results_table(reports).to_markdown(index=False))
    print(f"\nReport written to {path}")
    if all(r.passed for r in reports):
        logger.info("Successfully completed run: all experiments passed")
        return EXIT_OK
    failed = [r.name for r in reports if not r.passed]
    logger.warning(f"Experiments below threshold: {', '.join(failed)}")
    return EXIT_FAILED


if __name__ == "__main__":
    raise SystemExit(main())
