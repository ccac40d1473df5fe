"""Writers for figure data, the machine-readable report and the markdown summary."""
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Union

import pandas as pd
from jinja2 import Environment, FileSystemLoader

from . import config
from .errors import ExperimentError
from .models import DumpRow, ExperimentReport, RunConfig

# Configure logging
logger = logging.getLogger(__name__)

DUMP_COLUMNS = list(DumpRow._fields)


def dump_to_dataframe(report: ExperimentReport) -> pd.DataFrame:
    """Figure rows of a report as a DataFrame with columns trial, index, re, im, kind."""
    return pd.DataFrame([tuple(row) for row in report.eigenvalue_dump], columns=DUMP_COLUMNS)


def experiment_entry(report: ExperimentReport) -> Dict[str, Any]:
    """One ``per_experiment`` element of report.json."""
    metrics: Dict[str, Any] = {
        "mean": report.aggregate.means,
        "max": report.aggregate.maxima,
    }
    if report.summary:
        metrics["summary"] = report.summary
    if report.predictions:
        metrics["predictions"] = [[p.real, p.imag] for p in report.predictions]
    return {
        "name": report.name,
        "pass_rate": report.pass_rate,
        "metrics": metrics,
        "threshold": report.threshold,
        "passed": report.passed,
    }


def build_report(
    run_config: RunConfig,
    reports: List[ExperimentReport],
    wall_time_ms: Optional[float] = None,
) -> Dict[str, Any]:
    """The report.json document."""
    return {
        "config_echo": run_config.echo(),
        "per_experiment": [experiment_entry(r) for r in reports],
        "wall_time_ms": wall_time_ms,
        "seed": run_config.master_seed,
    }


def results_table(reports: Iterable[ExperimentReport]) -> pd.DataFrame:
    """One row per experiment for the summary table.

    Args:
        reports: Experiment reports in run order

    Returns:
        DataFrame with the experiment name, pass rate, threshold and verdict
    """
    return pd.DataFrame(
        [
            {
                "experiment": r.name,
                "runner": r.experiment,
                "trials": len(r.per_trial),
                "pass_rate": r.pass_rate,
                "threshold": r.threshold,
                "passed": r.passed,
            }
            for r in reports
        ]
    )


class ReportWriter:
    """Writes run outputs into a single directory."""

    def __init__(self, output_dir: Union[str, Path] = config.REPORTS_DIR):
        """Initialize the writer.

        Args:
            output_dir: Directory receiving report.json, summary.md and figure data
        """
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self.environment = Environment(
            loader=FileSystemLoader(str(config.TEMPLATES_DIR)),
            keep_trailing_newline=True,
        )

    def emit_figure_data(self, report: ExperimentReport, formats: Iterable[str] = ("csv", "json")) -> List[Path]:
        """Write the figure rows of ``report`` as CSV and/or JSON.

        Rows are ordered by trial, then index; floats are written with 17
        significant digits so they read back bit-exactly. An empty dump still
        produces a header-only CSV.

        Args:
            report: Experiment report carrying eigenvalue_dump
            formats: Any of "csv" and "json"

        Returns:
            Paths of the written files

        Raises:
            ExperimentError: If a file cannot be written
        """
        df = dump_to_dataframe(report)
        stem = f"{report.name}_figure_data"
        paths = []
        try:
            for fmt in sorted(set(formats)):
                if fmt == "csv":
                    path = self.output_dir / f"{stem}.csv"
                    df.to_csv(path, index=False, float_format=config.CSV_FLOAT_FORMAT, lineterminator="\n")
                elif fmt == "json":
                    path = self.output_dir / f"{stem}.json"
                    rows = [row._asdict() for row in report.eigenvalue_dump]
                    with open(path, "w", encoding="utf-8") as f:
                        f.write(json.dumps({"columns": DUMP_COLUMNS, "rows": rows}, indent=2) + "\n")
                else:
                    raise ValueError(f"Unknown figure data format {fmt!r}")
                paths.append(path)
            logger.info(f"Wrote {len(df)} figure rows for {report.name}")
            return paths
        except Exception as e:
            logger.error(f"Error writing figure data for {report.name}: {str(e)}")
            raise ExperimentError(f"Failed to write figure data to {self.output_dir}: {str(e)}")

    def write_report(self, document: Dict[str, Any]) -> Path:
        """Write report.json with sorted keys so equal runs give equal bytes."""
        path = self.output_dir / config.REPORT_FILE
        try:
            with open(path, "w", encoding="utf-8") as f:
                f.write(json.dumps(document, sort_keys=True, indent=2) + "\n")
            logger.info(f"Successfully wrote report: {path}")
            return path
        except Exception as e:
            logger.error(f"Error writing report: {str(e)}")
            raise ExperimentError(f"Failed to write report {path}: {str(e)}")

    def render_summary(self, reports: List[ExperimentReport], seed: int, wall_time_ms: Optional[float] = None) -> str:
        """Markdown summary rendered from the summary template."""
        experiments = []
        for report in reports:
            entry = experiment_entry(report)
            metrics = pd.DataFrame({"mean": pd.Series(report.aggregate.means), "max": pd.Series(report.aggregate.maxima)})
            entry["experiment"] = report.experiment
            entry["predictions"] = entry["metrics"].get("predictions", [])
            entry["metrics_table"] = metrics.to_markdown() if not metrics.empty else "_No numeric metrics._"
            experiments.append(entry)
        template = self.environment.get_template(config.SUMMARY_TEMPLATE_FILE)
        return template.render(
            seed=seed,
            n_experiments=len(reports),
            n_passed=sum(1 for r in reports if r.passed),
            wall_time_ms=wall_time_ms,
            results_table=results_table(reports).to_markdown(index=False),
            experiments=experiments,
        )

    def write_summary(self, reports: List[ExperimentReport], seed: int, wall_time_ms: Optional[float] = None) -> Path:
        path = self.output_dir / config.SUMMARY_FILE
        try:
            with open(path, "w", encoding="utf-8") as f:
                f.write(self.render_summary(reports, seed, wall_time_ms))
            logger.info(f"Successfully wrote summary: {path}")
            return path
        except Exception as e:
            logger.error(f"Error writing summary: {str(e)}")
            raise ExperimentError(f"Failed to write summary {path}: {str(e)}")

    def write_all(
        self,
        run_config: RunConfig,
        reports: List[ExperimentReport],
        wall_time_ms: Optional[float] = None,
        figure_data: bool = False,
    ) -> Path:
        """Figure data, then summary.md and report.json.

        Figure files are written for every report when ``figure_data`` is set,
        otherwise only for reports that carry a dump.
        """
        for report in reports:
            if figure_data or report.eigenvalue_dump:
                self.emit_figure_data(report, run_config.emit)
        self.write_summary(reports, run_config.master_seed, wall_time_ms)
        return self.write_report(build_report(run_config, reports, wall_time_ms))
