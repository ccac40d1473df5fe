"""Seeded, parallel trial loop and report aggregation."""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..config import DUMP_KINDS
from ..ensembles import stream_seed
from ..errors import SolverError
from ..models import AggregateStats, DumpRow, ExperimentReport, ExperimentSpec, SeedPlan, TrialRecord

logger = logging.getLogger(__name__)


@dataclass
class TrialOutcome:
    """Result of one trial before it becomes a TrialRecord."""
    passed: bool
    metrics: Dict[str, Any] = field(default_factory=dict)
    dump: List[DumpRow] = field(default_factory=list)


TrialFn = Callable[[ExperimentSpec, SeedPlan], TrialOutcome]
SummaryFn = Callable[[List[TrialRecord]], Tuple[bool, Dict[str, Any]]]


def dump_rows(trial: int, values: Iterable[complex], kind: str) -> List[DumpRow]:
    return [DumpRow(trial, i, float(np.real(v)), float(np.imag(v)), kind) for i, v in enumerate(values)]


def wants_dump(spec: ExperimentSpec, seed: SeedPlan) -> bool:
    if not spec.params.dump_eigenvalues:
        return False
    limit = spec.params.dump_trials
    return limit is None or seed.trial_index < limit


def figure_rows(spec: ExperimentSpec, seed: SeedPlan, predictions: Sequence[complex] = ()) -> List[DumpRow]:
    """Prediction and circle-center rows attached to a dumped trial."""
    rows = dump_rows(seed.trial_index, predictions, "prediction")
    if spec.params.circles:
        rows += dump_rows(seed.trial_index, spec.params.circles, "circle_center")
    return rows


def _plain(value: Any) -> Any:
    """Metric values as JSON-friendly Python scalars."""
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if np.isfinite(value) else None
    return value


def aggregate_metrics(records: List[TrialRecord]) -> AggregateStats:
    """Reduce per-trial metrics to pass rate, means and maxima.

    Args:
        records: Trial records sorted by trial index

    Returns:
        AggregateStats with one entry per numeric metric
    """
    passes = sum(1 for r in records if r.passed)
    pass_rate = passes / len(records) if records else 0.0
    df = pd.DataFrame([r.metrics for r in records])
    numeric = df.select_dtypes(include="number")
    means = {k: float(v) for k, v in numeric.mean().dropna().items()}
    maxima = {k: float(v) for k, v in numeric.max().dropna().items()}
    return AggregateStats(pass_rate=pass_rate, means=means, maxima=maxima)


def run_trials(
    spec: ExperimentSpec,
    master_seed: int,
    trial_fn: TrialFn,
    workers: int = 1,
    predictions: Sequence[complex] = (),
    summary_fn: Optional[SummaryFn] = None,
) -> ExperimentReport:
    """Run every trial of an experiment and aggregate the outcomes.

    Trials run on a thread pool; records are sorted by trial index before any
    reduction, so the report does not depend on scheduling.

    Args:
        spec: Experiment to run
        master_seed: Run-level seed
        trial_fn: Callable evaluating one trial
        workers: Thread pool size
        predictions: Analytic predictions echoed into the report
        summary_fn: Optional experiment-level check over all records

    Returns:
        ExperimentReport for the experiment
    """
    plans = [SeedPlan(master_seed=master_seed, trial_index=i) for i in range(spec.trials)]

    def run_one(plan: SeedPlan) -> Tuple[SeedPlan, TrialOutcome]:
        try:
            return plan, trial_fn(spec, plan)
        except SolverError as e:
            logger.warning(f"Trial {plan.trial_index} of {spec.name} failed in the solver: {e}")
            return plan, TrialOutcome(False, {"solver_error": str(e)})

    if workers > 1 and len(plans) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_one, plans))
    else:
        results = [run_one(plan) for plan in plans]
    results.sort(key=lambda item: item[0].trial_index)

    records = []
    dump: List[DumpRow] = []
    for plan, outcome in results:
        metrics = {k: _plain(v) for k, v in outcome.metrics.items()}
        records.append(TrialRecord(trial=plan.trial_index, seed=stream_seed(plan), passed=bool(outcome.passed), metrics=metrics))
        dump.extend(outcome.dump)
    kind_order = {kind: i for i, kind in enumerate(DUMP_KINDS)}
    dump.sort(key=lambda row: (row.trial, row.index, kind_order[row.kind]))

    aggregate = aggregate_metrics(records)
    summary_ok, summary = True, {}
    if summary_fn is not None:
        summary_ok, summary = summary_fn(records)
        summary = {k: _plain(v) for k, v in summary.items()}
    threshold = spec.params.threshold
    passed = aggregate.pass_rate >= threshold and summary_ok
    level = logging.INFO if passed else logging.WARNING
    logger.log(level, f"Experiment {spec.name}: pass rate {aggregate.pass_rate:.3f} (threshold {threshold})")
    return ExperimentReport(
        name=spec.name,
        experiment=spec.experiment,
        threshold=threshold,
        passed=passed,
        per_trial=records,
        aggregate=aggregate,
        summary=summary,
        predictions=[complex(p) for p in predictions],
        eigenvalue_dump=dump,
    )
