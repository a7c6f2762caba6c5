# ========================
# src/compressive/harness.py
# ========================

"""
Tradeoff Harness

Coordinates the analyser-vs-attacker sweep. For every measurement count m
and every trial it draws a sensing matrix and task instances from seeds
derived from (master_seed, m, trial), acquires noisy measurements,
classifies them with the smashed filter (utility) and attacks one of them
with full knowledge of the matrix (leakage).
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Union

from . import __version__
from .aggregation import TradeoffRow, TrialAggregator, TrialOutcome, skipped_row
from .datasets import build_task
from .exceptions import InvalidParameterError
from .experiment import ExperimentConfig
from .privacy import laplace_perturb
from .reconstruction import run_attack
from .sensing import Measurement, derive_seed, generate_matrix, make_rng, measurement_noise, snr_sigma
from .smashed import compress_templates, nearest_template
from .storage import report_rows_csv, to_json
from ..utils.performance_monitor import monitor_performance

logger = logging.getLogger(__name__)

# Stream keys appended to (master_seed, m, trial).
MATRIX_STREAM = 0
TASK_STREAM = 1
NOISE_STREAM = 2
DP_STREAM = 3

CSV_COLUMNS = [
    "m", "ratio", "trials", "attack_trials", "utility_accuracy_mean", "utility_accuracy_std",
    "leakage_relative_l2_median", "leakage_psnr_median", "attack_used", "wall_time_s", "skipped_reason",
]


@dataclass(frozen=True)
class TradeoffReport:
    """Rows in sweep order plus the config echo and toolkit version."""

    config: ExperimentConfig
    rows: tuple
    version: str = __version__

    def to_dict(self) -> Dict[str, Any]:
        return {
            "toolkit": "compressive",
            "version": self.version,
            "config": self.config.to_dict(),
            "rows": [row.to_dict() for row in self.rows],
        }

    def to_json(self) -> str:
        return to_json(self.to_dict())

    def to_csv(self) -> str:
        """One line per sweep point; empty cells for missing values."""
        lines = []
        for row in self.rows:
            values = row.to_dict()
            lines.append(["" if values[c] is None else values[c] for c in CSV_COLUMNS])
        return report_rows_csv(CSV_COLUMNS, lines)


def _infeasibility(config: ExperimentConfig, m: int) -> Optional[str]:
    if config.attack.kind in ("omp", "best") and config.leakage_trials > 0:
        k = config.attack.k_for(m)
        if k > m:
            return f"OMP sparsity k={k} exceeds m={m}"
    return None


def _run_trial(config: ExperimentConfig, task, m: int, trial: int) -> TrialOutcome:
    """One trial: fresh matrix, fresh task draw, classify every instance, maybe attack one."""
    seed = config.master_seed
    matrix = generate_matrix(derive_seed(seed, m, trial, MATRIX_STREAM), m, config.n, config.ensemble)
    draw = task.draw(derive_seed(seed, m, trial, TASK_STREAM))
    compressed = compress_templates(matrix, draw.templates)

    released = []
    correct = 0
    for index, instance in enumerate(draw.instances):
        clean = matrix.entries @ instance.values
        sigma = snr_sigma(clean, config.snr_db) if config.snr_db is not None else config.sigma
        values = clean
        if sigma > 0:
            noise_rng = make_rng(derive_seed(seed, m, trial, NOISE_STREAM, index))
            values = clean + measurement_noise(noise_rng, m, sigma)
        if config.dp is not None:
            values = laplace_perturb(values, config.dp, derive_seed(seed, m, trial, DP_STREAM, index))
        released.append(Measurement(values=values, matrix_id=matrix.matrix_id, noise_sigma=float(sigma)))
        if nearest_template(values, compressed, draw.templates.classes).label == instance.label:
            correct += 1

    if trial >= config.leakage_trials:
        return TrialOutcome(trial=trial, correct=correct, total=len(draw.instances))

    target = trial % len(draw.instances)
    attack = config.attack
    outcome = run_attack(
        matrix,
        released[target],
        draw.instances[target],
        kind=attack.kind,
        omp_k=attack.k_for(m),
        lambdas=attack.lambda_grid,
        max_iters=attack.max_iters,
        tol=attack.tol,
        peak=config.peak,
    )
    return TrialOutcome(
        trial=trial,
        correct=correct,
        total=len(draw.instances),
        leakage=outcome.metrics,
        attack_method=outcome.method,
    )


def _run_point(config: ExperimentConfig, task, m: int, workers: int) -> TradeoffRow:
    reason = _infeasibility(config, m)
    if reason is not None:
        return skipped_row(m, config.n, reason)

    aggregator = TrialAggregator(m, config.n)
    with monitor_performance(f"m={m}") as monitor:
        def trial_fn(trial: int) -> TrialOutcome:
            return _run_trial(config, task, m, trial)

        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as executor:
                for outcome in executor.map(trial_fn, range(config.trials)):
                    aggregator.add(outcome)
                    monitor.update_progress()
        else:
            for trial in range(config.trials):
                aggregator.add(trial_fn(trial))
                monitor.update_progress()
        monitor.add_checkpoint("trials", {"m": m, "trials": config.trials})
        elapsed = monitor.checkpoints[-1]["elapsed_seconds"]

    return aggregator.finalize(wall_time_s=elapsed if config.record_wall_time else None)


def run_tradeoff(config: ExperimentConfig, workers: Optional[int] = None) -> TradeoffReport:
    """
    Sweep the measurement count and report utility against leakage.

    Args:
        config (ExperimentConfig): Validated experiment settings
        workers (int): Thread count overriding ``config.workers``; results
            do not depend on it

    Returns:
        TradeoffReport: One row per entry of ``config.m_sweep``
    """
    workers = config.workers if workers is None else workers
    if workers < 1:
        raise InvalidParameterError(f"workers must be positive, got {workers}")

    logger.info(
        f"Starting tradeoff sweep: n={config.n}, m_sweep={list(config.m_sweep)}, "
        f"{config.trials} trials ({config.leakage_trials} attacked), workers={workers}"
    )
    task = build_task(config.task, config.n)
    rows = tuple(_run_point(config, task, m, workers) for m in config.m_sweep)
    logger.info("Tradeoff sweep finished.")
    return TradeoffReport(config=config, rows=rows)


def min_components(source: Union[TradeoffReport, ExperimentConfig],
                   target_accuracy: float,
                   workers: Optional[int] = None) -> Optional[int]:
    """
    Smallest swept m whose mean utility reaches ``target_accuracy``.

    Args:
        source (TradeoffReport | ExperimentConfig): A finished report, or a
            config to run first
        target_accuracy (float): Target in (0, 1]
        workers (int): Thread count when a config has to be run

    Returns:
        int | None: First qualifying m in increasing order, None if no row qualifies
    """
    if not 0 < target_accuracy <= 1:
        raise InvalidParameterError(f"target accuracy must lie in (0, 1], got {target_accuracy}")
    report = source if isinstance(source, TradeoffReport) else run_tradeoff(source, workers)
    for row in sorted(report.rows, key=lambda r: r.m):
        if row.utility_accuracy_mean is not None and row.utility_accuracy_mean >= target_accuracy:
            return row.m
    return None


def summarize(report: TradeoffReport) -> List[str]:
    """Human-readable one-line summaries of a report, for logs and the CLI."""
    lines = []
    for row in report.rows:
        if row.skipped:
            lines.append(f"m={row.m}: skipped ({row.skipped_reason})")
            continue
        leakage = "n/a" if row.leakage_relative_l2_median is None else f"{row.leakage_relative_l2_median:.4f}"
        lines.append(
            f"m={row.m} ratio={row.ratio:.4%} accuracy={row.utility_accuracy_mean:.4f} "
            f"leakage_rel_l2={leakage}"
        )
    return lines
