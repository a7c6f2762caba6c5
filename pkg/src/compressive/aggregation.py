# ========================
# src/compressive/aggregation.py
# ========================

"""
Trial Aggregation Module

Folds per-trial outcomes of one sweep point into the summary row of a
tradeoff report: utility mean and spread, leakage medians and the attack
methods that won.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import numpy as np

from .reconstruction import ReconMetrics

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrialOutcome:
    """What one Monte-Carlo trial produced."""

    trial: int
    correct: int
    total: int
    leakage: Optional[ReconMetrics] = None
    attack_method: Optional[str] = None

    @property
    def accuracy(self) -> float:
        return self.correct / self.total


@dataclass(frozen=True)
class TradeoffRow:
    """Summary of one sweep point; ``skipped_reason`` is set when it could not run."""

    m: int
    ratio: float
    trials: int = 0
    attack_trials: int = 0
    utility_accuracy_mean: Optional[float] = None
    utility_accuracy_std: Optional[float] = None
    leakage_relative_l2_median: Optional[float] = None
    leakage_psnr_median: Optional[float] = None
    attack_used: Optional[str] = None
    attack_wins: Optional[Dict[str, int]] = None
    wall_time_s: Optional[float] = None
    skipped_reason: Optional[str] = None

    @property
    def skipped(self) -> bool:
        return self.skipped_reason is not None

    def to_dict(self) -> Dict[str, Any]:
        psnr = self.leakage_psnr_median
        if psnr is not None and not np.isfinite(psnr):
            psnr = "inf"
        return {
            "m": self.m,
            "ratio": self.ratio,
            "trials": self.trials,
            "attack_trials": self.attack_trials,
            "utility_accuracy_mean": self.utility_accuracy_mean,
            "utility_accuracy_std": self.utility_accuracy_std,
            "leakage_relative_l2_median": self.leakage_relative_l2_median,
            "leakage_psnr_median": psnr,
            "attack_used": self.attack_used,
            "attack_wins": self.attack_wins,
            "wall_time_s": self.wall_time_s,
            "skipped_reason": self.skipped_reason,
        }


class TrialAggregator:
    """
    Collects trial outcomes for one measurement count.
    Outcomes may arrive in any order; summaries are computed in trial order.
    """

    def __init__(self, m: int, n: int):
        """
        Initialize the aggregator.

        Args:
            m (int): Measurement count of this sweep point
            n (int): Signal dimension
        """
        self.m = m
        self.n = n
        self.outcomes: Dict[int, TrialOutcome] = {}
        logger.debug(f"TrialAggregator initialized for m={m}, n={n}")

    def add(self, outcome: TrialOutcome) -> None:
        if outcome.trial in self.outcomes:
            raise ValueError(f"Trial {outcome.trial} was already recorded for m={self.m}")
        self.outcomes[outcome.trial] = outcome

    def _ordered(self) -> List[TrialOutcome]:
        return [self.outcomes[t] for t in sorted(self.outcomes)]

    def finalize(self, wall_time_s: Optional[float] = None) -> TradeoffRow:
        """
        Summarize the recorded trials.

        Args:
            wall_time_s (float): Elapsed time to report, or None

        Returns:
            TradeoffRow: Accuracy mean/std (population), leakage medians and
            the most frequent winning attack method
        """
        ordered = self._ordered()
        if not ordered:
            raise ValueError(f"No trials recorded for m={self.m}")

        accuracies = np.array([o.accuracy for o in ordered])
        attacked = [o for o in ordered if o.leakage is not None]

        relative_l2 = None
        psnr = None
        attack_used = None
        wins = None
        if attacked:
            relative_l2 = float(np.median([o.leakage.relative_l2 for o in attacked]))
            psnr_values = [o.leakage.psnr_db for o in attacked if o.leakage.psnr_db is not None]
            if psnr_values:
                psnr = float(np.median(psnr_values))
            counts = Counter(o.attack_method for o in attacked)
            wins = dict(sorted(counts.items()))
            # Most wins; ties go to the alphabetically first method.
            attack_used = min(wins, key=lambda method: (-wins[method], method))

        row = TradeoffRow(
            m=self.m,
            ratio=self.m / self.n,
            trials=len(ordered),
            attack_trials=len(attacked),
            utility_accuracy_mean=float(np.mean(accuracies)),
            utility_accuracy_std=float(np.std(accuracies)),
            leakage_relative_l2_median=relative_l2,
            leakage_psnr_median=psnr,
            attack_used=attack_used,
            attack_wins=wins,
            wall_time_s=wall_time_s,
        )
        self._log_summary(row)
        return row

    def _log_summary(self, row: TradeoffRow) -> None:
        leakage = "n/a" if row.leakage_relative_l2_median is None else f"{row.leakage_relative_l2_median:.4f}"
        logger.info(
            f"m={row.m} (ratio {row.ratio:.4%}): accuracy {row.utility_accuracy_mean:.4f} "
            f"+/- {row.utility_accuracy_std:.4f}, leakage rel-l2 median {leakage}, attack {row.attack_used}"
        )


def skipped_row(m: int, n: int, reason: str) -> TradeoffRow:
    """Row recorded for a sweep point that could not be evaluated."""
    logger.warning(f"Skipping m={m}: {reason}")
    return TradeoffRow(m=m, ratio=m / n, skipped_reason=reason)
