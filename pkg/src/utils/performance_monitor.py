# ========================
# src/utils/performance_monitor.py
# ========================

"""
Performance Monitoring Utilities

Tracks wall time, trial throughput and peak process memory for
Monte-Carlo sweeps.
"""

import time
import os
import logging
from contextlib import contextmanager
from typing import Dict, Any, Optional

logger = logging.getLogger(__name__)

# Try to import psutil, but provide fallback if not available
try:
    import psutil
    PSUTIL_AVAILABLE = True
except ImportError:
    PSUTIL_AVAILABLE = False
    logger.warning("psutil not available. Memory monitoring will be limited.")


class PerformanceMonitor:
    """
    Performance monitor for one sweep point or command run.
    Tracks elapsed time, trials processed and peak memory.
    """

    def __init__(self, name: str = "Experiment", log_every: int = 100):
        """
        Initialize performance monitor.

        Args:
            name (str): Name for this monitoring session
            log_every (int): Log progress every this many trials
        """
        self.name = name
        self.log_every = log_every
        self.start_time: Optional[float] = None
        self.end_time: Optional[float] = None
        self.peak_memory_mb = 0.0
        self.trials_processed = 0
        self.checkpoints = []

        logger.debug(f"PerformanceMonitor initialized: {name}")

    def start_monitoring(self) -> None:
        """Start performance monitoring."""
        self.start_time = time.perf_counter()
        self.peak_memory_mb = self._get_memory_usage_mb()
        logger.debug(f"{self.name} - monitoring started, memory {self.peak_memory_mb:.2f} MB")

    def update_progress(self, trials: int = 1) -> None:
        """
        Record completed trials.

        Args:
            trials (int): Number of trials finished since the last update
        """
        before = self.trials_processed
        self.trials_processed += trials
        current_memory = self._get_memory_usage_mb()
        self.peak_memory_mb = max(self.peak_memory_mb, current_memory)

        if self.log_every and before // self.log_every != self.trials_processed // self.log_every:
            self._log_progress(current_memory)

    def add_checkpoint(self, name: str, metadata: Optional[Dict[str, Any]] = None) -> None:
        """
        Add a performance checkpoint.

        Args:
            name (str): Checkpoint name
            metadata (dict): Optional metadata to store
        """
        checkpoint = {
            'name': name,
            'elapsed_seconds': self.elapsed_seconds,
            'memory_mb': self._get_memory_usage_mb(),
            'trials_processed': self.trials_processed,
            'metadata': metadata or {}
        }
        self.checkpoints.append(checkpoint)
        logger.debug(f"Checkpoint '{name}': {checkpoint}")

    @property
    def elapsed_seconds(self) -> float:
        if self.start_time is None:
            return 0.0
        end = self.end_time if self.end_time is not None else time.perf_counter()
        return end - self.start_time

    def _log_progress(self, current_memory: float) -> None:
        elapsed = self.elapsed_seconds
        throughput = self.trials_processed / elapsed if elapsed > 0 else 0
        logger.info(
            f"{self.name} - Progress: {self.trials_processed:,} trials, "
            f"{throughput:.1f} trials/sec, "
            f"Memory: {current_memory:.2f} MB"
        )

    def stop_monitoring(self) -> Dict[str, Any]:
        """
        Stop monitoring and return performance summary.

        Returns:
            dict: Performance statistics
        """
        self.end_time = time.perf_counter()
        total_time = self.elapsed_seconds
        throughput = self.trials_processed / total_time if total_time > 0 else 0

        summary = {
            'name': self.name,
            'total_processing_time_seconds': total_time,
            'trials_processed': self.trials_processed,
            'average_throughput_trials_per_second': throughput,
            'peak_memory_usage_mb': self.peak_memory_mb,
            'checkpoints': self.checkpoints
        }

        logger.info(
            f"{self.name} - finished {self.trials_processed:,} trials in {total_time:.2f}s "
            f"({throughput:.1f} trials/sec, peak memory {self.peak_memory_mb:.2f} MB)"
        )
        return summary

    def _get_memory_usage_mb(self) -> float:
        """Get current resident memory in MB, 0.0 when unavailable."""
        if not PSUTIL_AVAILABLE:
            return 0.0
        try:
            return psutil.Process(os.getpid()).memory_info().rss / (1024 * 1024)
        except Exception as e:
            logger.debug(f"Could not get memory usage: {e}")
            return 0.0


@contextmanager
def monitor_performance(name: str = "Experiment", log_every: int = 100):
    """
    Context manager for easy performance monitoring.

    Args:
        name (str): Name for this monitoring session
        log_every (int): Progress logging interval in trials

    Yields:
        PerformanceMonitor: Monitor instance
    """
    monitor = PerformanceMonitor(name, log_every)
    monitor.start_monitoring()
    try:
        yield monitor
    finally:
        monitor.stop_monitoring()
