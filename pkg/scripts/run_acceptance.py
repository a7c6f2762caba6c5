#!/usr/bin/env python3
# ========================
# scripts/run_acceptance.py
# ========================

"""
Script to run the long print-defect acceptance sweeps.

Utility: n=16384 (128x128 texture), m=160 (ratio under 1%), gaussian
ensemble, 20 dB measurement SNR, 500 trials, accuracy must reach 0.95.
Leakage: best-of attack (min-norm, OMP k=m/2, ISTA over 9 lambdas in
[1e-3, 10]) on the first 50 trials, median relative l2 must stay >= 0.8.

Usage: python scripts/run_acceptance.py [workers] [--sweep]
"""

import sys
import os
import time
from pathlib import Path

# Add project root to Python path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.compressive.experiment import AttackConfig, DatasetDescriptor, ExperimentConfig
from src.compressive.harness import min_components, run_tradeoff, summarize
from src.compressive.storage import write_text
from src.utils import Config, setup_logging

N = 128 * 128
UTILITY_TARGET = 0.95
LEAKAGE_FLOOR = 0.8


def print_config(m_sweep, trials, attack_trials, workers) -> ExperimentConfig:
    return ExperimentConfig(
        n=N,
        m_sweep=tuple(m_sweep),
        snr_db=20.0,
        trials=trials,
        attack_trials=attack_trials,
        master_seed=2024,
        attack=AttackConfig(kind="best"),
        task=DatasetDescriptor(kind="two_class_print", seed=11, defect_size=24, defect_amplitude=0.5),
        peak=1.0,
        workers=workers,
    )


def main():
    """Run the print-defect acceptance sweep and check its thresholds."""
    args = [a for a in sys.argv[1:] if not a.startswith("--")]
    try:
        workers = int(args[0]) if args else 1
    except ValueError:
        print("Usage: python scripts/run_acceptance.py [workers] [--sweep]")
        sys.exit(2)

    runtime = Config()
    runtime.ensure_directories()
    setup_logging(log_level="INFO", log_file=runtime.LOG_FILE, log_dir=runtime.LOG_DIR)

    print("=" * 60)
    print("PRINT-DEFECT ACCEPTANCE RUN")
    print("=" * 60)

    started = time.perf_counter()
    report = run_tradeoff(print_config([160], trials=500, attack_trials=50, workers=workers))
    row = report.rows[0]
    output = Path(runtime.OUTPUT_DIR) / "acceptance_print_m160.json"
    write_text(report.to_json(), str(output))

    for line in summarize(report):
        print(line)
    utility_ok = row.utility_accuracy_mean >= UTILITY_TARGET
    leakage_ok = row.leakage_relative_l2_median >= LEAKAGE_FLOOR
    print(f"Utility  >= {UTILITY_TARGET}: {'PASS' if utility_ok else 'FAIL'} ({row.utility_accuracy_mean:.4f})")
    print(f"Leakage  >= {LEAKAGE_FLOOR}: {'PASS' if leakage_ok else 'FAIL'} ({row.leakage_relative_l2_median:.4f})")
    print(f"Elapsed: {time.perf_counter() - started:.1f}s, report: {output}")

    sweep_ok = True
    if "--sweep" in sys.argv:
        sweep = run_tradeoff(print_config([32, 64, 160, 512], trials=100, attack_trials=0, workers=workers))
        write_text(sweep.to_json(), str(Path(runtime.OUTPUT_DIR) / "acceptance_print_sweep.json"))
        found = min_components(sweep, UTILITY_TARGET)
        brute = next((r.m for r in sweep.rows if r.utility_accuracy_mean >= UTILITY_TARGET), None)
        sweep_ok = found == brute
        print(f"min_components({UTILITY_TARGET}) = {found} (scan: {brute}) {'PASS' if sweep_ok else 'FAIL'}")

    print("=" * 60)
    return 0 if utility_ok and leakage_ok and sweep_ok else 1


if __name__ == '__main__':
    sys.exit(main())
