#!/usr/bin/env python3
# ========================
# main.py
# ========================

"""
Main Entry Point for the Compressive Analysis Toolkit

    python main.py gen-matrix --m 160 --n 16384 --seed 7 --out phi.csmx
    python main.py tradeoff --config experiment.cfg --out report.json

Run ``python main.py --help`` for the full list of subcommands.
"""

import sys
from pathlib import Path

# Add the project root to Python path
sys.path.insert(0, str(Path(__file__).parent))

from src.compressive.cli import cli_main

if __name__ == '__main__':
    sys.exit(cli_main(sys.argv[1:]))
