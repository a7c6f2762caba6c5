# ========================
# src/utils/__init__.py
# ========================

"""
Utilities Package

Configuration, logging and performance monitoring shared by the toolkit.
"""

from .config import Config, load_flat_config
from .performance_monitor import monitor_performance, PerformanceMonitor
from .logging_setup import setup_logging

__all__ = [
    'Config',
    'load_flat_config',
    'monitor_performance',
    'PerformanceMonitor',
    'setup_logging',
]
