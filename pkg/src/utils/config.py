# ========================
# src/utils/config.py
# ========================

"""
Configuration Management

Toolkit runtime settings with environment support, and the parser for
flat ``key = value`` experiment files.
"""

import os
import logging
from pathlib import Path
from typing import Dict, Any, Optional

logger = logging.getLogger(__name__)


class Config:
    """
    Runtime configuration for the toolkit.
    Supports environment variables and default values.
    """

    def __init__(self, config_dict: Optional[Dict[str, Any]] = None):
        """
        Initialize configuration.

        Args:
            config_dict (dict): Optional configuration overrides
        """
        # Logging Configuration
        self.LOG_LEVEL = os.getenv('COMPRESSIVE_LOG_LEVEL', 'WARNING')
        self.LOG_DIR = os.getenv('COMPRESSIVE_LOG_DIR', 'logs')
        self.LOG_FILE = os.getenv('COMPRESSIVE_LOG_FILE') or None

        # Execution
        self.WORKERS = int(os.getenv('COMPRESSIVE_WORKERS', '1'))

        # Outputs
        self.OUTPUT_DIR = os.getenv('COMPRESSIVE_OUTPUT_DIR', 'results')

        # Defaults for commands that take a sensing ensemble
        self.DEFAULT_ENSEMBLE = os.getenv('COMPRESSIVE_DEFAULT_ENSEMBLE', 'gaussian')

        # Override with provided config
        if config_dict:
            self._update_from_dict(config_dict)

    def _update_from_dict(self, config_dict: Dict[str, Any]) -> None:
        """Update configuration from dictionary."""
        for key, value in config_dict.items():
            if hasattr(self, key.upper()):
                setattr(self, key.upper(), value)

    def ensure_directories(self) -> None:
        """Create output and log directories if they don't exist."""
        Path(self.OUTPUT_DIR).mkdir(parents=True, exist_ok=True)
        if self.LOG_FILE:
            Path(self.LOG_DIR).mkdir(parents=True, exist_ok=True)

    def validate_config(self) -> Dict[str, bool]:
        """
        Validate configuration values.

        Returns:
            dict: Validation results for each setting
        """
        valid_log_levels = ['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL']
        return {
            'log_level': str(self.LOG_LEVEL).upper() in valid_log_levels,
            'workers': isinstance(self.WORKERS, int) and self.WORKERS >= 1,
            'default_ensemble': self.DEFAULT_ENSEMBLE in ('gaussian', 'bernoulli', 'identity', 'orthonormal'),
        }


def load_flat_config(file_path: str) -> Dict[str, str]:
    """
    Read a flat ``key = value`` file.

    Blank lines and lines starting with ``#`` are ignored; keys are
    lower-cased; a repeated key is an error.

    Args:
        file_path (str): Path to the configuration file

    Returns:
        dict: Raw string values keyed by setting name
    """
    settings: Dict[str, str] = {}
    with open(file_path, 'r', encoding='utf-8') as f:
        for line_number, raw_line in enumerate(f, start=1):
            line = raw_line.strip()
            if not line or line.startswith('#'):
                continue
            if '=' not in line:
                raise ValueError(f"{file_path}:{line_number}: expected 'key = value', got '{line}'")
            key, value = (part.strip() for part in line.split('=', 1))
            key = key.lower()
            if not key:
                raise ValueError(f"{file_path}:{line_number}: empty key")
            if key in settings:
                raise ValueError(f"{file_path}:{line_number}: duplicate key '{key}'")
            settings[key] = value

    logger.info(f"Loaded {len(settings)} settings from {file_path}")
    return settings
