# ========================
# src/compressive/experiment.py
# ========================

"""
Experiment Configuration Module

Typed, validated settings for a tradeoff sweep, built from the flat
``key = value`` file read by ``src.utils.config.load_flat_config``.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .exceptions import InvalidParameterError
from .privacy import DpParams
from .reconstruction import ATTACK_KINDS, DEFAULT_LAMBDA_GRID
from .sensing import Ensemble, check_seed
from ..utils.config import load_flat_config

logger = logging.getLogger(__name__)

TASK_KINDS = ("sparse_synthetic", "two_class_print", "pgm_dir", "csv")

KNOWN_KEYS = {
    "n", "m_sweep", "ensemble", "sigma", "snr_db", "trials", "attack_trials",
    "master_seed", "attack", "omp_k", "lambda_grid", "max_iters", "tol",
    "task", "task_seed", "sparsity", "amplitude", "defect_size",
    "defect_amplitude", "path", "labels_csv", "peak", "dp_epsilon",
    "dp_sensitivity", "workers", "record_wall_time",
}


@dataclass(frozen=True)
class AttackConfig:
    """Reconstruction attack: omp, ista (lambda grid) or best-of."""

    kind: str = "best"
    omp_k: Optional[int] = None
    lambda_grid: Tuple[float, ...] = DEFAULT_LAMBDA_GRID
    max_iters: int = 500
    tol: float = 1e-6

    def __post_init__(self):
        if self.kind not in ATTACK_KINDS:
            raise InvalidParameterError(f"Unknown attack '{self.kind}'")
        if self.omp_k is not None and self.omp_k < 1:
            raise InvalidParameterError(f"omp_k must be positive, got {self.omp_k}")
        if not self.lambda_grid or any(lam <= 0 for lam in self.lambda_grid):
            raise InvalidParameterError(f"lambda_grid must hold positive values, got {self.lambda_grid}")
        if self.max_iters < 1 or not self.tol > 0:
            raise InvalidParameterError("max_iters and tol must be positive")

    def k_for(self, m: int) -> int:
        return self.omp_k if self.omp_k is not None else max(1, m // 2)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "omp_k": self.omp_k,
            "lambda_grid": list(self.lambda_grid),
            "max_iters": self.max_iters,
            "tol": self.tol,
        }


@dataclass(frozen=True)
class DatasetDescriptor:
    """Where the analysed signals come from."""

    kind: str = "two_class_print"
    seed: int = 0
    sparsity: int = 5
    amplitude: float = 1.0
    defect_size: int = 24
    defect_amplitude: float = 0.5
    path: Optional[str] = None
    labels_csv: Optional[str] = None

    def __post_init__(self):
        if self.kind not in TASK_KINDS:
            raise InvalidParameterError(f"Unknown task '{self.kind}' (expected one of: {', '.join(TASK_KINDS)})")
        check_seed(self.seed, "task_seed")
        if self.sparsity < 1 or self.amplitude <= 0 or self.defect_size < 1 or self.defect_amplitude < 0:
            raise InvalidParameterError("Task parameters must be positive")
        if self.kind in ("pgm_dir", "csv") and not self.path:
            raise InvalidParameterError(f"Task '{self.kind}' requires 'path'")
        if self.kind == "pgm_dir" and not self.labels_csv:
            raise InvalidParameterError("Task 'pgm_dir' requires 'labels_csv'")

    def to_dict(self) -> Dict[str, Any]:
        if self.kind == "sparse_synthetic":
            params = {"sparsity": self.sparsity, "amplitude": self.amplitude}
        elif self.kind == "two_class_print":
            params = {"defect_size": self.defect_size, "defect_amplitude": self.defect_amplitude}
        elif self.kind == "pgm_dir":
            params = {"path": self.path, "labels_csv": self.labels_csv}
        else:
            params = {"path": self.path}
        return {"kind": self.kind, "seed": self.seed, **params}


@dataclass(frozen=True)
class ExperimentConfig:
    """A full tradeoff sweep over measurement counts."""

    n: int
    m_sweep: Tuple[int, ...]
    ensemble: Ensemble = Ensemble.GAUSSIAN
    sigma: float = 0.0
    snr_db: Optional[float] = None
    trials: int = 100
    attack_trials: Optional[int] = None
    master_seed: int = 0
    attack: AttackConfig = field(default_factory=AttackConfig)
    task: DatasetDescriptor = field(default_factory=DatasetDescriptor)
    peak: Optional[float] = None
    dp: Optional[DpParams] = None
    workers: int = 1
    record_wall_time: bool = False

    def __post_init__(self):
        object.__setattr__(self, "ensemble", Ensemble.parse(self.ensemble))
        object.__setattr__(self, "m_sweep", tuple(int(m) for m in self.m_sweep))
        check_seed(self.master_seed, "master_seed")
        if self.n < 1:
            raise InvalidParameterError(f"n must be positive, got {self.n}")
        if not self.m_sweep:
            raise InvalidParameterError("m_sweep must not be empty")
        if any(b <= a for a, b in zip(self.m_sweep, self.m_sweep[1:])):
            raise InvalidParameterError(f"m_sweep must be strictly increasing, got {self.m_sweep}")
        if self.m_sweep[0] < 1 or self.m_sweep[-1] > self.n:
            raise InvalidParameterError(f"m_sweep values must lie in [1, n={self.n}], got {self.m_sweep}")
        if self.ensemble is Ensemble.IDENTITY and self.m_sweep != (self.n,):
            raise InvalidParameterError(f"The identity ensemble only admits m_sweep = [n], got {list(self.m_sweep)}")
        if self.trials < 1:
            raise InvalidParameterError(f"trials must be positive, got {self.trials}")
        if self.attack_trials is not None and self.attack_trials < 0:
            raise InvalidParameterError(f"attack_trials must be nonnegative, got {self.attack_trials}")
        if not np.isfinite(self.sigma) or self.sigma < 0:
            raise InvalidParameterError(f"sigma must be nonnegative, got {self.sigma}")
        if self.peak is not None and not self.peak > 0:
            raise InvalidParameterError(f"peak must be positive, got {self.peak}")
        if self.workers < 1:
            raise InvalidParameterError(f"workers must be positive, got {self.workers}")

    @property
    def leakage_trials(self) -> int:
        if self.attack_trials is None:
            return self.trials
        return min(self.trials, self.attack_trials)

    def to_dict(self) -> Dict[str, Any]:
        """Config echo for reports; ``workers`` is left out since results do not depend on it."""
        return {
            "n": self.n,
            "m_sweep": list(self.m_sweep),
            "ensemble": self.ensemble.value,
            "sigma": self.sigma,
            "snr_db": self.snr_db,
            "trials": self.trials,
            "attack_trials": self.leakage_trials,
            "master_seed": self.master_seed,
            "attack": self.attack.to_dict(),
            "task": self.task.to_dict(),
            "peak": self.peak,
            "dp": self.dp.to_dict() if self.dp else None,
        }

    @classmethod
    def from_mapping(cls, settings: Dict[str, str]) -> "ExperimentConfig":
        """
        Build a config from raw string settings.

        Args:
            settings (dict): Key/value strings as read from a flat config file

        Returns:
            ExperimentConfig: Validated configuration
        """
        unknown = sorted(set(settings) - KNOWN_KEYS)
        if unknown:
            raise InvalidParameterError(f"Unknown configuration keys: {', '.join(unknown)}")
        for required in ("n", "m_sweep"):
            if required not in settings:
                raise InvalidParameterError(f"Missing required configuration key '{required}'")

        get = settings.get
        n = _parse_int(get("n"), "n")
        task_kind = get("task", "two_class_print")
        default_peak = 1.0 if task_kind in ("two_class_print", "pgm_dir") else None

        attack = AttackConfig(
            kind=get("attack", "best"),
            omp_k=_parse_optional(get("omp_k"), _parse_int, "omp_k"),
            lambda_grid=_parse_lambda_grid(get("lambda_grid")),
            max_iters=_parse_int(get("max_iters", "500"), "max_iters"),
            tol=_parse_float(get("tol", "1e-6"), "tol"),
        )
        task = DatasetDescriptor(
            kind=task_kind,
            seed=_parse_int(get("task_seed", "0"), "task_seed"),
            sparsity=_parse_int(get("sparsity", "5"), "sparsity"),
            amplitude=_parse_float(get("amplitude", "1.0"), "amplitude"),
            defect_size=_parse_int(get("defect_size", "24"), "defect_size"),
            defect_amplitude=_parse_float(get("defect_amplitude", "0.5"), "defect_amplitude"),
            path=get("path"),
            labels_csv=get("labels_csv"),
        )

        dp = None
        if "dp_epsilon" in settings or "dp_sensitivity" in settings:
            dp = DpParams(
                epsilon=_parse_float(get("dp_epsilon"), "dp_epsilon"),
                sensitivity=_parse_float(get("dp_sensitivity"), "dp_sensitivity"),
            )

        config = cls(
            n=n,
            m_sweep=tuple(_parse_int(v, "m_sweep") for v in _split_list(settings["m_sweep"])),
            ensemble=Ensemble.parse(get("ensemble", "gaussian")),
            sigma=_parse_float(get("sigma", "0"), "sigma"),
            snr_db=_parse_optional(get("snr_db"), _parse_float, "snr_db"),
            trials=_parse_int(get("trials", "100"), "trials"),
            attack_trials=_parse_optional(get("attack_trials"), _parse_int, "attack_trials"),
            master_seed=_parse_int(get("master_seed", "0"), "master_seed"),
            attack=attack,
            task=task,
            peak=_parse_optional(get("peak"), _parse_float, "peak") if "peak" in settings else default_peak,
            dp=dp,
            workers=_parse_int(get("workers", "1"), "workers"),
            record_wall_time=_parse_bool(get("record_wall_time", "false"), "record_wall_time"),
        )
        logger.info(f"Experiment config: n={config.n}, m_sweep={list(config.m_sweep)}, task={task.kind}")
        return config

    @classmethod
    def from_file(cls, file_path: str) -> "ExperimentConfig":
        return cls.from_mapping(load_flat_config(file_path))


def _split_list(value: str) -> List[str]:
    return [part.strip() for part in value.split(",") if part.strip()]


def _parse_int(value: Any, name: str) -> int:
    """Parse an integer setting, rejecting fractional values."""
    try:
        text = str(value).strip()
        return int(text)
    except (ValueError, TypeError):
        raise InvalidParameterError(f"'{name}' must be an integer, got {value!r}")


def _parse_float(value: Any, name: str) -> float:
    try:
        parsed = float(str(value).strip())
    except (ValueError, TypeError):
        raise InvalidParameterError(f"'{name}' must be a number, got {value!r}")
    if not np.isfinite(parsed):
        raise InvalidParameterError(f"'{name}' must be finite, got {value!r}")
    return parsed


def _parse_bool(value: Any, name: str) -> bool:
    text = str(value).strip().lower()
    if text in ("true", "yes", "1", "on"):
        return True
    if text in ("false", "no", "0", "off"):
        return False
    raise InvalidParameterError(f"'{name}' must be a boolean, got {value!r}")


def _parse_optional(value: Optional[str], parser, name: str):
    if value is None or str(value).strip().lower() in ("", "none", "null"):
        return None
    return parser(value, name)


def _parse_lambda_grid(value: Optional[str]) -> Tuple[float, ...]:
    """Comma list of lambdas, or ``logspace:lo:hi:count`` in decades."""
    if value is None:
        return DEFAULT_LAMBDA_GRID
    text = value.strip()
    if text.startswith("logspace:"):
        parts = text.split(":")
        if len(parts) != 4:
            raise InvalidParameterError(f"lambda_grid logspace form is 'logspace:lo:hi:count', got '{text}'")
        low = _parse_float(parts[1], "lambda_grid")
        high = _parse_float(parts[2], "lambda_grid")
        count = _parse_int(parts[3], "lambda_grid")
        if count < 1:
            raise InvalidParameterError("lambda_grid count must be positive")
        return tuple(float(v) for v in np.logspace(low, high, count))
    return tuple(_parse_float(v, "lambda_grid") for v in _split_list(text))
