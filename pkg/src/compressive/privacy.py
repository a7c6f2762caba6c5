# ========================
# src/compressive/privacy.py
# ========================

"""
Privacy Mechanisms Module

The Laplace mechanism with scale b = sensitivity / epsilon, applicable to
released measurements or query answers. Sensitivity is supplied by the
caller.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidParameterError
from .sensing import make_rng

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DpParams:
    """Privacy budget epsilon and l1 sensitivity of the released vector."""

    epsilon: float
    sensitivity: float

    def __post_init__(self):
        if not (np.isfinite(self.epsilon) and self.epsilon > 0):
            raise InvalidParameterError(f"epsilon must be positive, got {self.epsilon}")
        if not (np.isfinite(self.sensitivity) and self.sensitivity > 0):
            raise InvalidParameterError(f"sensitivity must be positive, got {self.sensitivity}")

    @property
    def scale(self) -> float:
        return self.sensitivity / self.epsilon

    def to_dict(self) -> dict:
        return {"epsilon": self.epsilon, "sensitivity": self.sensitivity, "scale": self.scale}


def laplace_scale(params: DpParams) -> float:
    return params.scale


def laplace_noise(rng: np.random.Generator, size: int, scale: float) -> np.ndarray:
    """
    Laplace(0, scale) variates by inverse CDF: scale * sign(u) * ln(1 - 2|u|).

    u is uniform on (-1/2, 1/2); a draw of exactly -1/2 is mapped to 0.
    """
    u = rng.random(size) - 0.5
    u[u == -0.5] = 0.0
    return scale * np.sign(u) * np.log1p(-2.0 * np.abs(u))


def laplace_perturb(values: np.ndarray, params: DpParams, seed: int) -> np.ndarray:
    """
    Add i.i.d. Laplace(0, b) noise to every coordinate.

    Args:
        values (array): Finite values to release
        params (DpParams): Mechanism calibration
        seed (int): 64-bit seed of the noise stream

    Returns:
        np.ndarray: Perturbed copy of ``values``
    """
    values = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise InvalidParameterError("Values to perturb must be finite")
    noise = laplace_noise(make_rng(seed), values.size, params.scale).reshape(values.shape)
    logger.debug(f"Laplace mechanism applied to {values.size} values with scale {params.scale:.6g}")
    return values + noise
