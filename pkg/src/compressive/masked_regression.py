# ========================
# src/compressive/masked_regression.py
# ========================

"""
Masked Regression Module

Least-squares regression on raw data and on matrix-masked data (MX, My),
so coefficient recovery can be compared between the two.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import qr, solve_triangular

from .exceptions import InvalidDimensionsError, SingularDesignError, UnderDeterminedMaskError
from .sensing import Ensemble, SensingMatrix, generate_matrix

logger = logging.getLogger(__name__)

RANK_TOLERANCE = 1e-10


@dataclass(frozen=True, eq=False)
class RegressionProblem:
    """Design matrix X (N x p) and response y (N)."""

    X: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)

    def __post_init__(self):
        X = np.array(self.X, dtype=np.float64, copy=True)
        y = np.array(self.y, dtype=np.float64, copy=True)
        if X.ndim == 1:
            X = X[:, None]
        if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.size:
            raise InvalidDimensionsError(f"Design {X.shape} and response {y.shape} do not conform")
        if X.shape[0] <= X.shape[1]:
            raise InvalidDimensionsError(
                f"Need more observations than predictors, got N={X.shape[0]}, p={X.shape[1]}"
            )
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def N(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True, eq=False)
class RegressionFit:
    """Fitted coefficients; a masked fit holds no raw rows of X or y."""

    beta: np.ndarray
    rss: float
    masked: bool
    mask_rows: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "beta": self.beta.tolist(),
            "rss": self.rss,
            "masked": self.masked,
            "mask_rows": self.mask_rows,
        }


def _check_rank(X: np.ndarray) -> None:
    # Column-pivoted QR reveals the numerical rank.
    _, r, _ = qr(X, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    if diag.size == 0 or diag[0] == 0 or diag[-1] <= RANK_TOLERANCE * diag[0]:
        raise SingularDesignError(f"Design matrix of shape {X.shape} is not of full column rank")


def _qr_fit(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    _check_rank(X)
    q, r = np.linalg.qr(X)
    return solve_triangular(r, q.T @ y)


def ols(problem: RegressionProblem) -> RegressionFit:
    """Ordinary least squares on the raw data, solved through QR."""
    beta = _qr_fit(problem.X, problem.y)
    residual = problem.y - problem.X @ beta
    return RegressionFit(beta=beta, rss=float(residual @ residual), masked=False)


def masked_ols(problem: RegressionProblem, mask: SensingMatrix) -> RegressionFit:
    """
    Least squares on the masked release (MX, My).

    Args:
        problem (RegressionProblem): Raw regression data
        mask (SensingMatrix): m x N mask with p < m <= N

    Returns:
        RegressionFit: Coefficients fitted in masked space
    """
    if mask.n != problem.N:
        raise InvalidDimensionsError(f"Mask has {mask.n} columns, data has {problem.N} rows")
    if mask.m <= problem.p:
        raise UnderDeterminedMaskError(
            f"Mask keeps {mask.m} rows, need more than p={problem.p} predictors"
        )
    masked_X = mask.entries @ problem.X
    masked_y = mask.entries @ problem.y
    beta = _qr_fit(masked_X, masked_y)
    residual = masked_y - masked_X @ beta
    logger.debug(f"Masked OLS with {mask.ensemble.value} mask of {mask.m} rows")
    return RegressionFit(beta=beta, rss=float(residual @ residual), masked=True, mask_rows=mask.m)


def orthonormal_mask(seed: int, m: int, n: int) -> SensingMatrix:
    """Mask with orthonormal rows; square masks satisfy M^T M = I."""
    return generate_matrix(seed, m, n, Ensemble.ORTHONORMAL)


def relative_coefficient_error(beta: np.ndarray, reference: np.ndarray) -> float:
    """||beta - reference|| / ||reference||"""
    reference = np.asarray(reference, dtype=np.float64)
    scale = np.linalg.norm(reference)
    if scale == 0:
        return float(np.linalg.norm(np.asarray(beta) - reference))
    return float(np.linalg.norm(np.asarray(beta) - reference) / scale)
