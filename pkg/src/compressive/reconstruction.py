# ========================
# src/compressive/reconstruction.py
# ========================

"""
Reconstruction Attack Module

Sparse-recovery solvers used as the adversary's attack on compressed
measurements, assuming full knowledge of the sensing matrix, plus
recovery-quality metrics.

- omp: greedy orthogonal matching pursuit with QR least-squares refits
- ista / ista_grid: iterative soft-thresholding on the lasso objective
- min_norm_attack: minimum-norm least squares, exact for invertible Phi
- run_attack: best-of selection over the configured solvers
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import solve_triangular

from .exceptions import (
    InvalidDimensionsError,
    InvalidParameterError,
    SolverDegenerateError,
    UndefinedMetricError,
)
from .sensing import Measurement, SensingMatrix, Signal, make_rng, standard_normal

logger = logging.getLogger(__name__)

EARLY_STOP_RESIDUAL = 1e-12
RANK_TOLERANCE = 1e-10
POWER_ITERATIONS = 100
POWER_TOLERANCE = 1e-10
DEFAULT_LAMBDA_GRID: Tuple[float, ...] = tuple(float(v) for v in np.logspace(-3, 1, 9))

ATTACK_KINDS = ("omp", "ista", "best")


@dataclass(frozen=True, eq=False)
class SparseEstimate:
    """An attack's estimate x_hat; ``support`` is derived from the nonzeros."""

    values: np.ndarray
    iterations: int
    residual_norm: float
    support: Tuple[int, ...] = field(init=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, copy=True)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "support", tuple(int(i) for i in np.flatnonzero(values)))
        if self.residual_norm < 0:
            raise InvalidParameterError("Residual norm cannot be negative")

    def to_dict(self) -> dict:
        return {
            "values": self.values.tolist(),
            "support": list(self.support),
            "iterations": self.iterations,
            "residual_norm": self.residual_norm,
        }


@dataclass(frozen=True)
class ReconMetrics:
    """Leakage metrics of one estimate against the ground truth."""

    relative_l2: float
    psnr_db: Optional[float] = None
    support_recovered: Optional[bool] = None

    def to_dict(self) -> dict:
        psnr = self.psnr_db
        if psnr is not None and not np.isfinite(psnr):
            psnr = "inf"
        return {
            "relative_l2": self.relative_l2,
            "psnr_db": psnr,
            "support_recovered": self.support_recovered,
        }


@dataclass(frozen=True)
class AttackOutcome:
    """The winning estimate of ``run_attack`` and how it was obtained."""

    method: str
    estimate: SparseEstimate
    metrics: ReconMetrics


def _check_measurement(matrix: SensingMatrix, y: Measurement) -> None:
    if y.m != matrix.m:
        raise InvalidDimensionsError(f"Measurement length {y.m} does not match matrix rows {matrix.m}")


def _estimate(matrix: SensingMatrix, b: np.ndarray, x: np.ndarray, iterations: int) -> SparseEstimate:
    residual = float(np.linalg.norm(b - matrix.entries @ x))
    return SparseEstimate(values=x, iterations=iterations, residual_norm=residual)


def _qr_lstsq(columns: np.ndarray, b: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(columns)
    diag = np.abs(np.diag(r))
    if diag.size == 0 or diag.min() <= RANK_TOLERANCE * max(diag.max(), 1.0):
        raise SolverDegenerateError(
            f"Least-squares refit on {columns.shape[1]} columns is rank deficient"
        )
    return solve_triangular(r, q.T @ b)


def omp(matrix: SensingMatrix, y: Measurement, k: int) -> SparseEstimate:
    """
    Orthogonal matching pursuit.

    Each iteration selects the column with the largest absolute correlation
    with the residual, normalized by the column norm (ties go to the lowest
    index), then refits all selected columns by QR least squares. Stops after
    ``k`` selections or once the residual norm drops below 1e-12.

    Args:
        matrix (SensingMatrix): Known sensing matrix
        y (Measurement): Compressed sample
        k (int): Maximum support size, 1 <= k <= m

    Returns:
        SparseEstimate: Estimate with at most k nonzeros
    """
    _check_measurement(matrix, y)
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or not 1 <= k <= matrix.m:
        raise InvalidParameterError(f"OMP sparsity k must satisfy 1 <= k <= m={matrix.m}, got {k}")

    A = matrix.entries
    b = y.values
    x = np.zeros(matrix.n)

    norms = np.linalg.norm(A, axis=0)
    usable = norms > 0
    safe_norms = np.where(usable, norms, 1.0)

    residual = b.copy()
    if np.linalg.norm(residual) < EARLY_STOP_RESIDUAL:
        return _estimate(matrix, b, x, 0)

    support: List[int] = []
    coef = np.zeros(0)
    iterations = 0
    while iterations < k:
        iterations += 1
        scores = np.where(usable, np.abs(A.T @ residual) / safe_norms, 0.0)
        scores[support] = -1.0
        support.append(int(np.argmax(scores)))

        coef = _qr_lstsq(A[:, support], b)
        residual = b - A[:, support] @ coef
        if np.linalg.norm(residual) < EARLY_STOP_RESIDUAL:
            break

    x[support] = coef
    logger.debug(f"OMP finished after {iterations} iterations, support size {len(support)}")
    return _estimate(matrix, b, x, iterations)


def spectral_norm_sq(matrix: SensingMatrix,
                     iterations: int = POWER_ITERATIONS,
                     tol: float = POWER_TOLERANCE) -> float:
    """
    Largest eigenvalue of Phi^T Phi by power iteration.

    The start vector is a fixed gaussian draw from PCG64(0) so the estimate
    is deterministic.
    """
    A = matrix.entries
    v = standard_normal(make_rng(0), matrix.n)
    v /= np.linalg.norm(v)
    estimate = 0.0
    for _ in range(iterations):
        w = A.T @ (A @ v)
        updated = float(np.linalg.norm(w))
        if updated == 0.0:
            return 0.0
        v = w / updated
        converged = abs(updated - estimate) <= tol * updated
        estimate = updated
        if converged:
            break
    return estimate


def lasso_objective(matrix: SensingMatrix, y: Measurement, x: np.ndarray, lam: float) -> float:
    """0.5 * ||y - Phi x||^2 + lam * ||x||_1"""
    residual = y.values - matrix.entries @ x
    return float(0.5 * residual @ residual + lam * np.abs(x).sum())


def _soft_threshold(z: np.ndarray, threshold) -> np.ndarray:
    return np.sign(z) * np.maximum(np.abs(z) - threshold, 0.0)


def ista_grid(matrix: SensingMatrix,
              y: Measurement,
              lambdas: Sequence[float],
              max_iters: int,
              tol: float,
              callback: Optional[Callable[[int, np.ndarray], None]] = None) -> List[SparseEstimate]:
    """
    ISTA for every lambda of a grid, vectorized over the grid.

    Each column starts at zero, takes proximal-gradient steps of size 1/L
    (L from ``spectral_norm_sq``) and freezes once its iterate change in the
    infinity norm drops below ``tol``.

    Args:
        matrix (SensingMatrix): Known sensing matrix
        y (Measurement): Compressed sample
        lambdas (sequence): Positive regularization weights
        max_iters (int): Iteration cap per lambda
        tol (float): Convergence threshold on the iterate change
        callback (callable): Optional ``callback(iteration, X)`` with the
            n x len(lambdas) iterate matrix after each step

    Returns:
        list[SparseEstimate]: One estimate per lambda, in grid order
    """
    _check_measurement(matrix, y)
    lam = np.asarray(lambdas, dtype=np.float64).ravel()
    if lam.size == 0 or not np.all(lam > 0):
        raise InvalidParameterError(f"ISTA lambdas must be positive, got {list(lam)}")
    if not tol > 0:
        raise InvalidParameterError(f"ISTA tolerance must be positive, got {tol}")
    if max_iters < 1:
        raise InvalidParameterError(f"ISTA max_iters must be positive, got {max_iters}")

    lipschitz = spectral_norm_sq(matrix)
    if lipschitz <= 0:
        raise SolverDegenerateError("Sensing matrix is zero; ISTA step size undefined")
    step = 1.0 / lipschitz

    A = matrix.entries
    b = y.values
    X = np.zeros((matrix.n, lam.size))
    iterations = np.zeros(lam.size, dtype=int)
    active = np.ones(lam.size, dtype=bool)

    for iteration in range(1, max_iters + 1):
        idx = np.flatnonzero(active)
        current = X[:, idx]
        gradient = A.T @ (A @ current - b[:, None])
        updated = _soft_threshold(current - step * gradient, step * lam[idx])
        change = np.max(np.abs(updated - current), axis=0)
        X[:, idx] = updated
        iterations[idx] = iteration
        if callback is not None:
            callback(iteration, X)
        active[idx[change < tol]] = False
        if not active.any():
            break

    logger.debug(f"ISTA grid of {lam.size} lambdas finished, iterations {iterations.tolist()}")
    return [_estimate(matrix, b, X[:, j], int(iterations[j])) for j in range(lam.size)]


def ista(matrix: SensingMatrix,
         y: Measurement,
         lam: float,
         max_iters: int = 500,
         tol: float = 1e-6,
         callback: Optional[Callable[[int, np.ndarray], None]] = None) -> SparseEstimate:
    """Iterative soft-thresholding for a single lambda; see ``ista_grid``."""
    column_callback = None
    if callback is not None:
        def column_callback(iteration, X):
            callback(iteration, X[:, 0])
    return ista_grid(matrix, y, [lam], max_iters, tol, column_callback)[0]


def min_norm_attack(matrix: SensingMatrix, y: Measurement) -> SparseEstimate:
    """Minimum-norm least-squares estimate pinv(Phi) y."""
    _check_measurement(matrix, y)
    x, *_ = np.linalg.lstsq(matrix.entries, y.values, rcond=None)
    return _estimate(matrix, y.values, x, 1)


def evaluate_reconstruction(x_true: Signal,
                            estimate: SparseEstimate,
                            peak: Optional[float] = None) -> ReconMetrics:
    """
    Score an estimate against the ground truth.

    Args:
        x_true (Signal): Ground-truth signal
        estimate (SparseEstimate): Attack output
        peak (float): Peak signal value; enables PSNR when given

    Returns:
        ReconMetrics: relative l2 error, PSNR (dB) and support recovery
    """
    truth = x_true.values
    if estimate.values.size != truth.size:
        raise InvalidDimensionsError(
            f"Estimate length {estimate.values.size} does not match ground truth {truth.size}"
        )
    truth_norm = float(np.linalg.norm(truth))
    if truth_norm == 0:
        raise UndefinedMetricError("Relative error is undefined for a zero ground truth")

    error_sq = float(np.sum((estimate.values - truth) ** 2))
    relative_l2 = float(np.sqrt(error_sq) / truth_norm)

    psnr_db = None
    if peak is not None:
        if not peak > 0:
            raise InvalidParameterError(f"PSNR peak must be positive, got {peak}")
        psnr_db = float("inf") if error_sq == 0 else float(10 * np.log10(peak ** 2 * truth.size / error_sq))

    true_support = np.flatnonzero(truth)
    support_recovered = None
    if true_support.size < truth.size:
        support_recovered = tuple(int(i) for i in true_support) == estimate.support

    return ReconMetrics(relative_l2=relative_l2, psnr_db=psnr_db, support_recovered=support_recovered)


def run_attack(matrix: SensingMatrix,
               y: Measurement,
               x_true: Signal,
               kind: str = "best",
               omp_k: Optional[int] = None,
               lambdas: Sequence[float] = DEFAULT_LAMBDA_GRID,
               max_iters: int = 500,
               tol: float = 1e-6,
               peak: Optional[float] = None) -> AttackOutcome:
    """
    Run the configured attack and keep the estimate with the lowest error.

    Candidates, in tie-break order: min-norm least squares (``best`` only),
    OMP (``omp`` and ``best``), then the ISTA grid in lambda order (``ista``
    and ``best``). Selecting with the ground truth makes this an optimistic
    adversary.

    Returns:
        AttackOutcome: winning method name, estimate and metrics
    """
    if kind not in ATTACK_KINDS:
        raise InvalidParameterError(f"Unknown attack '{kind}' (expected one of: {', '.join(ATTACK_KINDS)})")
    k = omp_k if omp_k is not None else max(1, matrix.m // 2)

    candidates: List[Tuple[str, SparseEstimate]] = []
    if kind == "best":
        candidates.append(("min_norm", min_norm_attack(matrix, y)))
    if kind in ("omp", "best"):
        try:
            candidates.append((f"omp(k={k})", omp(matrix, y, k)))
        except SolverDegenerateError as e:
            if kind == "omp":
                raise
            logger.warning(f"OMP candidate skipped: {e}")
    if kind in ("ista", "best"):
        estimates = ista_grid(matrix, y, lambdas, max_iters, tol)
        candidates.extend((f"ista(lambda={lam:.6g})", est) for lam, est in zip(lambdas, estimates))

    best: Optional[AttackOutcome] = None
    for method, estimate in candidates:
        metrics = evaluate_reconstruction(x_true, estimate, peak)
        if best is None or metrics.relative_l2 < best.metrics.relative_l2:
            best = AttackOutcome(method=method, estimate=estimate, metrics=metrics)
    return best
