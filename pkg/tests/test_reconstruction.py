# ========================
# tests/test_reconstruction.py
# ========================

import unittest
import sys
import os
from itertools import combinations

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

# Add the project root to Python path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.compressive.exceptions import InvalidParameterError, UndefinedMetricError
from src.compressive.reconstruction import (
    DEFAULT_LAMBDA_GRID,
    SparseEstimate,
    evaluate_reconstruction,
    ista,
    ista_grid,
    lasso_objective,
    min_norm_attack,
    omp,
    run_attack,
    spectral_norm_sq,
)
from src.compressive.sensing import Signal, acquire, generate_matrix, make_rng


def _sparse_instance(seed, n, m, k):
    rng = make_rng(seed)
    x = np.zeros(n)
    support = rng.choice(n, size=k, replace=False)
    x[support] = rng.normal(size=k) + np.sign(rng.normal(size=k))
    matrix = generate_matrix(seed, m, n, "gaussian")
    return matrix, Signal(values=x), acquire(matrix, Signal(values=x))


def _coordinate_descent(A, b, lam, sweeps=100000, tol=1e-15):
    """Cyclic coordinate descent for 0.5||b - Ax||^2 + lam ||x||_1."""
    x = np.zeros(A.shape[1])
    col_sq = np.sum(A ** 2, axis=0)
    residual = b.copy()
    for _ in range(sweeps):
        largest = 0.0
        for j in range(A.shape[1]):
            rho = A[:, j] @ residual + col_sq[j] * x[j]
            updated = np.sign(rho) * max(abs(rho) - lam, 0.0) / col_sq[j]
            delta = updated - x[j]
            if delta:
                residual -= delta * A[:, j]
                x[j] = updated
                largest = max(largest, abs(delta))
        if largest < tol:
            break
    return x


class TestOmp(unittest.TestCase):
    """Orthogonal matching pursuit."""

    def test_identity_single_atom(self):
        matrix = generate_matrix(0, 4, 4, "identity")
        y = acquire(matrix, Signal(values=[0.0, 3.0, 0.0, 0.0]))
        estimate = omp(matrix, y, 1)
        assert_array_equal(estimate.values, [0.0, 3.0, 0.0, 0.0])
        self.assertEqual(estimate.support, (1,))

    def test_zero_measurement_stops_immediately(self):
        matrix = generate_matrix(1, 5, 12, "gaussian")
        estimate = omp(matrix, acquire(matrix, Signal(values=np.zeros(12))), 3)
        assert_array_equal(estimate.values, np.zeros(12))
        self.assertEqual(estimate.support, ())
        self.assertEqual(estimate.iterations, 0)

    def test_k_larger_than_m(self):
        matrix = generate_matrix(1, 3, 8, "gaussian")
        y = acquire(matrix, Signal(values=np.ones(8)))
        with self.assertRaises(InvalidParameterError):
            omp(matrix, y, 4)
        with self.assertRaises(InvalidParameterError):
            omp(matrix, y, 0)

    def test_support_never_exceeds_m(self):
        matrix = generate_matrix(4, 6, 40, "gaussian")
        y = acquire(matrix, Signal(values=make_rng(4).normal(size=40)))
        estimate = omp(matrix, y, 6)
        self.assertLessEqual(len(estimate.support), 6)
        self.assertGreaterEqual(estimate.residual_norm, 0.0)

    def test_matches_exhaustive_support_search(self):
        # k-iteration OMP at m=6 sometimes makes a wrong first pick the refit
        # cannot undo; 79 of the 100 seeded instances below recover exactly.
        checked = 0
        exact = 0
        for seed in range(100):
            matrix, x, y = _sparse_instance(seed, n=8, m=6, k=2)
            A = matrix.entries
            best_support, best_residual = None, np.inf
            for support in combinations(range(8), 2):
                coef, *_ = np.linalg.lstsq(A[:, support], y.values, rcond=None)
                residual = np.linalg.norm(y.values - A[:, support] @ coef)
                if residual < best_residual:
                    best_support, best_residual = support, residual
            true_support = tuple(np.flatnonzero(x.values))
            if best_residual > 1e-9 or best_support != true_support:
                continue
            checked += 1
            estimate = omp(matrix, y, 2)
            metrics = evaluate_reconstruction(x, estimate)
            if set(estimate.support) == set(best_support):
                self.assertLessEqual(metrics.relative_l2, 1e-8, f"seed {seed}")
            if metrics.relative_l2 <= 1e-8:
                exact += 1
        self.assertGreater(checked, 50)
        self.assertGreaterEqual(exact / checked, 0.79)

    def test_single_atom_recovery(self):
        for seed in range(200):
            matrix, x, y = _sparse_instance(seed, n=32, m=6, k=1)
            self.assertTrue(evaluate_reconstruction(x, omp(matrix, y, 1)).support_recovered, f"seed {seed}")

    def test_exact_recovery_regime(self):
        recovered = 0
        for seed in range(100):
            matrix, x, y = _sparse_instance(seed, n=256, m=80, k=5)
            if evaluate_reconstruction(x, omp(matrix, y, 5)).support_recovered:
                recovered += 1
        self.assertGreaterEqual(recovered, 95)


class TestIsta(unittest.TestCase):
    """Iterative soft thresholding."""

    def test_identity_with_vanishing_lambda(self):
        matrix = generate_matrix(0, 5, 5, "identity")
        values = np.array([1.5, -2.0, 0.0, 0.25, 3.0])
        estimate = ista(matrix, acquire(matrix, Signal(values=values)), 1e-12)
        assert_allclose(estimate.values, values, atol=1e-6)

    def test_large_lambda_gives_zero(self):
        matrix = generate_matrix(3, 6, 20, "gaussian")
        y = acquire(matrix, Signal(values=make_rng(3).normal(size=20)))
        lam = float(np.max(np.abs(matrix.entries.T @ y.values)))
        estimate = ista(matrix, y, lam)
        assert_array_equal(estimate.values, np.zeros(20))
        self.assertEqual(estimate.support, ())

    def test_invalid_parameters(self):
        matrix = generate_matrix(3, 2, 4, "gaussian")
        y = acquire(matrix, Signal(values=np.ones(4)))
        with self.assertRaises(InvalidParameterError):
            ista(matrix, y, 0.0)
        with self.assertRaises(InvalidParameterError):
            ista(matrix, y, 0.1, tol=0.0)
        with self.assertRaises(InvalidParameterError):
            ista(matrix, y, -1.0)

    def test_objective_is_non_increasing(self):
        matrix = generate_matrix(8, 6, 10, "gaussian")
        y = acquire(matrix, Signal(values=make_rng(8).normal(size=10)))
        objectives = []
        ista(matrix, y, 0.1, max_iters=300, tol=1e-12,
             callback=lambda iteration, x: objectives.append(lasso_objective(matrix, y, x, 0.1)))
        self.assertGreater(len(objectives), 1)
        start = lasso_objective(matrix, y, np.zeros(10), 0.1)
        for before, after in zip([start] + objectives, objectives):
            self.assertLessEqual(after, before + 1e-12 * max(1.0, abs(before)))

    def test_agrees_with_coordinate_descent(self):
        for seed in range(20):
            matrix = generate_matrix(100 + seed, 6, 10, "gaussian")
            y = acquire(matrix, Signal(values=make_rng(seed).normal(size=10)))
            estimate = ista(matrix, y, 0.1, max_iters=50000, tol=1e-13)
            oracle = _coordinate_descent(matrix.entries, y.values, 0.1)
            self.assertAlmostEqual(
                lasso_objective(matrix, y, estimate.values, 0.1),
                lasso_objective(matrix, y, oracle, 0.1),
                delta=1e-6,
            )

    def test_grid_matches_single_runs(self):
        matrix = generate_matrix(21, 8, 30, "gaussian")
        y = acquire(matrix, Signal(values=make_rng(21).normal(size=30)))
        lambdas = [0.01, 0.1, 1.0]
        grid = ista_grid(matrix, y, lambdas, max_iters=200, tol=1e-8)
        for lam, estimate in zip(lambdas, grid):
            single = ista(matrix, y, lam, max_iters=200, tol=1e-8)
            assert_allclose(estimate.values, single.values, atol=1e-8)

    def test_spectral_norm(self):
        matrix = generate_matrix(5, 7, 15, "gaussian")
        expected = np.linalg.eigvalsh(matrix.entries.T @ matrix.entries).max()
        assert_allclose(spectral_norm_sq(matrix), expected, rtol=1e-6)


class TestMetricsAndAttacks(unittest.TestCase):

    def test_perfect_estimate(self):
        truth = Signal(values=[1.0, 0.0, -2.0])
        metrics = evaluate_reconstruction(truth, SparseEstimate(values=truth.values, iterations=1, residual_norm=0.0), peak=1.0)
        self.assertEqual(metrics.relative_l2, 0.0)
        self.assertEqual(metrics.psnr_db, float("inf"))
        self.assertTrue(metrics.support_recovered)
        self.assertEqual(metrics.to_dict()["psnr_db"], "inf")

    def test_zero_estimate(self):
        truth = Signal(values=[3.0, 4.0])
        metrics = evaluate_reconstruction(truth, SparseEstimate(values=np.zeros(2), iterations=0, residual_norm=5.0))
        self.assertEqual(metrics.relative_l2, 1.0)
        self.assertIsNone(metrics.psnr_db)
        # Dense ground truth has no support to recover.
        self.assertIsNone(metrics.support_recovered)

    def test_hand_computed_psnr(self):
        truth = Signal(values=[1.0, 1.0, 1.0, 1.0])
        estimate = SparseEstimate(values=truth.values + 0.1, iterations=1, residual_norm=0.0)
        metrics = evaluate_reconstruction(truth, estimate, peak=1.0)
        self.assertAlmostEqual(metrics.relative_l2, 0.1, places=12)
        self.assertAlmostEqual(metrics.psnr_db, 20.0, places=9)

    def test_zero_truth_is_undefined(self):
        with self.assertRaises(UndefinedMetricError):
            evaluate_reconstruction(Signal(values=np.zeros(3)),
                                    SparseEstimate(values=np.ones(3), iterations=1, residual_norm=0.0))

    def test_min_norm_exact_when_invertible(self):
        matrix = generate_matrix(0, 6, 6, "orthonormal")
        truth = Signal(values=make_rng(1).normal(size=6))
        estimate = min_norm_attack(matrix, acquire(matrix, truth))
        assert_allclose(estimate.values, truth.values, atol=1e-10)

    def test_best_attack_prefers_lowest_error(self):
        matrix = generate_matrix(0, 16, 16, "identity")
        truth = Signal(values=make_rng(2).normal(size=16))
        outcome = run_attack(matrix, acquire(matrix, truth), truth, kind="best")
        self.assertEqual(outcome.method, "min_norm")
        self.assertLess(outcome.metrics.relative_l2, 1e-12)

    def test_unknown_attack(self):
        matrix = generate_matrix(0, 2, 2, "identity")
        truth = Signal(values=[1.0, 2.0])
        with self.assertRaises(InvalidParameterError):
            run_attack(matrix, acquire(matrix, truth), truth, kind="lp")

    def test_attack_fails_at_extreme_compression(self):
        errors = []
        for seed in range(50):
            matrix = generate_matrix(seed, 40, 4096, "gaussian")
            truth = Signal(values=make_rng(1000 + seed).normal(size=4096))
            outcome = run_attack(matrix, acquire(matrix, truth), truth, kind="ista",
                                 lambdas=DEFAULT_LAMBDA_GRID, max_iters=500)
            errors.append(outcome.metrics.relative_l2)
        self.assertGreaterEqual(float(np.median(errors)), 0.8)


if __name__ == '__main__':
    unittest.main()
