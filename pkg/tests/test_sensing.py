# ========================
# tests/test_sensing.py
# ========================

import unittest
import sys
import os

import numpy as np
from numpy.testing import assert_array_equal, assert_allclose

# Add the project root to Python path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.compressive.exceptions import InvalidDimensionsError, InvalidParameterError
from src.compressive.sensing import (
    Ensemble,
    MAX_SEED,
    Measurement,
    SensingMatrix,
    Signal,
    acquire,
    acquire_noisy,
    compression_ratio,
    derive_seed,
    generate_matrix,
    snr_sigma,
)


def _fixed_matrix(entries) -> SensingMatrix:
    entries = np.asarray(entries, dtype=float)
    return SensingMatrix(seed=0, m=entries.shape[0], n=entries.shape[1], ensemble=Ensemble.GAUSSIAN, entries=entries)


class TestGenerateMatrix(unittest.TestCase):
    """Ensemble definitions and determinism."""

    def test_identity_ensemble(self):
        matrix = generate_matrix(123, 3, 3, "identity")
        assert_array_equal(matrix.entries, np.eye(3))

    def test_identity_requires_square(self):
        with self.assertRaises(InvalidDimensionsError):
            generate_matrix(0, 2, 3, Ensemble.IDENTITY)

    def test_random_ensembles_reject_tall_matrices(self):
        for ensemble in ("gaussian", "bernoulli", "orthonormal"):
            with self.assertRaises(InvalidDimensionsError):
                generate_matrix(0, 5, 4, ensemble)

    def test_bernoulli_values(self):
        matrix = generate_matrix(42, 3, 8, Ensemble.BERNOULLI)
        scale = 1 / np.sqrt(3)
        self.assertTrue(np.all(np.isclose(np.abs(matrix.entries), scale, rtol=0, atol=0)))
        self.assertEqual(set(np.unique(matrix.entries)), {scale, -scale})

    def test_gaussian_determinism(self):
        a = generate_matrix(7, 2, 4, "gaussian")
        b = generate_matrix(7, 2, 4, "gaussian")
        self.assertEqual(a.entries.tobytes(), b.entries.tobytes())
        c = generate_matrix(8, 2, 4, "gaussian")
        self.assertFalse(np.array_equal(a.entries, c.entries))

    def test_gaussian_variance(self):
        matrix = generate_matrix(5, 50, 4000, Ensemble.GAUSSIAN)
        self.assertAlmostEqual(float(matrix.entries.mean()), 0.0, delta=0.01 / np.sqrt(50) * 3)
        assert_allclose(matrix.entries.var(), 1 / 50, rtol=0.03)

    def test_orthonormal_rows(self):
        matrix = generate_matrix(3, 6, 10, Ensemble.ORTHONORMAL)
        assert_allclose(matrix.entries @ matrix.entries.T, np.eye(6), atol=1e-12)

    def test_entries_are_read_only(self):
        matrix = generate_matrix(1, 2, 3, "gaussian")
        with self.assertRaises(ValueError):
            matrix.entries[0, 0] = 1.0

    def test_seed_range(self):
        generate_matrix(MAX_SEED, 1, 2, "gaussian")
        with self.assertRaises(InvalidParameterError):
            generate_matrix(MAX_SEED + 1, 1, 2, "gaussian")
        with self.assertRaises(InvalidParameterError):
            generate_matrix(-1, 1, 2, "gaussian")

    def test_unknown_ensemble(self):
        with self.assertRaises(InvalidParameterError):
            generate_matrix(0, 1, 2, "fourier")

    def test_ensemble_codes(self):
        self.assertEqual([e.code for e in Ensemble], [0, 1, 2, 3])
        self.assertIs(Ensemble.from_code(1), Ensemble.BERNOULLI)
        with self.assertRaises(InvalidParameterError):
            Ensemble.from_code(9)


class TestAcquire(unittest.TestCase):
    """Noiseless and noisy acquisition."""

    def test_identity_acquisition(self):
        y = acquire(generate_matrix(0, 3, 3, "identity"), Signal(values=[2.0, -1.0, 5.0]))
        assert_array_equal(y.values, [2.0, -1.0, 5.0])
        self.assertEqual(y.noise_sigma, 0.0)

    def test_hand_computed_product(self):
        y = acquire(_fixed_matrix([[1, 0, 1], [0, 1, 0]]), Signal(values=[2, 3, 4]))
        assert_array_equal(y.values, [6.0, 3.0])

    def test_zero_signal(self):
        y = acquire(generate_matrix(9, 4, 10, "gaussian"), Signal(values=np.zeros(10)))
        assert_array_equal(y.values, np.zeros(4))

    def test_length_mismatch(self):
        with self.assertRaises(InvalidDimensionsError):
            acquire(generate_matrix(0, 2, 4, "gaussian"), Signal(values=[1.0, 2.0, 3.0]))

    def test_linearity(self):
        matrix = generate_matrix(11, 5, 12, "gaussian")
        rng = np.random.default_rng(0)
        x, z = rng.normal(size=12), rng.normal(size=12)
        a, b = 2.5, -0.75
        combined = acquire(matrix, Signal(values=a * x + b * z)).values
        separate = a * acquire(matrix, Signal(values=x)).values + b * acquire(matrix, Signal(values=z)).values
        assert_allclose(combined, separate, rtol=1e-9, atol=1e-12)

    def test_norm_preserved_in_expectation(self):
        x = np.zeros(64)
        x[[3, 17, 40]] = [0.6, -0.64, 0.48]
        signal = Signal(values=x)
        energies = [np.sum(acquire(generate_matrix(seed, 16, 64, "gaussian"), signal).values ** 2)
                    for seed in range(1000)]
        self.assertAlmostEqual(float(np.mean(energies)), 1.0, delta=0.05)

    def test_zero_sigma_matches_acquire(self):
        matrix = generate_matrix(2, 3, 6, "bernoulli")
        signal = Signal(values=np.arange(6.0))
        assert_array_equal(acquire_noisy(matrix, signal, 0.0, 99).values, acquire(matrix, signal).values)

    def test_noisy_determinism(self):
        matrix = generate_matrix(2, 3, 6, "gaussian")
        signal = Signal(values=np.arange(6.0))
        first = acquire_noisy(matrix, signal, 0.3, 17)
        second = acquire_noisy(matrix, signal, 0.3, 17)
        assert_array_equal(first.values, second.values)
        self.assertEqual(first.noise_sigma, 0.3)

    def test_negative_sigma(self):
        matrix = generate_matrix(2, 3, 6, "gaussian")
        with self.assertRaises(InvalidParameterError):
            acquire_noisy(matrix, Signal(values=np.ones(6)), -0.1, 0)

    def test_noise_standard_deviation(self):
        matrix = generate_matrix(0, 1, 1, "identity")
        signal = Signal(values=[0.0])
        draws = np.array([acquire_noisy(matrix, signal, 0.1, seed).values[0] for seed in range(20000)])
        assert_allclose(draws.std(), 0.1, rtol=0.03)

    def test_measurement_length_checked(self):
        matrix = generate_matrix(0, 3, 5, "gaussian")
        with self.assertRaises(InvalidDimensionsError):
            Measurement(values=[1.0, 2.0], matrix_id=matrix.matrix_id)


class TestHelpers(unittest.TestCase):

    def test_compression_ratio(self):
        self.assertAlmostEqual(compression_ratio(generate_matrix(0, 160, 16384, "bernoulli")), 0.009765625)
        self.assertEqual(compression_ratio(generate_matrix(0, 4, 4, "identity")), 1.0)
        self.assertAlmostEqual(compression_ratio(generate_matrix(0, 1, 100, "gaussian")), 0.01)

    def test_signal_shape_validation(self):
        Signal(values=np.zeros(6), shape=(2, 3))
        with self.assertRaises(InvalidDimensionsError):
            Signal(values=np.zeros(6), shape=(4, 2))
        with self.assertRaises(InvalidParameterError):
            Signal(values=[1.0, float("nan")])

    def test_derive_seed(self):
        a = derive_seed(1, 160, 0, 2)
        self.assertEqual(a, derive_seed(1, 160, 0, 2))
        self.assertNotEqual(a, derive_seed(1, 160, 1, 2))
        self.assertNotEqual(a, derive_seed(2, 160, 0, 2))
        self.assertTrue(0 <= a <= MAX_SEED)

    def test_snr_sigma(self):
        clean = np.full(4, 2.0)
        # ||clean|| = 4, sqrt(m) = 2, 20 dB -> factor 10
        self.assertAlmostEqual(snr_sigma(clean, 20.0), 0.2)


if __name__ == '__main__':
    unittest.main()
