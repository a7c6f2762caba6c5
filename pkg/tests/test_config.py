# ========================
# tests/test_config.py
# ========================

import unittest
import tempfile
import os
import sys
import io
import logging
from contextlib import redirect_stderr
from unittest import mock

# Add the project root to Python path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.compressive.exceptions import InvalidParameterError
from src.compressive.experiment import ExperimentConfig
from src.compressive.reconstruction import DEFAULT_LAMBDA_GRID
from src.compressive.sensing import Ensemble
from src.utils.config import Config, load_flat_config
from src.utils.logging_setup import setup_logging
from src.utils.performance_monitor import PerformanceMonitor, monitor_performance


def _write(text):
    with tempfile.NamedTemporaryFile(mode='w', suffix='.cfg', delete=False) as f:
        f.write(text)
        return f.name


class TestRuntimeConfig(unittest.TestCase):
    """Environment-backed runtime settings."""

    def test_defaults(self):
        with mock.patch.dict(os.environ, {}, clear=True):
            config = Config()
        self.assertEqual(config.LOG_LEVEL, 'WARNING')
        self.assertEqual(config.WORKERS, 1)
        self.assertIsNone(config.LOG_FILE)
        self.assertEqual(config.DEFAULT_ENSEMBLE, 'gaussian')
        self.assertTrue(all(config.validate_config().values()))

    def test_environment_overrides(self):
        env = {'COMPRESSIVE_WORKERS': '4', 'COMPRESSIVE_LOG_LEVEL': 'DEBUG', 'COMPRESSIVE_DEFAULT_ENSEMBLE': 'bernoulli'}
        with mock.patch.dict(os.environ, env, clear=True):
            config = Config()
        self.assertEqual(config.WORKERS, 4)
        self.assertEqual(config.LOG_LEVEL, 'DEBUG')
        self.assertEqual(config.DEFAULT_ENSEMBLE, 'bernoulli')

    def test_dict_overrides_and_validation(self):
        config = Config({'workers': 0, 'default_ensemble': 'fourier'})
        results = config.validate_config()
        self.assertFalse(results['workers'])
        self.assertFalse(results['default_ensemble'])
        self.assertTrue(results['log_level'])


class TestFlatConfig(unittest.TestCase):
    """The key = value experiment file format."""

    def test_comments_blank_lines_and_case(self):
        path = _write("# sweep\n\nN = 64\nm_sweep = 8, 16 ,32\n  Ensemble=bernoulli  \n")
        try:
            self.assertEqual(load_flat_config(path), {'n': '64', 'm_sweep': '8, 16 ,32', 'ensemble': 'bernoulli'})
        finally:
            os.unlink(path)

    def test_duplicate_key(self):
        path = _write("n = 4\nN = 8\n")
        try:
            with self.assertRaises(ValueError):
                load_flat_config(path)
        finally:
            os.unlink(path)

    def test_missing_separator(self):
        path = _write("n 4\n")
        try:
            with self.assertRaises(ValueError):
                load_flat_config(path)
        finally:
            os.unlink(path)


class TestExperimentConfig(unittest.TestCase):
    """Typed experiment settings."""

    def test_minimal_mapping(self):
        config = ExperimentConfig.from_mapping({'n': '64', 'm_sweep': '8,16,32'})
        self.assertEqual(config.m_sweep, (8, 16, 32))
        self.assertIs(config.ensemble, Ensemble.GAUSSIAN)
        self.assertEqual(config.attack.kind, 'best')
        self.assertEqual(config.attack.lambda_grid, DEFAULT_LAMBDA_GRID)
        self.assertEqual(config.task.kind, 'two_class_print')
        self.assertEqual(config.peak, 1.0)
        self.assertEqual(config.leakage_trials, config.trials)

    def test_full_mapping(self):
        config = ExperimentConfig.from_mapping({
            'n': '100', 'm_sweep': '10,50', 'ensemble': 'bernoulli', 'snr_db': '20',
            'trials': '30', 'attack_trials': '40', 'master_seed': '9', 'attack': 'omp',
            'omp_k': '3', 'task': 'sparse_synthetic', 'sparsity': '4', 'dp_epsilon': '2',
            'dp_sensitivity': '0.5', 'record_wall_time': 'yes',
        })
        self.assertEqual(config.snr_db, 20.0)
        self.assertEqual(config.leakage_trials, 30)
        self.assertEqual(config.attack.k_for(50), 3)
        self.assertIsNone(config.peak)
        self.assertEqual(config.dp.scale, 0.25)
        self.assertTrue(config.record_wall_time)
        self.assertEqual(config.to_dict()['task'], {'kind': 'sparse_synthetic', 'seed': 0, 'sparsity': 4, 'amplitude': 1.0})

    def test_logspace_grid(self):
        config = ExperimentConfig.from_mapping({'n': '8', 'm_sweep': '4', 'task': 'sparse_synthetic',
                                                'lambda_grid': 'logspace:-3:1:9'})
        self.assertEqual(len(config.attack.lambda_grid), 9)
        self.assertAlmostEqual(config.attack.lambda_grid[0], 1e-3)
        self.assertAlmostEqual(config.attack.lambda_grid[-1], 10.0)

    def test_default_omp_k(self):
        config = ExperimentConfig(n=64, m_sweep=(1, 9))
        self.assertEqual(config.attack.k_for(1), 1)
        self.assertEqual(config.attack.k_for(9), 4)

    def test_rejections(self):
        bad_mappings = [
            {'n': '64', 'm_sweep': '8', 'colour': 'red'},
            {'m_sweep': '8'},
            {'n': '64', 'm_sweep': '16,8'},
            {'n': '64', 'm_sweep': '8,128'},
            {'n': '64', 'm_sweep': '8', 'trials': '2.5'},
            {'n': '64', 'm_sweep': '8', 'attack': 'lp'},
            {'n': '64', 'm_sweep': '8', 'dp_epsilon': '1'},
            {'n': '64', 'm_sweep': '8', 'sigma': '-1'},
            {'n': '64', 'm_sweep': '8', 'task': 'csv'},
        ]
        for mapping in bad_mappings:
            with self.assertRaises(InvalidParameterError, msg=str(mapping)):
                ExperimentConfig.from_mapping(mapping)

    def test_identity_requires_full_measurements(self):
        ExperimentConfig(n=16, m_sweep=(16,), ensemble='identity')
        with self.assertRaises(InvalidParameterError):
            ExperimentConfig(n=16, m_sweep=(8, 16), ensemble='identity')

    def test_from_file(self):
        path = _write("n = 16\nm_sweep = 4, 8\ntask = sparse_synthetic\nattack = ista\n")
        try:
            config = ExperimentConfig.from_file(path)
        finally:
            os.unlink(path)
        self.assertEqual(config.n, 16)
        self.assertEqual(config.attack.kind, 'ista')


class TestLoggingAndMonitoring(unittest.TestCase):

    def tearDown(self):
        logging.getLogger().handlers.clear()

    def test_console_logging_goes_to_stderr(self):
        stream = io.StringIO()
        with redirect_stderr(stream):
            setup_logging('INFO')
            logging.getLogger('compressive.test').info('hello sweep')
        self.assertIn('hello sweep', stream.getvalue())

    def test_unknown_level(self):
        with self.assertRaises(ValueError):
            setup_logging('LOUD')

    def test_file_logging(self):
        with tempfile.TemporaryDirectory() as log_dir:
            setup_logging('WARNING', log_file='run.log', log_dir=log_dir)
            logging.getLogger('compressive.test').debug('file only')
            for handler in logging.getLogger().handlers:
                handler.flush()
                handler.close()
            logging.getLogger().handlers.clear()
            with open(os.path.join(log_dir, 'run.log'), encoding='utf-8') as f:
                self.assertIn('file only', f.read())

    def test_performance_monitor(self):
        monitor = PerformanceMonitor('unit', log_every=2)
        monitor.start_monitoring()
        monitor.update_progress(3)
        monitor.add_checkpoint('half', {'m': 8})
        summary = monitor.stop_monitoring()
        self.assertEqual(summary['trials_processed'], 3)
        self.assertEqual(summary['checkpoints'][0]['metadata'], {'m': 8})
        self.assertGreaterEqual(summary['total_processing_time_seconds'], 0.0)
        self.assertGreaterEqual(summary['peak_memory_usage_mb'], 0.0)

    def test_monitor_context_manager(self):
        with monitor_performance('ctx') as monitor:
            monitor.update_progress()
        self.assertIsNotNone(monitor.end_time)
        self.assertEqual(monitor.trials_processed, 1)
        self.assertEqual(monitor.elapsed_seconds, monitor.end_time - monitor.start_time)


if __name__ == '__main__':
    unittest.main()
