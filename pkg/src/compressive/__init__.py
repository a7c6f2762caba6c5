# ========================
# src/compressive/__init__.py
# ========================

"""
Compressive Analysis Package

Privacy-preserving analysis on compressed measurements: random sensing,
sparse-recovery attacks, smashed-filter classification, perceptual
hashing, masked regression, Laplace perturbation and the sweep that
weighs utility against leakage.
"""

__version__ = "1.0.0"

from .exceptions import CompressiveError
from .sensing import Ensemble, SensingMatrix, Signal, Measurement, generate_matrix, acquire, acquire_noisy
from .reconstruction import omp, ista, run_attack, evaluate_reconstruction
from .smashed import ClassTemplates, build_templates, classify, evaluate_accuracy
from .perceptual_hash import GrayImage, PerceptualHash, ahash, dhash, phash, hamming, is_duplicate
from .masked_regression import RegressionProblem, ols, masked_ols
from .privacy import DpParams, laplace_perturb
from .experiment import ExperimentConfig
from .harness import TradeoffReport, run_tradeoff, min_components

__all__ = [
    '__version__',
    'CompressiveError',
    'Ensemble',
    'SensingMatrix',
    'Signal',
    'Measurement',
    'generate_matrix',
    'acquire',
    'acquire_noisy',
    'omp',
    'ista',
    'run_attack',
    'evaluate_reconstruction',
    'ClassTemplates',
    'build_templates',
    'classify',
    'evaluate_accuracy',
    'GrayImage',
    'PerceptualHash',
    'ahash',
    'dhash',
    'phash',
    'hamming',
    'is_duplicate',
    'RegressionProblem',
    'ols',
    'masked_ols',
    'DpParams',
    'laplace_perturb',
    'ExperimentConfig',
    'TradeoffReport',
    'run_tradeoff',
    'min_components',
]
