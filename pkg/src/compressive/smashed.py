# ========================
# src/compressive/smashed.py
# ========================

"""
Smashed Filter Module

Classification in measurement space: maximum-likelihood template matching
on compressed samples, never reconstructing the signal. Under isotropic
gaussian measurement noise and known templates the ML rule is the nearest
compressed template in Euclidean distance.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import norm

from .exceptions import InvalidDatasetError, InvalidDimensionsError, InvalidParameterError
from .sensing import MAX_SEED, Measurement, SensingMatrix, Signal, check_seed, make_rng, measurement_noise

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ClassTemplates:
    """Per-class mean signals, one row per class in ``classes`` order."""

    classes: Tuple[str, ...]
    templates: np.ndarray = field(repr=False)

    def __post_init__(self):
        classes = tuple(str(c) for c in self.classes)
        templates = np.array(self.templates, dtype=np.float64, copy=True)
        if templates.ndim != 2 or templates.shape[0] != len(classes):
            raise InvalidDatasetError(
                f"Expected one template row per class ({len(classes)}), got shape {templates.shape}"
            )
        if len(classes) < 2:
            raise InvalidDatasetError("At least two classes are required")
        if len(set(classes)) != len(classes):
            raise InvalidDatasetError(f"Class identifiers must be unique: {classes}")
        templates.setflags(write=False)
        object.__setattr__(self, "classes", classes)
        object.__setattr__(self, "templates", templates)

    @property
    def n(self) -> int:
        return self.templates.shape[1]

    def template(self, label: str) -> np.ndarray:
        return self.templates[self.classes.index(label)]


@dataclass(frozen=True)
class ClassificationResult:
    """Winning label, per-class distances and the winner's margin."""

    label: str
    scores: Dict[str, float]
    margin: float

    def to_dict(self) -> dict:
        return {"label": self.label, "scores": dict(self.scores), "margin": self.margin}


def build_templates(dataset: Sequence[Signal]) -> ClassTemplates:
    """
    Estimate class templates as per-class arithmetic means.

    Classes are ordered by first appearance in ``dataset``.

    Args:
        dataset (list[Signal]): Labeled samples of uniform length

    Returns:
        ClassTemplates: One mean template per class
    """
    if not dataset:
        raise InvalidDatasetError("Cannot build templates from an empty dataset")

    n = dataset[0].n
    sums: Dict[str, np.ndarray] = {}
    counts: Dict[str, int] = {}
    for index, sample in enumerate(dataset):
        if sample.label is None:
            raise InvalidDatasetError(f"Sample {index} has no label")
        if sample.n != n:
            raise InvalidDatasetError(f"Sample {index} has length {sample.n}, expected {n}")
        if sample.label not in sums:
            sums[sample.label] = np.zeros(n)
            counts[sample.label] = 0
        sums[sample.label] += sample.values
        counts[sample.label] += 1

    if len(sums) < 2:
        raise InvalidDatasetError(f"Need at least two classes, found {list(sums)}")

    classes = tuple(sums)
    templates = np.vstack([sums[c] / counts[c] for c in classes])
    logger.info(f"Built {len(classes)} templates of length {n} from {len(dataset)} samples")
    return ClassTemplates(classes=classes, templates=templates)


def compress_templates(matrix: SensingMatrix, templates: ClassTemplates) -> np.ndarray:
    """Compressed templates Phi t_c, one row per class."""
    if templates.n != matrix.n:
        raise InvalidDimensionsError(
            f"Template length {templates.n} does not match matrix columns {matrix.n}"
        )
    return templates.templates @ matrix.entries.T


def nearest_template(values: np.ndarray, compressed: np.ndarray, classes: Sequence[str]) -> ClassificationResult:
    distances = np.linalg.norm(compressed - values[None, :], axis=1)
    winner = int(np.argmin(distances))
    runner_up = np.partition(distances, 1)[1]
    return ClassificationResult(
        label=classes[winner],
        scores={c: float(d) for c, d in zip(classes, distances)},
        margin=float(runner_up - distances[winner]),
    )


def classify(y: Measurement, matrix: SensingMatrix, templates: ClassTemplates) -> ClassificationResult:
    """
    Smashed-filter classification of one measurement.

    Returns the class minimizing ||y - Phi t_c||_2; ties go to the class
    listed first.
    """
    if y.m != matrix.m:
        raise InvalidDimensionsError(f"Measurement length {y.m} does not match matrix rows {matrix.m}")
    compressed = compress_templates(matrix, templates)
    return nearest_template(y.values, compressed, templates.classes)


def _count_correct(trial: int,
                   clean: np.ndarray,
                   labels: Sequence[str],
                   compressed: np.ndarray,
                   classes: Sequence[str],
                   sigma: float,
                   seed: int) -> int:
    # Stream for this trial: seed + trial_index, one noise vector per sample in order.
    rng = make_rng((seed + trial) % (MAX_SEED + 1))
    correct = 0
    for values, label in zip(clean, labels):
        noisy = values + measurement_noise(rng, values.size, sigma) if sigma > 0 else values
        if nearest_template(noisy, compressed, classes).label == label:
            correct += 1
    return correct


def evaluate_accuracy(dataset: Sequence[Signal],
                      matrix: SensingMatrix,
                      templates: ClassTemplates,
                      sigma: float,
                      trials: int,
                      seed: int,
                      workers: Optional[int] = None) -> float:
    """
    Monte-Carlo smashed-filter accuracy over noisy acquisitions.

    Every trial acquires each sample once with fresh gaussian noise drawn
    from the stream seeded with ``seed + trial``. The result does not depend
    on ``workers``.

    Args:
        dataset (list[Signal]): Labeled samples
        matrix (SensingMatrix): Encoder
        templates (ClassTemplates): Class templates
        sigma (float): Measurement noise standard deviation
        trials (int): Number of passes over the dataset
        seed (int): Base noise seed
        workers (int): Thread count; None or 1 runs serially

    Returns:
        float: Fraction of correct labels in [0, 1]
    """
    if not dataset:
        raise InvalidDatasetError("Cannot evaluate accuracy on an empty dataset")
    if trials < 1:
        raise InvalidParameterError(f"trials must be positive, got {trials}")
    if not np.isfinite(sigma) or sigma < 0:
        raise InvalidParameterError(f"Noise sigma must be nonnegative, got {sigma}")
    seed = check_seed(seed)
    for index, sample in enumerate(dataset):
        if sample.label is None:
            raise InvalidDatasetError(f"Sample {index} has no label")
        if sample.n != matrix.n:
            raise InvalidDimensionsError(f"Sample {index} has length {sample.n}, matrix expects {matrix.n}")

    compressed = compress_templates(matrix, templates)
    clean = np.vstack([matrix.entries @ s.values for s in dataset])
    labels = [s.label for s in dataset]

    def run_trial(trial: int) -> int:
        return _count_correct(trial, clean, labels, compressed, templates.classes, sigma, seed)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            counts = list(executor.map(run_trial, range(trials)))
    else:
        counts = [run_trial(t) for t in range(trials)]

    accuracy = sum(counts) / (trials * len(dataset))
    logger.info(f"Smashed-filter accuracy {accuracy:.4f} over {trials} trials x {len(dataset)} samples")
    return accuracy


def predicted_pairwise_accuracy(matrix: SensingMatrix,
                                template_a: np.ndarray,
                                template_b: np.ndarray,
                                sigma: float) -> float:
    """
    Analytic two-class ML accuracy 1 - Q(||Phi (t_a - t_b)|| / (2 sigma)).

    Q is the standard gaussian tail; sigma = 0 gives 1.0 for distinct
    compressed templates.
    """
    distance = float(np.linalg.norm(matrix.entries @ (np.asarray(template_a) - np.asarray(template_b))))
    if sigma == 0:
        return 1.0 if distance > 0 else 0.5
    return float(1.0 - norm.sf(distance / (2.0 * sigma)))
