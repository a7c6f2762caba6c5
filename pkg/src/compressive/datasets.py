# ========================
# src/compressive/datasets.py
# ========================

"""
Synthetic Data Generation

Seeded test signals and the analysis tasks the tradeoff harness runs:
- k-sparse signals for recovery experiments
- smooth random textures standing in for natural images
- the two-class print-defect task (a texture with or without a square
  defect patch), a synthetic surrogate for print error detection
- tasks backed by labeled CSV or PGM datasets
"""

import logging
from dataclasses import dataclass
from math import isqrt
from typing import List, Optional, Tuple

import numpy as np
from scipy.ndimage import gaussian_filter

from .exceptions import InvalidDimensionsError, InvalidParameterError
from .experiment import DatasetDescriptor
from .ingestion import load_dataset_csv, load_pgm_dir
from .sensing import Signal, derive_seed, make_rng, standard_normal
from .smashed import ClassTemplates, build_templates

logger = logging.getLogger(__name__)

OK_LABEL = "ok"
DEFECT_LABEL = "defect"
TEXTURE_SMOOTHNESS = 3.0


@dataclass(frozen=True)
class TaskDraw:
    """Templates and labeled instances for one trial."""

    templates: ClassTemplates
    instances: Tuple[Signal, ...]


def gen_sparse(n: int, k: int, amplitude: float, seed: int) -> Signal:
    """
    Generate a k-sparse signal with entries +/- amplitude.

    Args:
        n (int): Signal length
        k (int): Number of nonzeros, k <= n
        amplitude (float): Magnitude of every nonzero
        seed (int): Seed of the generator stream

    Returns:
        Signal: Signal with exactly k nonzeros at uniformly chosen indices
    """
    if n < 1 or k < 1 or k > n:
        raise InvalidParameterError(f"Sparse signal needs 1 <= k <= n, got k={k}, n={n}")
    if not amplitude > 0:
        raise InvalidParameterError(f"amplitude must be positive, got {amplitude}")
    rng = make_rng(seed)
    support = rng.choice(n, size=k, replace=False)
    signs = np.where(rng.random(k) < 0.5, 1.0, -1.0)
    values = np.zeros(n)
    values[support] = amplitude * signs
    return Signal(values=values)


def gen_texture(height: int, width: int, seed: int, smoothness: float = TEXTURE_SMOOTHNESS) -> np.ndarray:
    """
    Smooth random texture with values spanning [0.1, 0.9].

    Gaussian white noise is low-pass filtered (periodic boundary) and
    min-max rescaled.
    """
    if height < 1 or width < 1:
        raise InvalidDimensionsError(f"Texture dimensions must be positive, got {height}x{width}")
    smoothed = gaussian_filter(standard_normal(make_rng(seed), (height, width)), sigma=smoothness, mode="wrap")
    spread = smoothed.max() - smoothed.min()
    if spread == 0:
        return np.full((height, width), 0.5)
    return 0.1 + 0.8 * (smoothed - smoothed.min()) / spread


class PrintTask:
    """
    Two-class print-defect task on a side x side texture.

    Class "ok" is the texture itself; class "defect" adds a square patch of
    side ``defect_size`` and height ``defect_amplitude`` lying fully inside
    the image. The reference templates place the patch from the task seed;
    every ``draw`` places it at a fresh location and returns matching
    templates, so the analyser always knows where a defect would sit.
    """

    def __init__(self, n: int, defect_size: int, defect_amplitude: float, seed: int):
        side = isqrt(n) if n > 0 else 0
        if side < 1 or side * side != n:
            raise InvalidParameterError(f"Print task needs a perfect-square n, got {n}")
        if defect_size < 1 or defect_size * defect_size > n:
            raise InvalidParameterError(f"Defect side {defect_size} does not fit a {side}x{side} image")
        if defect_amplitude < 0:
            raise InvalidParameterError(f"defect_amplitude must be nonnegative, got {defect_amplitude}")

        self.n = n
        self.side = side
        self.defect_size = defect_size
        self.defect_amplitude = defect_amplitude
        self.seed = seed
        self.texture = gen_texture(side, side, derive_seed(seed, 0))
        self.templates = self._templates(self._location(derive_seed(seed, 1)))
        logger.info(
            f"Print task: {side}x{side} texture, defect {defect_size}px at amplitude {defect_amplitude}"
        )

    def _location(self, seed: int) -> Tuple[int, int]:
        row, col = make_rng(seed).integers(0, self.side - self.defect_size + 1, size=2)
        return int(row), int(col)

    def defect_image(self, location: Tuple[int, int]) -> np.ndarray:
        row, col = location
        image = self.texture.copy()
        image[row:row + self.defect_size, col:col + self.defect_size] += self.defect_amplitude
        return image

    def _templates(self, location: Tuple[int, int]) -> ClassTemplates:
        return ClassTemplates(
            classes=(OK_LABEL, DEFECT_LABEL),
            templates=np.vstack([self.texture.ravel(), self.defect_image(location).ravel()]),
        )

    def draw(self, seed: int) -> TaskDraw:
        location = self._location(seed)
        shape = (self.side, self.side)
        templates = self._templates(location)
        instances = (
            Signal(values=templates.templates[0], label=OK_LABEL, shape=shape),
            Signal(values=templates.templates[1], label=DEFECT_LABEL, shape=shape),
        )
        return TaskDraw(templates=templates, instances=instances)


def gen_print_task(n: int, defect_size: int, defect_amplitude: float, seed: int) -> Tuple[ClassTemplates, PrintTask]:
    """
    Build the print-defect surrogate task.

    Returns:
        tuple: (reference ClassTemplates, sampler whose ``draw(seed)``
        yields per-trial templates and instances)
    """
    task = PrintTask(n, defect_size, defect_amplitude, seed)
    return task.templates, task


class SparseTask:
    """Two classes, each a fresh k-sparse signal per draw."""

    def __init__(self, n: int, sparsity: int, amplitude: float, seed: int):
        self.n = n
        self.sparsity = sparsity
        self.amplitude = amplitude
        self.templates = self.draw(seed).templates

    def draw(self, seed: int) -> TaskDraw:
        signals = [gen_sparse(self.n, self.sparsity, self.amplitude, derive_seed(seed, c)) for c in range(2)]
        classes = ("class_0", "class_1")
        templates = ClassTemplates(classes=classes, templates=np.vstack([s.values for s in signals]))
        instances = tuple(Signal(values=s.values, label=c) for s, c in zip(signals, classes))
        return TaskDraw(templates=templates, instances=instances)


class DatasetTask:
    """A fixed labeled dataset; templates are the class means."""

    def __init__(self, dataset: List[Signal]):
        self.dataset = tuple(dataset)
        self.templates = build_templates(dataset)

    def draw(self, seed: int) -> TaskDraw:
        return TaskDraw(templates=self.templates, instances=self.dataset)


def build_task(descriptor: DatasetDescriptor, n: int):
    """
    Instantiate the task a descriptor names.

    Args:
        descriptor (DatasetDescriptor): Task kind and parameters
        n (int): Signal dimension the experiment expects

    Returns:
        PrintTask | SparseTask | DatasetTask: Sampler with ``templates``
        and ``draw(seed)``
    """
    if descriptor.kind == "two_class_print":
        return PrintTask(n, descriptor.defect_size, descriptor.defect_amplitude, descriptor.seed)
    if descriptor.kind == "sparse_synthetic":
        return SparseTask(n, descriptor.sparsity, descriptor.amplitude, descriptor.seed)

    if descriptor.kind == "csv":
        dataset = load_dataset_csv(descriptor.path)
    else:
        dataset = load_pgm_dir(descriptor.path, descriptor.labels_csv)
    task = DatasetTask(dataset)
    if task.templates.n != n:
        raise InvalidDimensionsError(f"Dataset samples have length {task.templates.n}, config says n={n}")
    return task
