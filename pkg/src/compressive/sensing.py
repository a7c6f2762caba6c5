# ========================
# src/compressive/sensing.py
# ========================

"""
Compressive Acquisition Module

Seeded sensing-matrix ensembles and the acquisition step y = Phi x (+ e).

Random streams use numpy's PCG64 bit generator seeded directly with the
64-bit seed: the matrix stream is PCG64(seed), the noise stream is
PCG64(noise_seed). Uniform doubles come from ``Generator.random`` (53-bit
multiples of 2**-53); a uniform of exactly 0 is replaced by 2**-54.
Gaussian variates are produced by the inverse-CDF method,
``scipy.special.ndtri(u)``, one uniform per variate, consumed row-major.
Bernoulli entries are +1/sqrt(m) when the row-major uniform is below 0.5
and -1/sqrt(m) otherwise.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np
from scipy.special import ndtri

from .exceptions import InvalidDimensionsError, InvalidParameterError

logger = logging.getLogger(__name__)

MAX_SEED = 2 ** 64 - 1
_SMALLEST_UNIFORM = 2.0 ** -54


class Ensemble(str, Enum):
    """Sensing-matrix ensembles and their CSMX header codes."""

    GAUSSIAN = "gaussian"
    BERNOULLI = "bernoulli"
    IDENTITY = "identity"
    ORTHONORMAL = "orthonormal"

    @property
    def code(self) -> int:
        return _ENSEMBLE_CODES[self]

    @classmethod
    def from_code(cls, code: int) -> "Ensemble":
        for ensemble, value in _ENSEMBLE_CODES.items():
            if value == code:
                return ensemble
        raise InvalidParameterError(f"Unknown ensemble code: {code}")

    @classmethod
    def parse(cls, value: "str | Ensemble") -> "Ensemble":
        if isinstance(value, Ensemble):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            choices = ", ".join(e.value for e in cls)
            raise InvalidParameterError(f"Unknown ensemble '{value}' (expected one of: {choices})")


_ENSEMBLE_CODES = {
    Ensemble.GAUSSIAN: 0,
    Ensemble.BERNOULLI: 1,
    Ensemble.IDENTITY: 2,
    Ensemble.ORTHONORMAL: 3,
}

MatrixId = Tuple[int, int, int, str]


def _frozen_array(values, ndim: int) -> np.ndarray:
    array = np.array(values, dtype=np.float64, copy=True)
    if array.ndim != ndim:
        raise InvalidDimensionsError(f"Expected a {ndim}-dimensional array, got shape {array.shape}")
    array.setflags(write=False)
    return array


def check_seed(seed: int, name: str = "seed") -> int:
    """Validate a 64-bit unsigned seed and return it as a Python int."""
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise InvalidParameterError(f"{name} must be an integer, got {seed!r}")
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise InvalidParameterError(f"{name} must fit in 64 unsigned bits, got {seed}")
    return seed


def make_rng(seed: int) -> np.random.Generator:
    """Generator for one documented stream: PCG64 seeded with ``seed``."""
    return np.random.Generator(np.random.PCG64(check_seed(seed)))


def standard_normal(rng: np.random.Generator, size) -> np.ndarray:
    """Inverse-CDF standard gaussian variates, one uniform per variate."""
    u = rng.random(size)
    u[u == 0.0] = _SMALLEST_UNIFORM
    return ndtri(u)


def derive_seed(master_seed: int, *keys: int) -> int:
    """
    Derive an independent 64-bit stream seed from a master seed and keys.

    The derivation hashes ``[master_seed, *keys]`` through numpy's
    SeedSequence, so it is stable across platforms and worker layouts.
    """
    entropy = [check_seed(master_seed, "master_seed")] + [int(k) for k in keys]
    if any(k < 0 for k in entropy):
        raise InvalidParameterError(f"Seed derivation keys must be nonnegative: {keys}")
    return int(np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True, eq=False)
class SensingMatrix:
    """A seeded m x n random linear encoder, the privacy throttle."""

    seed: int
    m: int
    n: int
    ensemble: Ensemble
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "entries", _frozen_array(self.entries, 2))
        if self.entries.shape != (self.m, self.n):
            raise InvalidDimensionsError(
                f"Entries have shape {self.entries.shape}, header says {(self.m, self.n)}"
            )

    @property
    def matrix_id(self) -> MatrixId:
        return (self.seed, self.m, self.n, self.ensemble.value)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.m, self.n)


@dataclass(frozen=True, eq=False)
class Signal:
    """A raw n-dimensional sample, optionally labeled and image-shaped."""

    values: np.ndarray
    label: Optional[str] = None
    shape: Optional[Tuple[int, int]] = None

    def __post_init__(self):
        values = _frozen_array(self.values, 1)
        if values.size < 1:
            raise InvalidDimensionsError("Signal must have at least one value")
        if not np.all(np.isfinite(values)):
            raise InvalidParameterError("Signal values must be finite")
        if self.shape is not None:
            height, width = (int(s) for s in self.shape)
            if height * width != values.size:
                raise InvalidDimensionsError(
                    f"Image shape {height}x{width} does not match signal length {values.size}"
                )
            object.__setattr__(self, "shape", (height, width))
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.size


@dataclass(frozen=True, eq=False)
class Measurement:
    """A compressed sample y together with its provenance."""

    values: np.ndarray
    matrix_id: MatrixId
    noise_sigma: float = 0.0

    def __post_init__(self):
        values = _frozen_array(self.values, 1)
        if not np.all(np.isfinite(values)):
            raise InvalidParameterError("Measurement values must be finite")
        if values.size != self.matrix_id[1]:
            raise InvalidDimensionsError(
                f"Measurement length {values.size} does not match matrix rows {self.matrix_id[1]}"
            )
        object.__setattr__(self, "values", values)

    @property
    def m(self) -> int:
        return self.values.size


def generate_matrix(seed: int, m: int, n: int, ensemble: "str | Ensemble" = Ensemble.GAUSSIAN) -> SensingMatrix:
    """
    Generate a sensing matrix deterministically from (seed, m, n, ensemble).

    Args:
        seed (int): 64-bit unsigned matrix-stream seed
        m (int): Number of measurements (rows)
        n (int): Signal dimension (columns)
        ensemble (Ensemble): gaussian, bernoulli, identity or orthonormal

    Returns:
        SensingMatrix: The materialized matrix
    """
    seed = check_seed(seed)
    ensemble = Ensemble.parse(ensemble)
    if m < 1 or n < 1:
        raise InvalidDimensionsError(f"Matrix dimensions must be positive, got m={m}, n={n}")
    if ensemble is Ensemble.IDENTITY and m != n:
        raise InvalidDimensionsError(f"Identity ensemble requires m = n, got m={m}, n={n}")
    if ensemble is not Ensemble.IDENTITY and m > n:
        raise InvalidDimensionsError(f"{ensemble.value} ensemble requires m <= n, got m={m}, n={n}")

    if ensemble is Ensemble.IDENTITY:
        entries = np.eye(n)
    else:
        rng = make_rng(seed)
        if ensemble is Ensemble.GAUSSIAN:
            entries = standard_normal(rng, (m, n)) / np.sqrt(m)
        elif ensemble is Ensemble.BERNOULLI:
            scale = 1.0 / np.sqrt(m)
            entries = np.where(rng.random((m, n)) < 0.5, scale, -scale)
        else:
            # QR of the transposed gaussian draw; sign-fixed by diag(R).
            q, r = np.linalg.qr(standard_normal(rng, (m, n)).T)
            signs = np.where(np.diag(r) < 0, -1.0, 1.0)
            entries = (q * signs).T

    logger.debug(f"Generated {ensemble.value} matrix {m}x{n} from seed {seed}")
    return SensingMatrix(seed=seed, m=m, n=n, ensemble=ensemble, entries=entries)


def _check_conformance(matrix: SensingMatrix, signal: Signal) -> None:
    if signal.n != matrix.n:
        raise InvalidDimensionsError(
            f"Signal length {signal.n} does not match matrix columns {matrix.n}"
        )


def acquire(matrix: SensingMatrix, signal: Signal) -> Measurement:
    """Noiseless compressive acquisition y = Phi x."""
    _check_conformance(matrix, signal)
    return Measurement(values=matrix.entries @ signal.values, matrix_id=matrix.matrix_id, noise_sigma=0.0)


def measurement_noise(rng: np.random.Generator, m: int, sigma: float) -> np.ndarray:
    """Zero-mean gaussian measurement noise drawn from ``rng``."""
    return sigma * standard_normal(rng, m)


def acquire_noisy(matrix: SensingMatrix, signal: Signal, sigma: float, noise_seed: int) -> Measurement:
    """
    Noisy compressive acquisition y = Phi x + e.

    Args:
        matrix (SensingMatrix): Encoder
        signal (Signal): Raw sample
        sigma (float): Noise standard deviation (>= 0)
        noise_seed (int): Seed of the noise stream

    Returns:
        Measurement: y with ``noise_sigma = sigma``
    """
    if not np.isfinite(sigma) or sigma < 0:
        raise InvalidParameterError(f"Noise sigma must be nonnegative, got {sigma}")
    _check_conformance(matrix, signal)
    noise_seed = check_seed(noise_seed, "noise_seed")
    clean = matrix.entries @ signal.values
    if sigma == 0:
        values = clean
    else:
        values = clean + measurement_noise(make_rng(noise_seed), matrix.m, sigma)
    return Measurement(values=values, matrix_id=matrix.matrix_id, noise_sigma=float(sigma))


def compression_ratio(matrix: SensingMatrix) -> float:
    """Fraction of measurements retained, m / n."""
    return matrix.m / matrix.n


def snr_sigma(clean: np.ndarray, snr_db: float) -> float:
    """Noise level giving ``snr_db`` in measurement space: ||Phi x|| / (sqrt(m) 10^(snr/20))."""
    return float(np.linalg.norm(clean) / (np.sqrt(clean.size) * 10.0 ** (snr_db / 20.0)))
