# ========================
# src/compressive/perceptual_hash.py
# ========================

"""
Perceptual Hashing Module

64-bit perceptual digests (aHash, dHash, DCT pHash) and Hamming-distance
duplicate detection, so feature tests can run on digests instead of images.

Conventions shared by all hashes:
- bilinear resampling with pixel-center alignment
- strict ">" comparisons, so flat regions produce 0 bits
- bits packed row-major, bit 0 is the most significant bit
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np
from scipy.fft import dctn

from .exceptions import FormatError, IncomparableHashError, InvalidDimensionsError, InvalidParameterError
from .sensing import Signal

logger = logging.getLogger(__name__)

HASH_BITS = 64
PHASH_SIZE = 32
PHASH_BLOCK = 8
# pHash DCT coefficients below this magnitude count as exact zeros.
PHASH_ZERO_TOLERANCE = 1e-12


class HashKind(str, Enum):
    AHASH = "ahash"
    DHASH = "dhash"
    PHASH = "phash"

    @classmethod
    def parse(cls, value: "str | HashKind") -> "HashKind":
        if isinstance(value, HashKind):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise InvalidParameterError(f"Unknown hash kind '{value}'")


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Grayscale image with pixels clamped to [0, 1]."""

    pixels: np.ndarray = field(repr=False)

    def __post_init__(self):
        pixels = np.array(self.pixels, dtype=np.float64, copy=True)
        if pixels.ndim != 2 or pixels.shape[0] < 1 or pixels.shape[1] < 1:
            raise InvalidDimensionsError(f"Image must be a non-empty 2-D array, got shape {pixels.shape}")
        if not np.all(np.isfinite(pixels)):
            raise InvalidParameterError("Image pixels must be finite")
        pixels = np.clip(pixels, 0.0, 1.0)
        pixels.setflags(write=False)
        object.__setattr__(self, "pixels", pixels)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    def to_signal(self, label: Optional[str] = None) -> Signal:
        return Signal(values=self.pixels.ravel(), label=label, shape=(self.height, self.width))

    @classmethod
    def from_signal(cls, signal: Signal) -> "GrayImage":
        if signal.shape is None:
            raise InvalidDimensionsError("Signal carries no image shape")
        return cls(signal.values.reshape(signal.shape))


@dataclass(frozen=True)
class PerceptualHash:
    """A 64-bit digest and the hash kind that produced it."""

    bits: int
    kind: HashKind

    def __post_init__(self):
        if not 0 <= self.bits < 2 ** HASH_BITS:
            raise InvalidParameterError(f"Hash value does not fit in {HASH_BITS} bits: {self.bits}")
        object.__setattr__(self, "kind", HashKind.parse(self.kind))

    def __str__(self) -> str:
        return f"{self.kind.value}:{self.bits:016x}"

    @classmethod
    def from_string(cls, text: str) -> "PerceptualHash":
        """Parse the ``kind:16-hex-digits`` form."""
        try:
            kind, digits = text.strip().split(":")
            if len(digits) != 16:
                raise ValueError(digits)
            return cls(bits=int(digits, 16), kind=HashKind.parse(kind))
        except (ValueError, InvalidParameterError):
            raise FormatError(f"Malformed perceptual hash string: '{text}'")


def _axis_weights(in_size: int, out_size: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    position = (np.arange(out_size) + 0.5) * (in_size / out_size) - 0.5
    position = np.clip(position, 0.0, in_size - 1)
    lower = np.floor(position).astype(int)
    upper = np.minimum(lower + 1, in_size - 1)
    return lower, upper, position - lower


def resize_bilinear(image: GrayImage, out_h: int, out_w: int) -> GrayImage:
    """
    Bilinear resampling with pixel-center alignment.

    Output pixel i samples input coordinate (i + 0.5) * in / out - 0.5,
    clamped to the image. Interpolation is written as a + t * (b - a), so
    constant images stay exactly constant.
    """
    if out_h < 1 or out_w < 1:
        raise InvalidDimensionsError(f"Output dimensions must be positive, got {out_h}x{out_w}")
    pixels = image.pixels

    top, bottom, t_rows = _axis_weights(image.height, out_h)
    rows = pixels[top, :] + t_rows[:, None] * (pixels[bottom, :] - pixels[top, :])

    left, right, t_cols = _axis_weights(image.width, out_w)
    resized = rows[:, left] + t_cols[None, :] * (rows[:, right] - rows[:, left])
    return GrayImage(resized)


def _pack(bits: np.ndarray, kind: HashKind) -> PerceptualHash:
    value = 0
    for bit in bits.ravel():
        value = (value << 1) | int(bool(bit))
    return PerceptualHash(bits=value, kind=kind)


def ahash(image: GrayImage) -> PerceptualHash:
    """Average hash: 8x8 pixels compared against their mean."""
    small = resize_bilinear(image, 8, 8).pixels
    mean = math.fsum(small.ravel()) / small.size
    return _pack(small > mean, HashKind.AHASH)


def dhash(image: GrayImage) -> PerceptualHash:
    """Difference hash: horizontal neighbour comparisons on an 8x9 resize."""
    small = resize_bilinear(image, 8, 9).pixels
    return _pack(small[:, 1:] > small[:, :-1], HashKind.DHASH)


def phash_coefficients(image: GrayImage) -> np.ndarray:
    """Low-frequency 8x8 block of the orthonormal 2-D DCT-II of the 32x32 resize."""
    small = resize_bilinear(image, PHASH_SIZE, PHASH_SIZE).pixels
    block = dctn(small, type=2, norm="ortho")[:PHASH_BLOCK, :PHASH_BLOCK].copy()
    block[np.abs(block) < PHASH_ZERO_TOLERANCE] = 0.0
    return block


def phash(image: GrayImage) -> PerceptualHash:
    """
    DCT hash.

    The orthonormal DCT-II scales coefficient (u, v) by sqrt(1/N) for index 0
    and sqrt(2/N) otherwise on each axis (N = 32). Coefficients with magnitude
    below PHASH_ZERO_TOLERANCE are set to 0 before thresholding, so a bit is
    set only for coefficients strictly above the median. The DC coefficient
    is excluded from the median of the 63 AC coefficients and its bit is 0.
    """
    coefficients = phash_coefficients(image).ravel()
    median = np.median(coefficients[1:])
    bits = coefficients > median
    bits[0] = False
    return _pack(bits, HashKind.PHASH)


_HASHERS = {
    HashKind.AHASH: ahash,
    HashKind.DHASH: dhash,
    HashKind.PHASH: phash,
}


def hash_image(image: GrayImage, kind: "str | HashKind") -> PerceptualHash:
    return _HASHERS[HashKind.parse(kind)](image)


def hamming(a: PerceptualHash, b: PerceptualHash) -> int:
    """Number of differing bits between two hashes of the same kind."""
    if a.kind is not b.kind:
        raise IncomparableHashError(f"Cannot compare {a.kind.value} with {b.kind.value}")
    return bin(a.bits ^ b.bits).count("1")


def is_duplicate(a: PerceptualHash, b: PerceptualHash, threshold: int) -> bool:
    """True when the hashes are within ``threshold`` bits of each other."""
    if not 0 <= threshold <= HASH_BITS:
        raise InvalidParameterError(f"Threshold must be within [0, {HASH_BITS}], got {threshold}")
    return hamming(a, b) <= threshold
