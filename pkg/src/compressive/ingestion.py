# ========================
# src/compressive/ingestion.py
# ========================

"""
Data Ingestion Module

Readers for CSV vectors and datasets, regression problems, class
templates, CSMX sensing matrices and binary PGM images.
"""

import csv
import logging
from pathlib import Path
from typing import List, Optional

import numpy as np

from .exceptions import FormatError
from .masked_regression import RegressionProblem
from .perceptual_hash import GrayImage
from .sensing import Ensemble, SensingMatrix, Signal, generate_matrix
from .smashed import ClassTemplates
from .storage import CSMX_HEADER, CSMX_MAGIC, CSMX_VERSION

logger = logging.getLogger(__name__)


def _read_rows(file_path: str) -> List[List[str]]:
    try:
        with open(file_path, "r", newline="", encoding="utf-8") as f:
            rows = [row for row in csv.reader(f) if row and any(cell.strip() for cell in row)]
    except FileNotFoundError:
        logger.error(f"File '{file_path}' was not found")
        raise
    logger.debug(f"Read {len(rows)} rows from {file_path}")
    return rows


def _to_floats(cells: List[str], file_path: str, row_number: int) -> List[float]:
    try:
        return [float(cell) for cell in cells]
    except ValueError:
        raise FormatError(f"{file_path}: row {row_number} holds a non-numeric value")


def load_vector_csv(file_path: str) -> np.ndarray:
    """Read a vector stored one value per line."""
    rows = _read_rows(file_path)
    values = []
    for number, row in enumerate(rows, start=1):
        if len(row) != 1:
            raise FormatError(f"{file_path}: line {number} must hold exactly one value")
        values.extend(_to_floats(row, file_path, number))
    if not values:
        raise FormatError(f"{file_path}: vector file is empty")
    return np.array(values)


def load_dataset_csv(file_path: str) -> List[Signal]:
    """Read labeled samples: first column label, remaining columns values."""
    dataset = []
    for number, row in enumerate(_read_rows(file_path), start=1):
        if len(row) < 2:
            raise FormatError(f"{file_path}: row {number} needs a label and at least one value")
        label = row[0].strip() or None
        dataset.append(Signal(values=_to_floats(row[1:], file_path, number), label=label))
    logger.info(f"Loaded {len(dataset)} samples from {file_path}")
    return dataset


def load_regression_csv(file_path: str) -> RegressionProblem:
    """Read a regression problem: predictors first, response in the last column."""
    rows = _read_rows(file_path)
    table = [_to_floats(row, file_path, number) for number, row in enumerate(rows, start=1)]
    if not table or len({len(row) for row in table}) != 1 or len(table[0]) < 2:
        raise FormatError(f"{file_path}: expected a rectangular table with at least two columns")
    data = np.array(table)
    return RegressionProblem(X=data[:, :-1], y=data[:, -1])


def load_templates_csv(file_path: str) -> ClassTemplates:
    """Read class templates: one row per class, class id first."""
    rows = _read_rows(file_path)
    classes = [row[0].strip() for row in rows]
    templates = [_to_floats(row[1:], file_path, number) for number, row in enumerate(rows, start=1)]
    if not templates or len({len(t) for t in templates}) != 1 or not templates[0]:
        raise FormatError(f"{file_path}: template rows must share one nonzero length")
    return ClassTemplates(classes=tuple(classes), templates=np.array(templates))


def load_matrix(file_path: str) -> SensingMatrix:
    """
    Read a CSMX matrix; a header-only file is regenerated from its seed.

    Args:
        file_path (str): Path to the .csmx file

    Returns:
        SensingMatrix: The stored or regenerated matrix
    """
    payload = Path(file_path).read_bytes()
    if len(payload) < CSMX_HEADER.size:
        raise FormatError(f"{file_path}: truncated CSMX header")
    magic, version, code, seed, m, n = CSMX_HEADER.unpack_from(payload)
    if magic != CSMX_MAGIC:
        raise FormatError(f"{file_path}: bad magic {magic!r}")
    if version != CSMX_VERSION:
        raise FormatError(f"{file_path}: unsupported CSMX version {version}")
    ensemble = Ensemble.from_code(code)

    body = payload[CSMX_HEADER.size:]
    if not body:
        logger.info(f"{file_path}: header only, regenerating {ensemble.value} {m}x{n} from seed {seed}")
        return generate_matrix(seed, m, n, ensemble)
    if len(body) != 8 * m * n:
        raise FormatError(f"{file_path}: expected {8 * m * n} entry bytes, found {len(body)}")
    entries = np.frombuffer(body, dtype="<f8").reshape(m, n).astype(np.float64)
    return SensingMatrix(seed=seed, m=m, n=n, ensemble=ensemble, entries=entries)


def _pgm_tokens(payload: bytes, count: int) -> tuple:
    """Split the first ``count`` header tokens, skipping '#' comments."""
    tokens = []
    position = 0
    while len(tokens) < count:
        while position < len(payload) and payload[position:position + 1].isspace():
            position += 1
        if position >= len(payload):
            raise FormatError("Truncated PGM header")
        if payload[position:position + 1] == b"#":
            while position < len(payload) and payload[position:position + 1] not in (b"\n", b"\r"):
                position += 1
            continue
        start = position
        while position < len(payload) and not payload[position:position + 1].isspace():
            position += 1
        tokens.append(payload[start:position])
    # Exactly one whitespace byte separates maxval from the raster.
    return tokens, position + 1


def parse_pgm(payload: bytes, source: str = "<bytes>") -> GrayImage:
    """Decode binary PGM bytes into a GrayImage with pixels scaled by 1/255."""
    try:
        (magic, width, height, maxval), offset = _pgm_tokens(payload, 4)
    except FormatError as e:
        raise FormatError(f"{source}: {e}")
    if magic != b"P5":
        raise FormatError(f"{source}: expected binary PGM 'P5', found {magic.decode('latin-1')!r}")
    try:
        width, height, maxval = int(width), int(height), int(maxval)
    except ValueError:
        raise FormatError(f"{source}: malformed PGM header")
    if width < 1 or height < 1:
        raise FormatError(f"{source}: PGM dimensions must be positive")
    if maxval != 255:
        raise FormatError(f"{source}: only maxval 255 is supported, found {maxval}")
    raster = payload[offset:offset + width * height]
    if len(raster) != width * height:
        raise FormatError(f"{source}: expected {width * height} pixel bytes, found {len(raster)}")
    pixels = np.frombuffer(raster, dtype=np.uint8).reshape(height, width) / 255.0
    return GrayImage(pixels)


def load_pgm(file_path: str) -> GrayImage:
    return parse_pgm(Path(file_path).read_bytes(), str(file_path))


def load_pgm_dir(directory: str, labels_csv: str) -> List[Signal]:
    """
    Load labeled images listed in ``labels_csv`` (rows ``filename,label``).

    Returns:
        list[Signal]: Row-major flattened images carrying their shape
    """
    base = Path(directory)
    dataset = []
    for number, row in enumerate(_read_rows(labels_csv), start=1):
        if len(row) != 2:
            raise FormatError(f"{labels_csv}: row {number} must be 'filename,label'")
        image = load_pgm(str(base / row[0].strip()))
        dataset.append(image.to_signal(label=row[1].strip()))
    logger.info(f"Loaded {len(dataset)} images from {base}")
    return dataset


def load_signal(file_path: str, shape: Optional[tuple] = None) -> Signal:
    """Read an unlabeled signal from a CSV vector or a PGM image."""
    if str(file_path).lower().endswith(".pgm"):
        return load_pgm(file_path).to_signal()
    return Signal(values=load_vector_csv(file_path), shape=shape)
