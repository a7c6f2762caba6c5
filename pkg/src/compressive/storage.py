# ========================
# src/compressive/storage.py
# ========================

"""
Data Storage Module

Writers for every on-disk format the toolkit produces:
- CSV vectors: one value per line, '.' decimal, no header
- CSV datasets / templates: one row per sample or class, label first
- CSMX sensing matrices (binary, little-endian)
- binary PGM (P5, maxval 255)
- JSON documents with fixed key order
"""

import csv
import io
import json
import logging
import struct
from pathlib import Path
from typing import Any, Iterable, List, Sequence

import numpy as np

from .perceptual_hash import GrayImage
from .sensing import SensingMatrix, Signal
from .smashed import ClassTemplates

logger = logging.getLogger(__name__)

CSMX_MAGIC = b"CSMX"
CSMX_VERSION = 1
# magic, version u8, ensemble u8, seed u64, m u32, n u32
CSMX_HEADER = struct.Struct("<4sBBQII")


def _format_value(value: float) -> str:
    # Shortest repr that round-trips the double exactly.
    return repr(float(value))


def format_vector_csv(values: Iterable[float]) -> str:
    """Render a vector as one value per line with a trailing newline."""
    return "".join(f"{_format_value(v)}\n" for v in np.asarray(values, dtype=np.float64).ravel())


def _format_rows(rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerows(rows)
    return buffer.getvalue()


def format_dataset_csv(dataset: Sequence[Signal]) -> str:
    """One sample per row: label, then values."""
    return _format_rows(
        [s.label if s.label is not None else ""] + [_format_value(v) for v in s.values] for s in dataset
    )


def format_templates_csv(templates: ClassTemplates) -> str:
    """One row per class: class id, then the template values."""
    return _format_rows(
        [label] + [_format_value(v) for v in row] for label, row in zip(templates.classes, templates.templates)
    )


def write_text(text: str, file_path: str) -> str:
    """Write text to a file, creating parent directories."""
    path = Path(file_path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    except OSError as e:
        logger.error(f"Error writing file {path}: {e}")
        raise
    logger.info(f"Saved {len(text)} characters to {path}")
    return str(path)


def write_bytes(payload: bytes, file_path: str) -> str:
    path = Path(file_path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "wb") as f:
            f.write(payload)
    except OSError as e:
        logger.error(f"Error writing file {path}: {e}")
        raise
    logger.info(f"Saved {len(payload)} bytes to {path}")
    return str(path)


def to_json(document: Any) -> str:
    """Stable JSON text: insertion key order, 2-space indent, trailing newline."""
    return json.dumps(document, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def matrix_to_bytes(matrix: SensingMatrix, header_only: bool = False) -> bytes:
    """
    Serialize a matrix in CSMX format.

    Args:
        matrix (SensingMatrix): Matrix to serialize
        header_only (bool): Omit the entries; readers regenerate them

    Returns:
        bytes: Header followed by m*n float64 little-endian entries
    """
    header = CSMX_HEADER.pack(
        CSMX_MAGIC, CSMX_VERSION, matrix.ensemble.code, matrix.seed, matrix.m, matrix.n
    )
    if header_only:
        return header
    return header + matrix.entries.astype("<f8").tobytes(order="C")


def save_matrix(matrix: SensingMatrix, file_path: str, header_only: bool = False) -> str:
    return write_bytes(matrix_to_bytes(matrix, header_only), file_path)


def pgm_bytes(image: GrayImage) -> bytes:
    """Binary PGM; pixels quantized as floor(255 p + 0.5)."""
    levels = np.floor(image.pixels * 255.0 + 0.5).clip(0, 255).astype(np.uint8)
    header = f"P5\n{image.width} {image.height}\n255\n".encode("ascii")
    return header + levels.tobytes(order="C")


def save_pgm(image: GrayImage, file_path: str) -> str:
    return write_bytes(pgm_bytes(image), file_path)


def report_rows_csv(header: List[str], rows: Iterable[Sequence[Any]]) -> str:
    """CSV with a header line, used for tabular reports."""
    return _format_rows([header] + [list(r) for r in rows])
