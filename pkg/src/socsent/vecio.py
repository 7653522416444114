"""Text I/O for vector tables (word2vec text format).

Files carry a ``V D`` header line followed by ``V`` rows of the form
``key v1 ... vD``. Used for both word-embedding and author-embedding
tables. Values are written with 9 significant digits, which round-trips
float32 exactly.
"""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

logger = logging.getLogger(__name__)


class VectorFormatError(ValueError):
    """Raised when a vector-table file violates the expected format."""


def read_vector_table(path: str | Path, dtype=np.float32) -> tuple[int, dict[str, np.ndarray]]:
    """Read a table, returning ``(dimension, {key: vector})``.

    Duplicate keys keep the last occurrence (a warning is logged).
    Raises :class:`VectorFormatError` on a malformed header, a row whose
    value count disagrees with the header dimension, or a row count that
    disagrees with the declared entry count.
    """
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise VectorFormatError(f"{path}: expected 'V D' header, got {header!r}")
        try:
            count, dim = int(header[0]), int(header[1])
        except ValueError as exc:
            raise VectorFormatError(f"{path}: non-integer header fields {header!r}") from exc
        if count < 0 or dim < 1:
            raise VectorFormatError(f"{path}: invalid header V={count} D={dim}")

        vectors: dict[str, np.ndarray] = {}
        rows = 0
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != dim + 1:
                raise VectorFormatError(
                    f"{path}: row {lineno} has {len(parts) - 1} values, expected {dim}"
                )
            key = parts[0]
            if key in vectors:
                logger.warning("%s: duplicate key %r at row %d, keeping last", path, key, lineno)
            try:
                vec = np.array([float(x) for x in parts[1:]], dtype=dtype)
            except ValueError as exc:
                raise VectorFormatError(f"{path}: non-numeric value at row {lineno}") from exc
            vectors[key] = vec
            rows += 1
        if rows != count:
            raise VectorFormatError(f"{path}: header declares {count} rows, found {rows}")
    return dim, vectors


def write_vector_table(path: str | Path, dimension: int, vectors: dict[str, np.ndarray]) -> None:
    """Write a table in sorted key order (byte-deterministic output)."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        fh.write(f"{len(vectors)} {dimension}\n")
        for key in sorted(vectors):
            vec = vectors[key]
            if vec.shape != (dimension,):
                raise VectorFormatError(f"vector for {key!r} has shape {vec.shape}, expected ({dimension},)")
            fh.write(key + " " + " ".join(f"{float(x):.9g}" for x in vec) + "\n")
