"""MAT1 file format: one ASCII header line ``MAT1 <rows> <cols>\\n`` followed
by rows*cols little-endian float64 values in row-major order.

Used to persist dictionaries, dense code matrices, and patch matrices.
"""

from __future__ import annotations

import numpy as np

from .linalg import as_matrix

__all__ = ["Mat1Error", "load_mat1", "save_mat1"]

_MAGIC = b"MAT1"


class Mat1Error(ValueError):
    """Raised for malformed MAT1 files."""


def save_mat1(path, matrix) -> None:
    m = as_matrix(matrix)
    rows, cols = m.shape
    with open(path, "wb") as fh:
        fh.write(f"MAT1 {rows} {cols}\n".encode("ascii"))
        fh.write(np.ascontiguousarray(m, dtype="<f8").tobytes())


def load_mat1(path) -> np.ndarray:
    with open(path, "rb") as fh:
        header = fh.readline(256)
        if not header.endswith(b"\n"):
            raise Mat1Error(f"{path}: missing or overlong header line")
        parts = header.split()
        if len(parts) != 3 or parts[0] != _MAGIC:
            raise Mat1Error(f"{path}: bad header {header!r}")
        try:
            rows, cols = int(parts[1]), int(parts[2])
        except ValueError:
            raise Mat1Error(f"{path}: non-integer dimensions in header {header!r}") from None
        if rows < 1 or cols < 1:
            raise Mat1Error(f"{path}: invalid dimensions {rows}x{cols}")
        payload = fh.read()
    expected = rows * cols * 8
    if len(payload) < expected:
        raise Mat1Error(f"{path}: truncated payload, expected {expected} bytes, got {len(payload)}")
    if len(payload) > expected:
        raise Mat1Error(f"{path}: {len(payload) - expected} trailing bytes after payload")
    m = np.frombuffer(payload, dtype="<f8").astype(np.float64).reshape(rows, cols)
    if not np.all(np.isfinite(m)):
        raise Mat1Error(f"{path}: payload contains non-finite values")
    return m
