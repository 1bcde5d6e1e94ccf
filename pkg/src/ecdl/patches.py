"""Grayscale image I/O (binary PGM), patch extraction/reassembly, and PSNR.

Patches are vectorized in row-major pixel order and stacked as columns of a
float64 matrix, with no mean removal or rescaling: pixel values pass
through as 0..255 reals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import as_matrix

__all__ = [
    "GrayImage",
    "PatchMatrix",
    "PgmError",
    "assemble_patches",
    "extract_patches",
    "load_pgm",
    "psnr",
    "save_pgm",
]

PEAK = 255.0


class PgmError(ValueError):
    """Raised for unsupported or malformed PGM files."""


@dataclass(frozen=True)
class GrayImage:
    """8-bit grayscale image; pixels is a read-only height x width array."""

    pixels: np.ndarray
    peak: int = 255

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 2 or px.size == 0:
            raise ValueError(f"pixels must be a non-empty 2-D array, got shape {px.shape}")
        if px.dtype != np.uint8:
            raise ValueError(f"pixels must be uint8, got {px.dtype}")
        if self.peak != 255:
            raise ValueError("only 8-bit images (peak 255) are supported")
        px = np.ascontiguousarray(px)
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


def _next_token(data: bytes, pos: int) -> tuple[bytes, int]:
    """Next whitespace-delimited header token, skipping '#' comments."""
    n = len(data)
    while pos < n:
        ch = data[pos : pos + 1]
        if ch == b"#":
            while pos < n and data[pos : pos + 1] != b"\n":
                pos += 1
        elif ch.isspace():
            pos += 1
        else:
            break
    start = pos
    while pos < n and not data[pos : pos + 1].isspace():
        pos += 1
    if start == pos:
        raise PgmError("unexpected end of header")
    return data[start:pos], pos


def load_pgm(path) -> GrayImage:
    """Read a binary (P5) PGM with maxval 255."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:2] == b"P2":
        raise PgmError(f"{path}: ASCII PGM (P2) is not supported, need binary P5")
    if data[:2] != b"P5":
        raise PgmError(f"{path}: not a PGM file (magic {data[:2]!r})")
    pos = 2
    fields = []
    for name in ("width", "height", "maxval"):
        try:
            tok, pos = _next_token(data, pos)
            fields.append(int(tok))
        except (PgmError, ValueError):
            raise PgmError(f"{path}: malformed header ({name})") from None
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise PgmError(f"{path}: invalid dimensions {width}x{height}")
    if maxval != 255:
        raise PgmError(f"{path}: maxval {maxval} not supported, need 255")
    pos += 1  # single whitespace byte after maxval
    payload = data[pos:]
    expected = width * height
    if len(payload) < expected:
        raise PgmError(f"{path}: truncated pixel data, expected {expected} bytes, got {len(payload)}")
    if len(payload) > expected:
        raise PgmError(f"{path}: {len(payload) - expected} trailing bytes after pixel data")
    px = np.frombuffer(payload, dtype=np.uint8).reshape(height, width)
    return GrayImage(px)


def save_pgm(img: GrayImage, path) -> None:
    with open(path, "wb") as fh:
        fh.write(f"P5\n{img.width} {img.height}\n255\n".encode("ascii"))
        fh.write(img.pixels.tobytes())


@dataclass(frozen=True)
class PatchMatrix:
    """side^2 x M matrix of vectorized patches plus the extraction geometry
    needed to put them back."""

    data: np.ndarray
    side: int
    stride: int
    image_height: int
    image_width: int

    def __post_init__(self):
        data = as_matrix(self.data, "data")
        if self.side < 1 or self.stride < 1:
            raise ValueError("side and stride must be positive")
        if data.shape[0] != self.side * self.side:
            raise ValueError(f"rows {data.shape[0]} do not match side^2 = {self.side * self.side}")
        if data.shape[1] != self.n_patches_expected:
            raise ValueError(
                f"got {data.shape[1]} patches, geometry implies {self.n_patches_expected}"
            )
        object.__setattr__(self, "data", data)

    @property
    def n_patches_expected(self) -> int:
        rows = (self.image_height - self.side) // self.stride + 1
        cols = (self.image_width - self.side) // self.stride + 1
        return rows * cols


def extract_patches(img: GrayImage, side: int, stride: int) -> PatchMatrix:
    """All side x side patches at the given stride, top-left corners scanned
    in row-major order."""
    if side < 1:
        raise ValueError("side must be positive")
    if stride < 1:
        raise ValueError("stride must be positive")
    if side > min(img.height, img.width):
        raise ValueError(f"side {side} exceeds image {img.height}x{img.width}")
    windows = np.lib.stride_tricks.sliding_window_view(img.pixels, (side, side))
    windows = windows[::stride, ::stride]
    nr, nc = windows.shape[:2]
    data = windows.reshape(nr * nc, side * side).T.astype(np.float64)
    return PatchMatrix(data, side, stride, img.height, img.width)


def assemble_patches(P: PatchMatrix) -> GrayImage:
    """Rebuild the image by averaging all patch copies of every pixel
    (rounded half up, clamped to 0..255).

    Requires full coverage: stride <= side and patch rows/columns reaching
    the bottom/right edges.
    """
    H, W, side, stride = P.image_height, P.image_width, P.side, P.stride
    if stride > side:
        raise ValueError(f"coverage gap: stride {stride} exceeds side {side}")
    if (H - side) % stride or (W - side) % stride:
        raise ValueError(
            f"coverage gap: {H}x{W} image is not tiled by side {side} at stride {stride}"
        )
    sums = np.zeros((H, W))
    counts = np.zeros((H, W))
    nc = (W - side) // stride + 1
    for i in range(P.data.shape[1]):
        r = (i // nc) * stride
        c = (i % nc) * stride
        sums[r : r + side, c : c + side] += P.data[:, i].reshape(side, side)
        counts[r : r + side, c : c + side] += 1.0
    avg = np.floor(sums / counts + 0.5)
    return GrayImage(np.clip(avg, 0, 255).astype(np.uint8))


def psnr(mse: float, peak: float = PEAK) -> float:
    """10 * log10(peak^2 / mse) in dB; an exact-zero MSE reports inf as the
    perfect-reconstruction sentinel."""
    if mse < 0:
        raise ValueError(f"mse must be non-negative, got {mse}")
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(peak * peak / mse)
