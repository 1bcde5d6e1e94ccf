"""Dense matrix primitives: pseudo-inverse, least-squares dictionary fit,
error metrics, and the seeded random stream used everywhere else.

All matrices are 2-D float64 numpy arrays with finite entries. Helpers here
validate that contract at the public boundaries so downstream code can rely
on it.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "RngState",
    "as_matrix",
    "frobenius_mse",
    "least_squares_dictionary",
    "pseudo_inverse",
    "seeded_uniform_matrix",
]


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a validated 2-D float64 array (finite, non-empty)."""
    m = np.asarray(a, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {m.shape}")
    if m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"{name} must have at least one row and column, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains non-finite entries")
    return m


class RngState:
    """Explicit seeded random stream (PCG64).

    The stream is a deterministic function of the seed and is stable across
    platforms. State advances as values are drawn; construct a fresh
    RngState from the same seed to replay a stream.
    """

    algorithm = "pcg64"

    def __init__(self, seed: int):
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
        self.seed = seed
        self._gen = np.random.Generator(np.random.PCG64(seed))

    def uniform(self, lo: float, hi: float, size) -> np.ndarray:
        """Draw i.i.d. uniforms on [lo, hi), advancing the stream."""
        if not lo < hi:
            raise ValueError(f"uniform range requires lo < hi, got [{lo}, {hi})")
        return self._gen.random(size) * (hi - lo) + lo

    def __repr__(self):
        return f"RngState(seed={self.seed})"


def seeded_uniform_matrix(rows: int, cols: int, lo: float, hi: float, rng: RngState) -> np.ndarray:
    """rows x cols matrix of i.i.d. uniforms on [lo, hi)."""
    if rows < 1 or cols < 1:
        raise ValueError(f"matrix dimensions must be positive, got {rows}x{cols}")
    return rng.uniform(lo, hi, (rows, cols))


def pseudo_inverse(A) -> np.ndarray:
    """Moore-Penrose pseudo-inverse via SVD.

    Singular values below max(rows, cols) * machine epsilon * sigma_max are
    treated as zero, so rank-deficient inputs (e.g. code matrices with dead
    atom rows) produce the minimum-norm inverse instead of blowing up.
    """
    A = as_matrix(A)
    try:
        U, s, Vt = np.linalg.svd(A, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(
            f"SVD did not converge for {A.shape[0]}x{A.shape[1]} matrix"
        ) from exc
    tau = max(A.shape) * np.finfo(np.float64).eps * (s[0] if s.size else 0.0)
    s_inv = np.zeros_like(s)
    keep = s > tau
    s_inv[keep] = 1.0 / s[keep]
    return (Vt.T * s_inv) @ U.T


def least_squares_dictionary(Y, X) -> tuple[np.ndarray, bool]:
    """Best-fit dictionary D minimizing ||Y - D X||_F, i.e. D = Y X^+.

    Returns (D, degenerate). `degenerate` is True when X is all-zero; the
    fit is then the zero dictionary and the caller must repair the atoms.
    """
    Y = as_matrix(Y, "Y")
    X = as_matrix(X, "X")
    if Y.shape[1] != X.shape[1]:
        raise ValueError(
            f"Y and X must have the same number of samples, got {Y.shape[1]} and {X.shape[1]}"
        )
    if not np.any(X):
        return np.zeros((Y.shape[0], X.shape[0])), True
    return Y @ pseudo_inverse(X), False


def frobenius_mse(A, B) -> float:
    """Mean squared entry-wise difference, ||A - B||_F^2 / (rows * cols).

    The reduction runs in a fixed index order so repeated calls are
    bit-identical.
    """
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch: {A.shape} vs {B.shape}")
    d = np.ravel(A - B, order="C")
    return float(np.dot(d, d) / d.size)
