"""Orthogonal matching pursuit sparse coding.

Single-sample and batch coders against a unit-norm dictionary, plus the
sparse-code containers and the coefficient-sum used by the error-feedback
learners. The heavy lifting happens in one of two interchangeable kernels:
a compiled Cython extension (default when built) or a vectorized numpy
fallback, selected once at import. Set ECDL_PURE_PYTHON=1 to force the
fallback.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import _omp_numpy
from .dictionaries import Dictionary
from .linalg import as_matrix

__all__ = [
    "DEFAULT_TOL",
    "SparseCode",
    "SparseCodeSet",
    "SupportStats",
    "code_sum",
    "kernel_backend",
    "omp_encode",
    "omp_encode_batch",
    "reconstruct",
    "support_stats",
]

# Relative residual threshold: strict by default so coding normally runs to
# the full atom budget, while exactly representable signals still stop early
# instead of producing singular fits.
DEFAULT_TOL = 1e-9

if os.environ.get("ECDL_PURE_PYTHON"):
    _kernel = _omp_numpy
else:
    try:
        from . import _omp_cy as _kernel
    except ImportError:
        _kernel = _omp_numpy


def kernel_backend() -> str:
    """Name of the active OMP kernel: 'compiled' or 'numpy'."""
    return _kernel.KERNEL_NAME


@dataclass(frozen=True)
class SparseCode:
    """Sparse coefficient vector over a K-atom dictionary.

    `support` holds atom indices in selection order; `coefficients` aligns
    with it. The dense form has `dim` entries, zero off-support.
    """

    dim: int
    support: tuple[int, ...]
    coefficients: tuple[float, ...]

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if len(self.support) != len(self.coefficients):
            raise ValueError("support and coefficients must have equal length")
        if len(set(self.support)) != len(self.support):
            raise ValueError(f"duplicate atom indices in support {self.support}")
        if any(not 0 <= j < self.dim for j in self.support):
            raise ValueError(f"atom index out of range in {self.support}")
        if not all(np.isfinite(c) for c in self.coefficients):
            raise ValueError("non-finite coefficient")

    def __len__(self):
        return len(self.support)

    def to_dense(self) -> np.ndarray:
        x = np.zeros(self.dim)
        for j, c in zip(self.support, self.coefficients):
            x[j] = c
        return x


class SparseCodeSet:
    """Codes for a batch of samples, stored column-compressed.

    Array-backed so large batches stay cheap; individual SparseCode views
    are materialized on demand.
    """

    def __init__(self, dim, k_budget, idx, coef, lens):
        idx = np.asarray(idx, dtype=np.int32)
        coef = np.asarray(coef, dtype=np.float64)
        lens = np.asarray(lens, dtype=np.int32)
        if idx.shape != coef.shape or idx.shape != (lens.shape[0], k_budget):
            raise ValueError("inconsistent code array shapes")
        if lens.size and lens.max(initial=0) > k_budget:
            raise ValueError("support size exceeds k budget")
        self.dim = int(dim)
        self.k_budget = int(k_budget)
        self._idx = idx
        self._coef = coef
        self._lens = lens

    @classmethod
    def from_codes(cls, codes, dim: int, k_budget: int) -> "SparseCodeSet":
        codes = list(codes)
        idx = np.full((len(codes), k_budget), -1, dtype=np.int32)
        coef = np.zeros((len(codes), k_budget))
        lens = np.zeros(len(codes), dtype=np.int32)
        for i, code in enumerate(codes):
            if code.dim != dim:
                raise ValueError(f"code {i} has dim {code.dim}, expected {dim}")
            if len(code) > k_budget:
                raise ValueError(f"code {i} exceeds budget {k_budget}")
            lens[i] = len(code)
            idx[i, : len(code)] = code.support
            coef[i, : len(code)] = code.coefficients
        return cls(dim, k_budget, idx, coef, lens)

    def __len__(self):
        return self._lens.shape[0]

    def __getitem__(self, i: int) -> SparseCode:
        ln = int(self._lens[i])
        return SparseCode(
            self.dim,
            tuple(int(j) for j in self._idx[i, :ln]),
            tuple(float(c) for c in self._coef[i, :ln]),
        )

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    def support_sizes(self) -> np.ndarray:
        return self._lens.copy()

    def to_dense(self) -> np.ndarray:
        """Dense dim x M codes matrix, zeros off-support."""
        M = len(self)
        X = np.zeros((self.dim, M))
        rows = self._idx
        mask = rows >= 0
        cols = np.broadcast_to(np.arange(M)[:, None], rows.shape)
        X[rows[mask], cols[mask]] = self._coef[mask]
        return X

    @classmethod
    def from_dense(cls, X, k_budget: int | None = None) -> "SparseCodeSet":
        """Rebuild from a dense codes matrix (selection order is lost;
        supports come back in ascending atom order)."""
        X = as_matrix(X, "X")
        dim, M = X.shape
        supports = [np.flatnonzero(X[:, i]) for i in range(M)]
        widest = max((len(s) for s in supports), default=0)
        if k_budget is None:
            k_budget = widest
        elif widest > k_budget:
            raise ValueError(f"dense codes use up to {widest} atoms, over budget {k_budget}")
        idx = np.full((M, k_budget), -1, dtype=np.int32)
        coef = np.zeros((M, k_budget))
        lens = np.zeros(M, dtype=np.int32)
        for i, s in enumerate(supports):
            lens[i] = len(s)
            idx[i, : len(s)] = s
            coef[i, : len(s)] = X[s, i]
        return cls(dim, k_budget, idx, coef, lens)

    def scale_rows(self, scales) -> "SparseCodeSet":
        """Multiply every coefficient by the scale of its atom (used to
        compensate dictionary column normalization)."""
        scales = np.asarray(scales, dtype=np.float64)
        if scales.shape != (self.dim,):
            raise ValueError(f"need one scale per atom, got {scales.shape}")
        coef = self._coef.copy()
        mask = self._idx >= 0
        coef[mask] *= scales[self._idx[mask]]
        return SparseCodeSet(self.dim, self.k_budget, self._idx, coef, self._lens)


def _check_inputs(D: Dictionary, Y: np.ndarray, k: int, tol: float):
    if not isinstance(D, Dictionary):
        raise TypeError("D must be a Dictionary")
    if D.zero_atoms:
        raise ValueError(f"dictionary has unrepaired zero atoms {D.zero_atoms}")
    if k < 0:
        raise ValueError("k must be non-negative")
    if tol < 0:
        raise ValueError("tol must be non-negative")
    if Y.shape[0] != D.n_dims:
        raise ValueError(f"samples have dimension {Y.shape[0]}, dictionary expects {D.n_dims}")


def omp_encode(D: Dictionary, y, k: int, tol: float = DEFAULT_TOL) -> SparseCode:
    """Greedy sparse code of a single sample.

    Selects at most k atoms; stops early once the residual norm falls to
    tol * ||y||. See omp_encode_batch for the batch form.
    """
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 1:
        raise ValueError(f"y must be a vector, got shape {y.shape}")
    if not np.all(np.isfinite(y)):
        raise ValueError("y contains non-finite entries")
    return omp_encode_batch(D, y[:, None], k, tol)[0]


def omp_encode_batch(D: Dictionary, Y, k: int, tol: float = DEFAULT_TOL) -> SparseCodeSet:
    """Greedy sparse codes for every column of Y.

    Columns are coded independently; a singular selected-atom subsystem
    raises numpy.linalg.LinAlgError naming the sample and its support.
    """
    Y = as_matrix(Y, "Y")
    _check_inputs(D, Y, k, tol)
    idx, coef, lens = _kernel.encode_batch(D.atoms, Y, int(k), float(tol))
    return SparseCodeSet(D.n_atoms, int(k), idx, coef, lens)


def reconstruct(D: Dictionary, code: SparseCode) -> np.ndarray:
    """Approximation D @ x for a single code (empty code gives zeros)."""
    if code.dim != D.n_atoms:
        raise ValueError(f"code dim {code.dim} does not match dictionary {D.n_atoms}")
    y = np.zeros(D.n_dims)
    for j, c in zip(code.support, code.coefficients):
        y += c * D.atoms[:, j]
    return y


def code_sum(a: SparseCode, b: SparseCode) -> SparseCode:
    """Coefficient-wise sum over the union of supports.

    Entries cancelling to exactly zero are dropped. Atoms keep a's
    selection order first, then b's new atoms in b's order.
    """
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    bmap = dict(zip(b.support, b.coefficients))
    support: list[int] = []
    coefs: list[float] = []
    for j, c in zip(a.support, a.coefficients):
        s = c + bmap.pop(j, 0.0)
        if s != 0.0:
            support.append(j)
            coefs.append(s)
    for j, c in zip(b.support, b.coefficients):
        if j in bmap and c != 0.0:
            support.append(j)
            coefs.append(c)
    return SparseCode(a.dim, tuple(support), tuple(coefs))


@dataclass(frozen=True)
class SupportStats:
    """Histogram of support sizes 0..k_budget plus the mean (None when the
    set is empty)."""

    counts: tuple[int, ...]
    mean: float | None


def support_stats(codes: SparseCodeSet) -> SupportStats:
    sizes = codes.support_sizes()
    if sizes.size == 0:
        return SupportStats((), None)
    counts = np.bincount(sizes, minlength=codes.k_budget + 1)
    return SupportStats(tuple(int(c) for c in counts), float(sizes.mean()))
