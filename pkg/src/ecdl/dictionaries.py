"""Dictionary construction, normalization, and atom repair.

A dictionary is an n x K matrix whose columns (atoms) have unit l2 norm.
Overcompleteness K > n is the intended regime; K >= n is accepted with a
warning below 2n.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .linalg import RngState, as_matrix

__all__ = [
    "Dictionary",
    "NormalizedColumns",
    "RepairResult",
    "normalize_columns",
    "overcomplete_dct",
    "random_dictionary",
    "replace_degenerate_atoms",
]

UNIT_NORM_TOL = 1e-12
# |<d_i, d_j>| above this marks i, j as duplicates; tight enough to fire
# only on true collapse.
DUPLICATE_TOL = 1.0 - 1e-6


@dataclass(frozen=True)
class Dictionary:
    """Unit-norm atom matrix plus provenance (how it was initialized).

    Columns must have unit l2 norm within 1e-12. All-zero columns are
    tolerated only as a transient state between a least-squares update and
    atom repair; they are listed in `zero_atoms`.
    """

    atoms: np.ndarray
    init_mode: str = "loaded"  # dct | random | loaded
    seed: int | None = None
    zero_atoms: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        atoms = as_matrix(self.atoms, "atoms")
        n, K = atoms.shape
        if self.init_mode not in ("dct", "random", "loaded"):
            raise ValueError(f"unknown init_mode {self.init_mode!r}")
        if K < n:
            raise ValueError(f"dictionary must have at least as many atoms as rows, got {n}x{K}")
        if K < 2 * n:
            warnings.warn(
                f"dictionary {n}x{K} is barely overcomplete (K < 2n)", stacklevel=2
            )
        norms = np.linalg.norm(atoms, axis=0)
        zero = norms == 0.0
        off = np.abs(norms[~zero] - 1.0)
        if off.size and off.max() > UNIT_NORM_TOL:
            raise ValueError(
                f"atom norms deviate from 1 by up to {off.max():.3e} (tolerance {UNIT_NORM_TOL})"
            )
        atoms = np.ascontiguousarray(atoms)
        atoms.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "zero_atoms", tuple(int(j) for j in np.flatnonzero(zero)))

    @property
    def n_dims(self) -> int:
        return self.atoms.shape[0]

    @property
    def n_atoms(self) -> int:
        return self.atoms.shape[1]


def overcomplete_dct(patch_side: int, num_atoms: int) -> Dictionary:
    """Separable cosine dictionary for square patches.

    Builds the 1-D basis C[i, p] = cos(i * p * pi / q) for q = sqrt(num_atoms),
    removes the mean of every non-constant column, normalizes, and squares it
    up via the Kronecker product, giving patch_side^2 x num_atoms atoms.
    """
    if patch_side < 1:
        raise ValueError("patch_side must be positive")
    q = math.isqrt(int(num_atoms))
    if q * q != num_atoms:
        raise ValueError(f"num_atoms must be a perfect square, got {num_atoms}")
    if q < patch_side:
        raise ValueError(f"num_atoms={num_atoms} gives {q} 1-D atoms, fewer than patch_side={patch_side}")
    i = np.arange(patch_side, dtype=np.float64)[:, None]
    p = np.arange(q, dtype=np.float64)[None, :]
    C = np.cos(i * p * np.pi / q)
    C[:, 1:] -= C[:, 1:].mean(axis=0, keepdims=True)
    C /= np.linalg.norm(C, axis=0, keepdims=True)
    D = np.kron(C, C)
    D /= np.linalg.norm(D, axis=0, keepdims=True)
    return Dictionary(D, init_mode="dct")


def random_dictionary(n: int, K: int, rng: RngState) -> Dictionary:
    """Atoms drawn i.i.d. uniform on [0, 1) and column-normalized."""
    if n < 1:
        raise ValueError("n must be positive")
    if K < n:
        raise ValueError(f"need K >= n, got n={n}, K={K}")
    atoms = rng.uniform(0.0, 1.0, (n, K))
    atoms /= np.linalg.norm(atoms, axis=0, keepdims=True)
    return Dictionary(atoms, init_mode="random", seed=rng.seed)


@dataclass(frozen=True)
class NormalizedColumns:
    """Result of normalize_columns: the unit-norm dictionary, the original
    column norms (so codes can be rescaled to preserve the product), and the
    indices of all-zero columns that were left untouched."""

    dictionary: Dictionary
    scales: np.ndarray
    zero_atoms: tuple[int, ...]


def normalize_columns(D, init_mode: str = "loaded", seed: int | None = None) -> NormalizedColumns:
    """Divide every nonzero column by its l2 norm.

    Zero columns are flagged, not divided; callers are expected to repair
    them (see replace_degenerate_atoms).
    """
    mat, scales, zero = _normalize(as_matrix(D, "D"))
    return NormalizedColumns(Dictionary(mat, init_mode, seed), scales, zero)


def _normalize(mat: np.ndarray) -> tuple[np.ndarray, np.ndarray, tuple[int, ...]]:
    norms = np.linalg.norm(mat, axis=0)
    zero = norms == 0.0
    safe = np.where(zero, 1.0, norms)
    return mat / safe, norms, tuple(int(j) for j in np.flatnonzero(zero))


@dataclass(frozen=True)
class RepairResult:
    dictionary: Dictionary
    replaced: tuple[int, ...]


def replace_degenerate_atoms(D: Dictionary, Y, residuals, rng: RngState) -> RepairResult:
    """Replace zero-norm and duplicate atoms.

    Each degenerate atom becomes the normalized training sample with the
    largest residual not already consumed by this call; when samples run
    out, a random unit vector is drawn from `rng` instead. Of a duplicate
    pair only the later atom is replaced.
    """
    Y = as_matrix(Y, "Y")
    residuals = np.asarray(residuals, dtype=np.float64)
    if residuals.shape != (Y.shape[1],):
        raise ValueError(
            f"residuals must have one entry per sample, got {residuals.shape} for {Y.shape[1]} samples"
        )
    atoms = np.array(D.atoms)
    n, K = atoms.shape
    if Y.shape[0] != n:
        raise ValueError(f"sample dimension {Y.shape[0]} does not match atoms {n}")

    norms = np.linalg.norm(atoms, axis=0)
    bad = [int(j) for j in np.flatnonzero(norms == 0.0)]
    flagged = set(bad)
    gram = atoms.T @ atoms
    for j in range(K):
        if j in flagged:
            continue
        for i in range(j):
            if i in flagged:
                continue
            if abs(gram[i, j]) > DUPLICATE_TOL:
                bad.append(j)
                flagged.add(j)
                break

    if not bad:
        return RepairResult(D, ())

    # Highest residual first; ties resolved toward the lower sample index.
    order = np.argsort(-residuals, kind="stable")
    picks = iter(order)
    for j in sorted(bad):
        atom = None
        for s in picks:
            y = Y[:, s]
            norm = np.linalg.norm(y)
            if norm > 0.0:
                atom = y / norm
                break
        if atom is None:
            v = rng.uniform(0.0, 1.0, n)
            atom = v / np.linalg.norm(v)
        atoms[:, j] = atom
    return RepairResult(
        Dictionary(atoms, D.init_mode, D.seed), tuple(sorted(flagged))
    )
