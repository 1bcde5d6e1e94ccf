"""Planted sparse-coding problems for experiments and regression baselines."""

from __future__ import annotations

import numpy as np

from .dictionaries import Dictionary, random_dictionary
from .linalg import RngState

__all__ = ["planted_problem"]


def planted_problem(
    n_dims: int,
    n_atoms: int,
    n_samples: int,
    sparsity: int,
    seed: int,
    noise: float = 0.0,
    coef_range: tuple[float, float] = (-2.0, 2.0),
) -> tuple[np.ndarray, Dictionary, np.ndarray]:
    """Samples Y = D_true @ X_true (+ uniform noise) with exactly `sparsity`
    nonzeros per column of X_true.

    Supports are chosen by ranking uniform draws, so the construction is
    platform-stable. Returns (Y, D_true, X_true).
    """
    if not 1 <= sparsity <= n_atoms:
        raise ValueError(f"need 1 <= sparsity <= n_atoms, got {sparsity}")
    rng = RngState(seed)
    D_true = random_dictionary(n_dims, n_atoms, rng)
    lo, hi = coef_range
    X = np.zeros((n_atoms, n_samples))
    ranks = rng.uniform(0.0, 1.0, (n_atoms, n_samples))
    supports = np.argsort(ranks, axis=0, kind="stable")[:sparsity, :]
    coefs = rng.uniform(lo, hi, (sparsity, n_samples))
    cols = np.arange(n_samples)
    for r in range(sparsity):
        X[supports[r], cols] = coefs[r]
    Y = D_true.atoms @ X
    if noise > 0.0:
        Y = Y + rng.uniform(-noise, noise, Y.shape)
    return Y, D_true, X
