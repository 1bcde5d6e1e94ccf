"""Vectorized numpy kernel for batch orthogonal matching pursuit.

Fallback used when the compiled kernel (ecdl._omp_cy) is unavailable or
disabled. Both kernels implement the same greedy rule and expose the same
entry point; see ecdl.omp for the public API.
"""

from __future__ import annotations

import numpy as np

KERNEL_NAME = "numpy"

# Samples per slice; bounds the K x chunk temporaries when encoding very
# wide batches (e.g. stride-1 patch matrices).
_CHUNK = 4096


def encode_batch(D: np.ndarray, Y: np.ndarray, k: int, tol: float):
    """Greedy OMP on every column of Y against unit-norm atoms D.

    Per column: while fewer than k atoms are selected and the residual
    exceeds tol * ||y||, pick the atom with the largest |<atom, residual>|
    (ties to the lowest index), refit all coefficients by least squares on
    the selected atoms, and recompute the residual. An exact-zero best
    correlation stops early.

    Returns (idx, coef, lens): idx is (M, k) int32 with selected atom
    indices in selection order (-1 padding), coef is (M, k) float64, and
    lens is (M,) int32 with the number of selected atoms per column.
    """
    n, K = D.shape
    M = Y.shape[1]
    idx = np.full((M, k), -1, dtype=np.int32)
    coef = np.zeros((M, k), dtype=np.float64)
    lens = np.zeros(M, dtype=np.int32)
    if k == 0 or M == 0:
        return idx, coef, lens
    gram = D.T @ D
    for lo in range(0, M, _CHUNK):
        hi = min(lo + _CHUNK, M)
        _encode_chunk(D, gram, Y[:, lo:hi], k, tol, idx[lo:hi], coef[lo:hi], lens[lo:hi], lo)
    return idx, coef, lens


def _encode_chunk(D, gram, Y, k, tol, idx, coef, lens, col_offset):
    m = Y.shape[1]
    dty = D.T @ Y
    ynorm2 = np.einsum("nm,nm->m", Y, Y)
    thresh2 = tol * tol * ynorm2
    R = Y.copy()
    active = ynorm2 > thresh2
    for t in range(k):
        act = np.flatnonzero(active)
        if act.size == 0:
            break
        absC = np.abs(D.T @ R[:, act])
        j = np.argmax(absC, axis=0)  # first occurrence wins ties
        best = absC[j, np.arange(act.size)]
        keep = best > 0.0
        if not np.all(keep):
            active[act[~keep]] = False
            act = act[keep]
            j = j[keep]
            if act.size == 0:
                break
        idx[act, t] = j
        lens[act] = t + 1
        S = idx[act, : t + 1].astype(np.int64)
        G = gram[S[:, :, None], S[:, None, :]]
        b = dty[S, act[:, None]]
        try:
            c = np.linalg.solve(G, b[:, :, None])[:, :, 0]
        except np.linalg.LinAlgError:
            _raise_singular(G, S, act, col_offset)
        coef[act, : t + 1] = c
        Ra = Y[:, act] - np.einsum("nms,ms->nm", D[:, S], c)
        R[:, act] = Ra
        active[act] = np.einsum("nm,nm->m", Ra, Ra) > thresh2[act]


def _raise_singular(G, S, act, col_offset):
    for i in range(G.shape[0]):
        try:
            np.linalg.solve(G[i], np.zeros(G.shape[1]))
        except np.linalg.LinAlgError:
            raise np.linalg.LinAlgError(
                f"singular atom subsystem for sample {col_offset + int(act[i])}, "
                f"support {S[i].tolist()}"
            ) from None
    raise np.linalg.LinAlgError("singular atom subsystem in batch")  # pragma: no cover
