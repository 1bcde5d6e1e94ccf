"""Training algorithms: plain alternating least-squares updates (mod), the
error-feedback variant (ecmod), and its full-budget chaser (ecmodplus),
plus the iteration driver and dictionary evaluation.

One ecmod step codes with a reduced budget m, refits the dictionary, codes
the leftover approximation error with budget k - m, adds the two codes, and
refits again. ecmodplus appends a standard full-budget coding + refit.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .dictionaries import Dictionary, _normalize, replace_degenerate_atoms
from .linalg import RngState, as_matrix, frobenius_mse, least_squares_dictionary
from .omp import DEFAULT_TOL, SparseCodeSet, code_sum, omp_encode_batch
from .patches import psnr

__all__ = [
    "ALGORITHMS",
    "EvalRecord",
    "LearnConfig",
    "StepResult",
    "TraceRecord",
    "TrainTrace",
    "ecmod_plus_step",
    "ecmod_step",
    "evaluate_dictionary",
    "mod_step",
    "train",
]

ALGORITHMS = ("mod", "ecmod", "ecmodplus")

# Allowed relative growth of ||Y - D X||_F across a least-squares refit;
# anything larger means the update lost optimality and is a hard bug.
_DESCENT_RTOL = 1e-9


@dataclass(frozen=True)
class LearnConfig:
    """Validated knob set for one training run."""

    algo: str
    k: int
    m: int | None = None
    max_iters: int = 40
    omp_tol: float = DEFAULT_TOL
    stop_delta: float = 1e-6
    seed: int = 0
    init: str = "dct"  # dct | random | loaded

    def __post_init__(self):
        if self.algo not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algo!r}, expected one of {ALGORITHMS}")
        if self.init not in ("dct", "random", "loaded"):
            raise ValueError(f"unknown init {self.init!r}")
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.algo in ("ecmod", "ecmodplus"):
            if self.m is None:
                raise ValueError(f"{self.algo} requires the reduced budget m")
            if not 1 <= self.m < self.k:
                raise ValueError(f"need 1 <= m < k, got m={self.m}, k={self.k}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.omp_tol < 0 or self.stop_delta < 0:
            raise ValueError("tolerances must be non-negative")


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    mse: float
    psnr_db: float
    mean_support: float
    atoms_repaired: int
    seconds: float


@dataclass(frozen=True)
class TrainTrace:
    """Per-iteration training records."""

    records: tuple[TraceRecord, ...]

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    @property
    def final(self) -> TraceRecord:
        if not self.records:
            raise ValueError("empty trace")
        return self.records[-1]

    def write_csv(self, path, timings: bool = False) -> None:
        """CSV export; the elapsed-seconds column is opt-in so default
        outputs stay byte-reproducible across runs."""
        cols = "iter,mse,psnr_db,mean_support,atoms_repaired"
        with open(path, "w", newline="") as fh:
            fh.write(cols + (",seconds\n" if timings else "\n"))
            for r in self.records:
                row = f"{r.iteration},{r.mse!r},{r.psnr_db!r},{r.mean_support!r},{r.atoms_repaired}"
                fh.write(row + (f",{r.seconds!r}\n" if timings else "\n"))


@dataclass(frozen=True)
class StepResult:
    """One training step: the refit dictionary, the codes it was fit to,
    and repair/diagnostic extras. Unpacks as (dictionary, codes)."""

    dictionary: Dictionary
    codes: SparseCodeSet
    atoms_repaired: int = 0
    stage1_codes: SparseCodeSet | None = None
    error_codes: SparseCodeSet | None = None

    def __iter__(self):
        return iter((self.dictionary, self.codes))


def _refit_dictionary(
    D: Dictionary, Y: np.ndarray, codes: SparseCodeSet, rng: RngState
) -> tuple[Dictionary, SparseCodeSet, int]:
    """Least-squares dictionary refit for fixed codes, then column
    normalization (codes rescaled to keep D @ X unchanged) and atom repair.

    Asserts the refit never increases ||Y - D X||_F beyond rounding.
    """
    X = codes.to_dense()
    err_before = np.linalg.norm(Y - D.atoms @ X)
    raw, _degenerate = least_squares_dictionary(Y, X)
    err_after = np.linalg.norm(Y - raw @ X)
    # absolute floor covers the exactly-representable case where both errors
    # sit at rounding level relative to ||Y||
    if err_after > err_before * (1.0 + _DESCENT_RTOL) + 1e-12 * (1.0 + np.linalg.norm(Y)):
        raise ArithmeticError(
            f"least-squares refit increased the fit error from {err_before!r} to {err_after!r}"
        )
    atoms, scales, zero = _normalize(raw)
    rescaled = codes.scale_rows(scales)
    candidate = Dictionary(atoms, D.init_mode, D.seed)
    residuals = np.linalg.norm(Y - atoms @ rescaled.to_dense(), axis=0)
    repair = replace_degenerate_atoms(candidate, Y, residuals, rng)
    return repair.dictionary, rescaled, len(repair.replaced)


def mod_step(
    D: Dictionary, Y, k: int, omp_tol: float = DEFAULT_TOL, rng: RngState | None = None
) -> StepResult:
    """Code with the full budget, refit the dictionary once."""
    Y = as_matrix(Y, "Y")
    rng = rng if rng is not None else RngState(0)
    codes = omp_encode_batch(D, Y, k, omp_tol)
    D2, codes2, repaired = _refit_dictionary(D, Y, codes, rng)
    return StepResult(D2, codes2, repaired)


def _combine(a: SparseCodeSet, b: SparseCodeSet, k: int) -> SparseCodeSet:
    summed = [code_sum(a[i], b[i]) for i in range(len(a))]
    return SparseCodeSet.from_codes(summed, a.dim, k)


def ecmod_step(
    D: Dictionary,
    Y,
    m: int,
    k: int,
    omp_tol: float = DEFAULT_TOL,
    rng: RngState | None = None,
) -> StepResult:
    """Error-feedback step.

    Stage 1 codes with the reduced budget m and refits; stage 2 codes the
    leftover error E = Y - D A with budget k - m against the refit
    dictionary; the final refit uses the summed codes A + B, which stay
    within the original budget k.
    """
    if not 1 <= m < k:
        raise ValueError(f"need 1 <= m < k, got m={m}, k={k}")
    Y = as_matrix(Y, "Y")
    rng = rng if rng is not None else RngState(0)
    A = omp_encode_batch(D, Y, m, omp_tol)
    D1, A1, rep1 = _refit_dictionary(D, Y, A, rng)
    E = Y - D1.atoms @ A1.to_dense()
    B = omp_encode_batch(D1, E, k - m, omp_tol)
    combined = _combine(A1, B, k)
    if not combined.support_sizes().any():
        raise ArithmeticError("combined codes are all empty; nothing to fit the dictionary to")
    D2, combined2, rep2 = _refit_dictionary(D1, Y, combined, rng)
    return StepResult(D2, combined2, rep1 + rep2, stage1_codes=A1, error_codes=B)


def ecmod_plus_step(
    D: Dictionary,
    Y,
    m: int,
    k: int,
    omp_tol: float = DEFAULT_TOL,
    rng: RngState | None = None,
) -> StepResult:
    """Error-feedback step chased by one conventional full-budget update,
    restoring optimality for the target sparsity k."""
    Y = as_matrix(Y, "Y")
    rng = rng if rng is not None else RngState(0)
    first = ecmod_step(D, Y, m, k, omp_tol, rng)
    X = omp_encode_batch(first.dictionary, Y, k, omp_tol)
    D2, X2, rep = _refit_dictionary(first.dictionary, Y, X, rng)
    return StepResult(
        D2,
        X2,
        first.atoms_repaired + rep,
        stage1_codes=first.stage1_codes,
        error_codes=first.error_codes,
    )


def _run_step(config: LearnConfig, D: Dictionary, Y: np.ndarray, rng: RngState) -> StepResult:
    if config.algo == "mod":
        return mod_step(D, Y, config.k, config.omp_tol, rng)
    if config.algo == "ecmod":
        return ecmod_step(D, Y, config.m, config.k, config.omp_tol, rng)
    return ecmod_plus_step(D, Y, config.m, config.k, config.omp_tol, rng)


def train(config: LearnConfig, Y, D0: Dictionary) -> tuple[Dictionary, TrainTrace]:
    """Iterate the configured step until max_iters or until the relative
    MSE improvement over one iteration drops below stop_delta (> 0).

    Deterministic for fixed (config, Y, D0): the only randomness is the
    atom-repair fallback, seeded from config.seed.
    """
    Y = as_matrix(Y, "Y")
    if Y.shape[0] != D0.n_dims:
        raise ValueError(f"samples have dimension {Y.shape[0]}, dictionary expects {D0.n_dims}")
    rng = RngState(config.seed)
    D = D0
    records: list[TraceRecord] = []
    prev_mse: float | None = None
    for it in range(1, config.max_iters + 1):
        t0 = time.perf_counter()
        result = _run_step(config, D, Y, rng)
        D = result.dictionary
        mse = frobenius_mse(Y, D.atoms @ result.codes.to_dense())
        sizes = result.codes.support_sizes()
        records.append(
            TraceRecord(
                iteration=it,
                mse=mse,
                psnr_db=psnr(mse),
                mean_support=float(sizes.mean()) if sizes.size else 0.0,
                atoms_repaired=result.atoms_repaired,
                seconds=time.perf_counter() - t0,
            )
        )
        if prev_mse is not None and config.stop_delta > 0 and prev_mse > 0:
            if (prev_mse - mse) / prev_mse < config.stop_delta:
                break
        prev_mse = mse
    return D, TrainTrace(tuple(records))


@dataclass(frozen=True)
class EvalRecord:
    k_test: int
    psnr_db: float
    mse: float


def evaluate_dictionary(
    D: Dictionary, Y_test, k_list, omp_tol: float = DEFAULT_TOL
) -> list[EvalRecord]:
    """Approximation quality of a fixed dictionary at several test
    sparsities: one global MSE (and PSNR) over all samples per k."""
    Y_test = as_matrix(Y_test, "Y_test")
    k_list = [int(k) for k in k_list]
    if not k_list:
        raise ValueError("k_list must be nonempty")
    out = []
    for k in k_list:
        codes = omp_encode_batch(D, Y_test, k, omp_tol)
        mse = frobenius_mse(Y_test, D.atoms @ codes.to_dense())
        out.append(EvalRecord(k_test=k, psnr_db=psnr(mse), mse=mse))
    return out
