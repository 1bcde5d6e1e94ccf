"""ecdl: dictionary learning with error-coded least-squares updates.

Learns overcomplete unit-norm dictionaries from data with OMP sparse coding
and pseudo-inverse dictionary refits, including the error-feedback variants
that code a reduced-budget approximation error back into the codes.
"""

from .dictionaries import (
    Dictionary,
    normalize_columns,
    overcomplete_dct,
    random_dictionary,
    replace_degenerate_atoms,
)
from .learners import (
    LearnConfig,
    StepResult,
    TrainTrace,
    ecmod_plus_step,
    ecmod_step,
    evaluate_dictionary,
    mod_step,
    train,
)
from .linalg import (
    RngState,
    frobenius_mse,
    least_squares_dictionary,
    pseudo_inverse,
    seeded_uniform_matrix,
)
from .matio import load_mat1, save_mat1
from .omp import (
    SparseCode,
    SparseCodeSet,
    code_sum,
    kernel_backend,
    omp_encode,
    omp_encode_batch,
    reconstruct,
    support_stats,
)
from .patches import (
    GrayImage,
    PatchMatrix,
    assemble_patches,
    extract_patches,
    load_pgm,
    psnr,
    save_pgm,
)
from .synth import planted_problem

__version__ = "0.1.0"

__all__ = [
    "Dictionary",
    "GrayImage",
    "LearnConfig",
    "PatchMatrix",
    "RngState",
    "SparseCode",
    "SparseCodeSet",
    "StepResult",
    "TrainTrace",
    "assemble_patches",
    "code_sum",
    "ecmod_plus_step",
    "ecmod_step",
    "evaluate_dictionary",
    "extract_patches",
    "frobenius_mse",
    "kernel_backend",
    "least_squares_dictionary",
    "load_mat1",
    "load_pgm",
    "mod_step",
    "normalize_columns",
    "omp_encode",
    "omp_encode_batch",
    "overcomplete_dct",
    "planted_problem",
    "pseudo_inverse",
    "psnr",
    "random_dictionary",
    "reconstruct",
    "replace_degenerate_atoms",
    "save_mat1",
    "save_pgm",
    "seeded_uniform_matrix",
    "support_stats",
    "train",
]
