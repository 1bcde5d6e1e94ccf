"""Command-line front end.

Subcommands compose the library into file-based pipelines:

    extract   image -> patch matrix (MAT1)
    learn     image -> trained dictionaries, traces, evaluations, summary
    encode    dictionary + samples -> dense codes matrix (MAT1)
    evaluate  dictionary + samples -> per-sparsity PSNR table (CSV)
    mosaic    dictionary -> atom tile sheet (PGM)

All outputs are deterministic byte-for-byte for a fixed invocation; the
elapsed-seconds trace column is opt-in via --timings.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dictionaries import Dictionary, overcomplete_dct, random_dictionary
from .learners import ALGORITHMS, LearnConfig, evaluate_dictionary, train
from .linalg import RngState
from .matio import load_mat1, save_mat1
from .omp import DEFAULT_TOL, omp_encode_batch
from .patches import GrayImage, extract_patches, load_pgm, save_pgm

__all__ = ["ExperimentSpec", "export_dictionary_mosaic", "main", "parse_args", "run_experiment"]


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything one `learn` invocation needs."""

    image: Path
    patch_side: int
    stride: int
    n_atoms: int
    algos: tuple[str, ...]
    k: int
    m: int | None
    iters: int
    init: str
    seeds: tuple[int, ...]
    omp_tol: float
    stop_delta: float
    test_k: tuple[int, ...]
    out_dir: Path
    timings: bool = False

    def __post_init__(self):
        for algo in self.algos:
            LearnConfig(
                algo=algo,
                k=self.k,
                m=self.m,
                max_iters=self.iters,
                omp_tol=self.omp_tol,
                stop_delta=self.stop_delta,
                init=self.init,
            )
        if self.patch_side < 1 or self.stride < 1:
            raise ValueError("patch size and stride must be positive")
        if self.n_atoms < self.patch_side**2:
            raise ValueError("need at least patch_side^2 atoms")
        if self.init == "random" and not self.seeds:
            raise ValueError("--init random requires --seeds")
        if not self.test_k:
            raise ValueError("--test-k must be nonempty")


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t != "")
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated integer list, got {text!r}")


def _algo_list(text: str) -> tuple[str, ...]:
    algos = tuple(t for t in text.split(",") if t != "")
    for a in algos:
        if a not in ALGORITHMS:
            raise argparse.ArgumentTypeError(f"unknown algorithm {a!r}, pick from {ALGORITHMS}")
    if not algos:
        raise argparse.ArgumentTypeError("need at least one algorithm")
    return algos


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ecdl", description="Dictionary learning experiments with error-coded updates"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    learn = sub.add_parser("learn", help="train dictionaries on image patches")
    learn.add_argument("--image", required=True, type=Path, help="input PGM (P5) image")
    learn.add_argument("--patch-size", required=True, type=int, help="square patch side")
    learn.add_argument("--stride", type=int, default=None, help="patch step (default: patch size)")
    learn.add_argument("--atoms", required=True, type=int, help="number of dictionary atoms")
    learn.add_argument("--algo", required=True, type=_algo_list, help="mod|ecmod|ecmodplus (comma list trains several)")
    learn.add_argument("--k", required=True, type=int, help="sparsity budget per code")
    learn.add_argument("--m", type=int, default=None, help="reduced first-stage budget (ecmod*)")
    learn.add_argument("--iters", type=int, default=40, help="iteration cap")
    learn.add_argument("--init", choices=["dct", "random"], default="dct")
    learn.add_argument("--seeds", type=_int_list, default=(), help="comma list; one run per seed")
    learn.add_argument("--omp-tol", type=float, default=DEFAULT_TOL, help="relative residual stop")
    learn.add_argument("--stop-delta", type=float, default=1e-6, help="relative MSE improvement stop")
    learn.add_argument("--test-k", type=_int_list, default=(2, 5, 10, 20), help="evaluation sparsities")
    learn.add_argument("--out", required=True, type=Path, help="output directory")
    learn.add_argument("--timings", action="store_true", help="add elapsed-seconds column to traces")

    extract = sub.add_parser("extract", help="extract patches into a MAT1 matrix")
    extract.add_argument("--image", required=True, type=Path)
    extract.add_argument("--patch-size", required=True, type=int)
    extract.add_argument("--stride", type=int, default=None)
    extract.add_argument("--out", required=True, type=Path, help="output MAT1 file")

    encode = sub.add_parser("encode", help="sparse-code samples against a dictionary")
    encode.add_argument("--dict", required=True, type=Path, dest="dict_path", help="dictionary MAT1")
    encode.add_argument("--input", required=True, type=Path, help="samples MAT1 (columns)")
    encode.add_argument("--k", required=True, type=int)
    encode.add_argument("--omp-tol", type=float, default=DEFAULT_TOL)
    encode.add_argument("--out", required=True, type=Path, help="output MAT1 codes matrix")

    evaluate = sub.add_parser("evaluate", help="PSNR/MSE of a dictionary at several sparsities")
    evaluate.add_argument("--dict", required=True, type=Path, dest="dict_path")
    evaluate.add_argument("--input", required=True, type=Path, help="samples MAT1 (columns)")
    evaluate.add_argument("--test-k", type=_int_list, default=(2, 5, 10, 20))
    evaluate.add_argument("--omp-tol", type=float, default=DEFAULT_TOL)
    evaluate.add_argument("--out", required=True, type=Path, help="output CSV")

    mosaic = sub.add_parser("mosaic", help="render dictionary atoms as a PGM tile sheet")
    mosaic.add_argument("--dict", required=True, type=Path, dest="dict_path")
    mosaic.add_argument("--out", required=True, type=Path, help="output PGM")
    return parser


def parse_args(argv) -> argparse.Namespace:
    args = _build_parser().parse_args(argv)
    if args.command == "learn":
        args.spec = _spec_from_args(args)
    return args


def _spec_from_args(args) -> ExperimentSpec:
    return ExperimentSpec(
        image=args.image,
        patch_side=args.patch_size,
        stride=args.stride if args.stride is not None else args.patch_size,
        n_atoms=args.atoms,
        algos=args.algo,
        k=args.k,
        m=args.m,
        iters=args.iters,
        init=args.init,
        seeds=args.seeds,
        omp_tol=args.omp_tol,
        stop_delta=args.stop_delta,
        test_k=args.test_k,
        out_dir=args.out,
        timings=args.timings,
    )


def export_dictionary_mosaic(D: Dictionary, path) -> None:
    """Tile atoms into a grid image, one side x side tile per atom in column
    order, each min-max scaled to 0..255 (flat atoms map to mid-gray 128),
    with 1-pixel black separators."""
    side = math.isqrt(D.n_dims)
    if side * side != D.n_dims:
        raise ValueError(f"atoms of dimension {D.n_dims} are not square patches")
    grid_w = math.isqrt(D.n_atoms)
    if grid_w * grid_w != D.n_atoms:
        grid_w = math.isqrt(D.n_atoms) + 1
    grid_h = -(-D.n_atoms // grid_w)
    cell = side + 1
    canvas = np.zeros((grid_h * cell + 1, grid_w * cell + 1), dtype=np.uint8)
    for j in range(D.n_atoms):
        tile = D.atoms[:, j].reshape(side, side)
        lo, hi = tile.min(), tile.max()
        if hi > lo:
            scaled = np.floor((tile - lo) / (hi - lo) * 255.0 + 0.5)
        else:
            scaled = np.full((side, side), 128.0)
        r = (j // grid_w) * cell + 1
        c = (j % grid_w) * cell + 1
        canvas[r : r + side, c : c + side] = np.clip(scaled, 0, 255).astype(np.uint8)
    save_pgm(GrayImage(canvas), path)


def _write_eval_csv(path, records) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("k_test,psnr_db,mse\n")
        for r in records:
            fh.write(f"{r.k_test},{r.psnr_db!r},{r.mse!r}\n")


def _load_dictionary(path) -> Dictionary:
    atoms = load_mat1(path)
    try:
        return Dictionary(atoms, init_mode="loaded")
    except ValueError as exc:
        raise ValueError(f"{path}: not a valid dictionary ({exc})") from exc


def run_experiment(spec: ExperimentSpec) -> int:
    """Train every (algo, seed) pair and emit traces, dictionaries,
    evaluations, and the cross-seed summary. Returns the exit status."""
    img = load_pgm(spec.image)
    P = extract_patches(img, spec.patch_side, spec.stride)
    spec.out_dir.mkdir(parents=True, exist_ok=True)

    runs = [(seed, str(seed)) for seed in spec.seeds] if spec.init == "random" else [(spec.seeds[0] if spec.seeds else 0, "dct")]
    summary_rows = []
    for algo in spec.algos:
        finals = []
        for seed, tag in runs:
            if spec.init == "random":
                D0 = random_dictionary(spec.patch_side**2, spec.n_atoms, RngState(seed))
            else:
                D0 = overcomplete_dct(spec.patch_side, spec.n_atoms)
            config = LearnConfig(
                algo=algo,
                k=spec.k,
                m=spec.m,
                max_iters=spec.iters,
                omp_tol=spec.omp_tol,
                stop_delta=spec.stop_delta,
                seed=seed,
                init=spec.init,
            )
            D, trace = train(config, P.data, D0)
            trace.write_csv(spec.out_dir / f"trace_{algo}_{tag}.csv", timings=spec.timings)
            save_mat1(spec.out_dir / f"dict_{algo}_{tag}.mat1", D.atoms)
            _write_eval_csv(
                spec.out_dir / f"eval_{algo}_{tag}.csv",
                evaluate_dictionary(D, P.data, spec.test_k, spec.omp_tol),
            )
            finals.append(trace.final.psnr_db)
        summary_rows.append(
            (algo, len(finals), min(finals), sum(finals) / len(finals), max(finals))
        )
    with open(spec.out_dir / "summary.csv", "w", newline="") as fh:
        fh.write("algo,n_runs,final_psnr_min_db,final_psnr_mean_db,final_psnr_max_db\n")
        for algo, n, lo, mean, hi in summary_rows:
            fh.write(f"{algo},{n},{lo!r},{mean!r},{hi!r}\n")
    return 0


def main(argv=None) -> int:
    try:
        args = parse_args(argv if argv is not None else sys.argv[1:])
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "learn":
            return run_experiment(args.spec)
        if args.command == "extract":
            img = load_pgm(args.image)
            stride = args.stride if args.stride is not None else args.patch_size
            save_mat1(args.out, extract_patches(img, args.patch_size, stride).data)
            return 0
        if args.command == "encode":
            D = _load_dictionary(args.dict_path)
            Y = load_mat1(args.input)
            codes = omp_encode_batch(D, Y, args.k, args.omp_tol)
            save_mat1(args.out, codes.to_dense())
            return 0
        if args.command == "evaluate":
            D = _load_dictionary(args.dict_path)
            Y = load_mat1(args.input)
            _write_eval_csv(args.out, evaluate_dictionary(D, Y, args.test_k, args.omp_tol))
            return 0
        if args.command == "mosaic":
            export_dictionary_mosaic(_load_dictionary(args.dict_path), args.out)
            return 0
        raise ValueError(f"unhandled command {args.command!r}")  # pragma: no cover
    except Exception as exc:
        print(f"ecdl: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
