# ========================
# src/compressive/cli.py
# ========================

"""
Command-Line Interface

Subcommands tie the toolkit modules to the on-disk formats:

    gen-matrix    write a CSMX sensing matrix
    gen-signal    write a sparse or print-task signal (CSV or PGM)
    acquire       y = Phi x (+ noise) for a CSV or PGM signal
    reconstruct   attack a measurement with OMP, ISTA, min-norm or best-of
    classify      smashed-filter label of a measurement, or dataset accuracy
    hash          perceptual hash of one image, or distance between two
    regress-mask  raw vs masked least squares
    tradeoff      utility/leakage sweep from a flat config file

Results go to stdout or ``--out``; logs go to stderr. Exit codes:
0 success, 1 runtime error, 2 usage error.
"""

import argparse
import dataclasses
import logging
import sys
from math import isqrt
from typing import List, Optional

from . import __version__
from .datasets import PrintTask, gen_sparse, gen_texture
from .exceptions import CompressiveError, InvalidParameterError
from .experiment import ExperimentConfig
from .harness import min_components, run_tradeoff, summarize
from .ingestion import (
    load_dataset_csv,
    load_matrix,
    load_pgm,
    load_regression_csv,
    load_signal,
    load_templates_csv,
    load_vector_csv,
)
from .masked_regression import masked_ols, ols, relative_coefficient_error
from .perceptual_hash import GrayImage, HashKind, hamming, hash_image, is_duplicate
from .reconstruction import evaluate_reconstruction, ista, min_norm_attack, omp, run_attack
from .sensing import Ensemble, Measurement, Signal, acquire_noisy, generate_matrix
from .smashed import build_templates, classify, evaluate_accuracy
from .storage import format_vector_csv, matrix_to_bytes, pgm_bytes, to_json, write_bytes, write_text
from ..utils.config import Config
from ..utils.logging_setup import setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_RUNTIME_ERROR = 1
EXIT_USAGE_ERROR = 2


def _emit_text(text: str, out: Optional[str]) -> None:
    if out:
        write_text(text, out)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _emit_bytes(payload: bytes, out: Optional[str]) -> None:
    if out:
        write_bytes(payload, out)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.buffer.flush()


def _read_measurement(path: str, matrix) -> Measurement:
    return Measurement(values=load_vector_csv(path), matrix_id=matrix.matrix_id)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_gen_matrix(args: argparse.Namespace) -> int:
    matrix = generate_matrix(args.seed, args.m, args.n, args.ensemble)
    _emit_bytes(matrix_to_bytes(matrix, header_only=args.header_only), args.out)
    return EXIT_OK


def cmd_gen_signal(args: argparse.Namespace) -> int:
    if args.kind == "sparse":
        signal = gen_sparse(args.n, args.k, args.amplitude, args.seed)
    elif args.kind == "texture":
        side = isqrt(args.n) if args.n > 0 else 0
        if side < 1 or side * side != args.n:
            raise InvalidParameterError(f"Texture needs a perfect-square n, got {args.n}")
        signal = GrayImage(gen_texture(side, side, args.seed)).to_signal()
    else:
        task = PrintTask(args.n, args.defect_size, args.defect_amplitude, args.seed)
        row = 0 if args.kind == "print-ok" else 1
        signal = Signal(values=task.templates.templates[row], shape=(task.side, task.side))

    if args.out and args.out.lower().endswith(".pgm"):
        if signal.shape is None:
            raise InvalidParameterError("Only image signals can be written as PGM")
        _emit_bytes(pgm_bytes(GrayImage.from_signal(signal)), args.out)
    else:
        _emit_text(format_vector_csv(signal.values), args.out)
    return EXIT_OK


def cmd_acquire(args: argparse.Namespace) -> int:
    matrix = load_matrix(args.matrix)
    signal = load_signal(args.in_path)
    y = acquire_noisy(matrix, signal, args.sigma, args.seed)
    _emit_text(format_vector_csv(y.values), args.out)
    return EXIT_OK


def cmd_reconstruct(args: argparse.Namespace) -> int:
    matrix = load_matrix(args.matrix)
    y = _read_measurement(args.in_path, matrix)
    truth = Signal(values=load_vector_csv(args.truth)) if args.truth else None

    if args.method == "best":
        if truth is None:
            raise InvalidParameterError("Method 'best' selects by ground truth and needs --truth")
        outcome = run_attack(matrix, y, truth, kind="best", omp_k=args.k,
                             max_iters=args.max_iters, tol=args.tol, peak=args.peak)
        method, estimate, metrics = outcome.method, outcome.estimate, outcome.metrics
    else:
        if args.method == "omp":
            k = args.k if args.k is not None else max(1, matrix.m // 2)
            estimate = omp(matrix, y, k)
        elif args.method == "ista":
            estimate = ista(matrix, y, args.lam, args.max_iters, args.tol)
        else:
            estimate = min_norm_attack(matrix, y)
        method = args.method
        metrics = evaluate_reconstruction(truth, estimate, args.peak) if truth is not None else None

    if metrics is None:
        _emit_text(format_vector_csv(estimate.values), args.out)
        return EXIT_OK

    if args.out:
        write_text(format_vector_csv(estimate.values), args.out)
    document = {"method": method, "iterations": estimate.iterations,
                "residual_norm": estimate.residual_norm, **metrics.to_dict()}
    sys.stdout.write(to_json(document))
    return EXIT_OK


def cmd_classify(args: argparse.Namespace) -> int:
    matrix = load_matrix(args.matrix)
    if args.dataset:
        dataset = load_dataset_csv(args.dataset)
        templates = load_templates_csv(args.templates) if args.templates else build_templates(dataset)
        accuracy = evaluate_accuracy(dataset, matrix, templates, args.sigma, args.trials, args.seed, args.workers)
        document = {"accuracy": accuracy, "samples": len(dataset), "trials": args.trials, "sigma": args.sigma}
        _emit_text(to_json(document), args.out)
        return EXIT_OK

    if not args.templates:
        raise InvalidParameterError("Classifying a single measurement needs --templates")
    result = classify(_read_measurement(args.in_path, matrix), matrix, load_templates_csv(args.templates))
    _emit_text(to_json(result.to_dict()), args.out)
    return EXIT_OK


def cmd_hash(args: argparse.Namespace) -> int:
    hashes = [hash_image(load_pgm(path), args.kind) for path in args.images]
    lines = [str(h) for h in hashes]
    if len(hashes) == 2:
        lines.append(f"hamming={hamming(hashes[0], hashes[1])}")
        if args.threshold is not None:
            lines.append(f"duplicate={'true' if is_duplicate(hashes[0], hashes[1], args.threshold) else 'false'}")
    elif args.threshold is not None:
        raise InvalidParameterError("--threshold needs two images")
    _emit_text("".join(f"{line}\n" for line in lines), args.out)
    return EXIT_OK


def cmd_regress_mask(args: argparse.Namespace) -> int:
    problem = load_regression_csv(args.data)
    m = args.m if args.m is not None else problem.N
    mask = generate_matrix(args.seed, m, problem.N, args.ensemble)
    raw = ols(problem)
    masked = masked_ols(problem, mask)
    document = {
        "raw": raw.to_dict(),
        "masked": masked.to_dict(),
        "ensemble": mask.ensemble.value,
        "seed": args.seed,
        "relative_coefficient_error": relative_coefficient_error(masked.beta, raw.beta),
    }
    _emit_text(to_json(document), args.out)
    return EXIT_OK


def cmd_tradeoff(args: argparse.Namespace) -> int:
    config = ExperimentConfig.from_file(args.config)
    if args.seed is not None:
        config = dataclasses.replace(config, master_seed=args.seed)
    report = run_tradeoff(config, workers=args.workers)
    _emit_text(report.to_json(), args.out)
    if args.csv:
        write_text(report.to_csv(), args.csv)
    for line in summarize(report):
        logger.info(line)
    if args.target is not None:
        best = min_components(report, args.target)
        sys.stderr.write(f"min_components(target={args.target}) = {best if best is not None else 'none'}\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser(runtime: Optional[Config] = None) -> argparse.ArgumentParser:
    """
    Build the argument parser.

    Args:
        runtime (Config): Runtime defaults (ensemble, workers, log level)

    Returns:
        argparse.ArgumentParser: Parser with one subcommand per operation
    """
    runtime = runtime or Config()
    ensembles = [e.value for e in Ensemble]

    parser = argparse.ArgumentParser(
        prog="compressive",
        description="Compressive analysis toolkit: analyse compressed measurements and measure what they leak.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=runtime.LOG_LEVEL,
                        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
                        type=str.upper, help="Console log level (default: %(default)s)")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("gen-matrix", help="Write a CSMX sensing matrix")
    p.add_argument("--m", type=int, required=True, help="Number of measurements (rows)")
    p.add_argument("--n", type=int, required=True, help="Signal dimension (columns)")
    p.add_argument("--ensemble", choices=ensembles, default=runtime.DEFAULT_ENSEMBLE)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--header-only", action="store_true", help="Store the seed only; readers regenerate entries")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_gen_matrix)

    p = sub.add_parser("gen-signal", help="Write a synthetic signal as CSV or PGM")
    p.add_argument("--kind", choices=["sparse", "texture", "print-ok", "print-defect"], default="sparse")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=5, help="Nonzeros of a sparse signal")
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--defect-size", type=int, default=24)
    p.add_argument("--defect-amplitude", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="Output path; a .pgm suffix writes an image")
    p.set_defaults(handler=cmd_gen_signal)

    p = sub.add_parser("acquire", help="Compute y = Phi x + e")
    p.add_argument("--matrix", required=True)
    p.add_argument("--in", dest="in_path", required=True, help="CSV vector or PGM image")
    p.add_argument("--sigma", type=float, default=0.0, help="Measurement noise standard deviation")
    p.add_argument("--seed", type=int, default=0, help="Noise seed")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_acquire)

    p = sub.add_parser("reconstruct", help="Attack a measurement knowing the matrix")
    p.add_argument("--matrix", required=True)
    p.add_argument("--in", dest="in_path", required=True, help="Measurement CSV vector")
    p.add_argument("--method", choices=["omp", "ista", "min-norm", "best"], default="omp")
    p.add_argument("--k", type=int, help="OMP sparsity (default m/2)")
    p.add_argument("--lam", type=float, default=0.1, help="ISTA regularization weight")
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--truth", help="Ground-truth CSV vector; prints leakage metrics")
    p.add_argument("--peak", type=float, help="Peak signal value for PSNR")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_reconstruct)

    p = sub.add_parser("classify", help="Smashed-filter classification in measurement space")
    p.add_argument("--matrix", required=True)
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--in", dest="in_path", help="Measurement CSV vector")
    source.add_argument("--dataset", help="Labeled dataset CSV; reports Monte-Carlo accuracy")
    p.add_argument("--templates", help="Templates CSV (default: class means of --dataset)")
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=runtime.WORKERS)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_classify)

    p = sub.add_parser("hash", help="Perceptual hash of PGM images")
    p.add_argument("images", nargs="+", metavar="IMAGE")
    p.add_argument("--kind", choices=[k.value for k in HashKind], default="dhash")
    p.add_argument("--threshold", type=int, help="Duplicate threshold in bits (two images)")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_hash)

    p = sub.add_parser("regress-mask", help="Compare raw OLS with OLS on masked data")
    p.add_argument("--data", required=True, help="Regression CSV, response in the last column")
    p.add_argument("--m", type=int, help="Mask rows (default N)")
    p.add_argument("--ensemble", choices=ensembles, default=Ensemble.ORTHONORMAL.value)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_regress_mask)

    p = sub.add_parser("tradeoff", help="Utility vs leakage sweep")
    p.add_argument("--config", required=True, help="Flat key = value experiment file")
    p.add_argument("--seed", type=int, help="Override master_seed")
    p.add_argument("--workers", type=int, help="Thread count (default: config value)")
    p.add_argument("--csv", help="Also write the report as CSV")
    p.add_argument("--target", type=float, help="Report the smallest m reaching this accuracy")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_tradeoff)

    return parser


def cli_main(argv: Optional[List[str]] = None) -> int:
    """
    Run the command line.

    Args:
        argv (list[str]): Arguments without the program name (default: sys.argv[1:])

    Returns:
        int: Process exit code
    """
    runtime = Config()
    invalid = [name for name, ok in runtime.validate_config().items() if not ok]
    if invalid:
        sys.stderr.write(f"error: invalid COMPRESSIVE_* settings: {', '.join(invalid)}\n")
        return EXIT_USAGE_ERROR
    parser = build_parser(runtime)
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE_ERROR

    setup_logging(log_level=args.log_level, log_file=runtime.LOG_FILE, log_dir=runtime.LOG_DIR)
    logger.debug(f"Running '{args.command}'")
    try:
        return args.handler(args)
    except (CompressiveError, ValueError, OSError) as e:
        logger.debug("Command failed", exc_info=True)
        sys.stderr.write(f"error: {e}\n")
        return EXIT_RUNTIME_ERROR
