"""Command-line experiment harness.

Each subcommand reproduces one family of experiments as a CSV file with a
header row and full round-trip float formatting, deterministic for a given
seed.  Relative output paths resolve against $INTERPCOMP_OUT_DIR when set.

Subcommands: convergence, lambda-sweep, noise, rate, analyze, image.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from typing import List, Optional, Sequence

import numpy as np

from . import analysis as ana
from .imagebench import (
    EnlargeConfig,
    GrayImage,
    decimate,
    enlarge,
    psnr_benchmark,
    read_pgm,
    write_pgm,
)
from .samplers import InterpKind, sample, sample_lattice
from .signal_core import (
    ConfigurationError,
    GridSpec,
    UsageError,
    add_awgn,
    add_awgn2d,
    gen_bandlimited,
    gen_bandlimited2d,
)
from .solver import ChebyshevAccel, ReconConfig, ReconOperator, ReconOperator2D, iterate, iterate2d

DEFAULT_TRIALS = 50
DEFAULT_POWER_DB = 34.0
OUT_DIR_ENV = "INTERPCOMP_OUT_DIR"


def _fmt(value) -> str:
    """Round-trip formatting; infinities spelled 'inf'."""
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    return str(value)


def _resolve_out(path: str) -> str:
    base = os.environ.get(OUT_DIR_ENV)
    if base and not os.path.isabs(path):
        os.makedirs(base, exist_ok=True)
        return os.path.join(base, path)
    return path


def _write_csv(path: str, header: Sequence[str], rows) -> str:
    path = _resolve_out(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    return path


def _kind(name: str) -> InterpKind:
    try:
        return InterpKind(name)
    except ValueError:
        raise UsageError(f"--kind must be 'sh' or 'li', got {name!r}")


def _int_list(text: str) -> List[int]:
    return [int(tok) for tok in text.split(",") if tok]


def _float_list(text: str) -> List[float]:
    return [float(tok) for tok in text.split(",") if tok]


def _grid_pair(args, k_rate: int):
    gy = GridSpec(args.n_coarse_2d, args.ticks_2d, k_rate)
    return gy, gy


def _mean_traces(args, kind, modules, relax, k_rate, noise_db=None, accel=None):
    """Mean initial SNR and mean per-iteration SNR trace over the trial set."""
    inits, traces = [], []
    for t in range(args.trials):
        seed = args.seed + t
        if args.dims == 1:
            grid = GridSpec(args.n_coarse, args.ticks, k_rate)
            x = gen_bandlimited(seed, grid, DEFAULT_POWER_DB)
            observed = add_awgn(x, noise_db, seed + 10_000_019) if noise_db is not None else x
            op = ReconOperator(grid, kind, modules)
            rep = iterate(
                sample(observed),
                ReconConfig(op, relax=relax, iterations=args.iterations, acceleration=accel),
                reference=x,
            )
        else:
            gy, gx = _grid_pair(args, k_rate)
            img = gen_bandlimited2d(seed, gy, gx, DEFAULT_POWER_DB)
            observed = add_awgn2d(img, noise_db, seed + 10_000_019) if noise_db is not None else img
            op = ReconOperator2D(gy, gx, kind, modules)
            rep = iterate2d(
                sample_lattice(observed),
                ReconConfig(op, relax=relax, iterations=args.iterations, acceleration=accel),
                reference=img,
            )
        inits.append(rep.snr_initial_db)
        traces.append(rep.snr_trace_db)
    mean_init = None if inits[0] is None else float(np.mean(inits))
    return mean_init, np.mean(np.asarray(traces), axis=0)


def cmd_convergence(args) -> int:
    kind = _kind(args.kind)
    rows = []
    for modules in args.modules:
        _, trace = _mean_traces(args, kind, modules, args.relax, args.k_rate)
        for it, snr in enumerate(trace, start=1):
            rows.append(
                (kind.value, modules, args.relax, args.k_rate, it, float(snr), args.trials, args.seed)
            )
    path = _write_csv(
        args.out,
        ["method", "modules", "lambda", "k_rate", "iteration", "mean_snr_db", "trials", "seed"],
        rows,
    )
    print(path)
    return 0


def cmd_lambda_sweep(args) -> int:
    kind = _kind(args.kind)
    rows = []
    for lam in args.lambda_grid:
        if not 0.0 < lam < 2.0:
            raise UsageError(f"lambda grid values must lie in (0, 2), got {lam}")
        init, trace = _mean_traces(args, kind, args.modules_single, lam, args.k_rate)
        rows.append((lam, (float(trace[-1]) - init) / args.iterations))
    path = _write_csv(args.out, ["lambda", "avg_db_per_iteration"], rows)
    print(path)
    return 0


def cmd_noise(args) -> int:
    kind = _kind(args.kind)
    rows = []
    for modules in args.modules:
        _, trace = _mean_traces(
            args, kind, modules, args.relax, args.k_rate, noise_db=args.noise_power_db
        )
        for it, snr in enumerate(trace, start=1):
            rows.append(
                (
                    kind.value, modules, args.relax, args.k_rate, it,
                    float(snr), args.trials, args.seed, args.noise_power_db,
                )
            )
    path = _write_csv(
        args.out,
        [
            "method", "modules", "lambda", "k_rate", "iteration",
            "mean_snr_db", "trials", "seed", "noise_power_db",
        ],
        rows,
    )
    print(path)
    return 0


def cmd_rate(args) -> int:
    kind = _kind(args.kind)
    per_rate = []
    for k in args.k_rates:
        init, trace = _mean_traces(args, kind, args.modules_single, args.relax, k)
        per_rate.append((k, init, trace, (float(trace[-1]) - init) / args.iterations))
    base_gain = per_rate[0][3]
    rows = []
    for k, init, trace, gain in per_rate:
        for it, snr in enumerate(trace, start=1):
            rows.append((k, it, float(snr), gain, gain - base_gain))
    path = _write_csv(
        args.out,
        ["k_rate", "iteration", "mean_snr_db", "avg_db_per_iter", "gain_diff_vs_first"],
        rows,
    )
    print(path)
    return 0


def cmd_analyze(args) -> int:
    kind = _kind(args.kind)
    r = ana.contraction_factor(kind, args.modules_single, args.relax, args.k_rate)
    minimax = ana.lambda_opt_minimax(kind, args.modules_single, args.k_rate)
    db = ana.predicted_gain_db(r) if 0.0 < r < 1.0 else math.nan
    noise = ana.noise_tolerance_coeff(kind, args.modules_single, args.relax, iteration_k=2)
    adds, mults = ana.op_counts(
        args.iterations, args.fft_block, args.modules_single == 1
    )
    pairs = [
        ("kind", kind.value),
        ("modules", args.modules_single),
        ("lambda", args.relax),
        ("k_rate", args.k_rate),
        ("contraction_factor", r),
        ("lambda_opt_minimax", minimax),
        ("predicted_db_per_iteration", db),
        ("noise_coeff", noise.coeff if noise.coeff is not None else "n/a"),
        ("adds_per_sample", adds),
        ("mults_per_sample", mults),
    ]
    if args.modules_single == 1:
        opt = ana.lambda_opt_paper(kind, 1)
        pairs.insert(6, ("lambda_opt_recomputed", opt.recomputed))
        pairs.insert(7, ("lambda_opt_paper_printed", opt.paper_printed))
    if args.csv:
        writer = csv.writer(sys.stdout)
        writer.writerow(["parameter", "value"])
        for key, val in pairs:
            writer.writerow([key, _fmt(val) if isinstance(val, float) else val])
    else:
        width = max(len(k) for k, _ in pairs)
        for key, val in pairs:
            print(f"{key:<{width}}  {_fmt(val) if isinstance(val, float) else val}")
    return 0


def _parse_method(token: str) -> EnlargeConfig:
    """bilinear | iterative:ITERS | hybrid:ITERS:MODULES"""
    parts = token.split(":")
    name = parts[0]
    if name == "bilinear":
        return EnlargeConfig(method="bilinear")
    if name == "iterative":
        iters = int(parts[1]) if len(parts) > 1 else 2
        return EnlargeConfig(method="iterative", iterations=iters)
    if name == "hybrid":
        iters = int(parts[1]) if len(parts) > 1 else 2
        modules = int(parts[2]) if len(parts) > 2 else 1
        return EnlargeConfig(method="hybrid", iterations=iters, modules=modules)
    raise UsageError(f"unknown method {token!r}; use bilinear, iterative:N, hybrid:N:M")


def cmd_image(args) -> int:
    original = read_pgm(args.image)
    methods = [
        EnlargeConfig(
            factor=args.factor,
            method=cfg.method,
            iterations=cfg.iterations,
            modules=cfg.modules,
            relax=args.relax,
            acceleration=ChebyshevAccel(args.frame_a, args.frame_b) if args.accelerate else None,
        )
        for cfg in (_parse_method(tok) for tok in args.methods.split(","))
    ]
    out_dir = _resolve_out(args.out_dir)
    os.makedirs(out_dir, exist_ok=True)
    low = decimate(original, args.factor)
    write_pgm(low, os.path.join(out_dir, "decimated.pgm"))
    rows = []
    for cfg, psnr in psnr_benchmark(original, methods):
        recon = enlarge(low, cfg)
        tag = cfg.label.replace("(", "_").replace(")", "").replace(",", "_")
        write_pgm(recon, os.path.join(out_dir, f"recon_{tag}.pgm"))
        err = np.abs(
            recon.pixels.astype(np.float64) - original.pixels.astype(np.float64)
        )
        peak = err.max()
        scaled = np.zeros_like(err) if peak == 0 else err * (255.0 / peak)
        write_pgm(
            GrayImage(np.rint(scaled).astype(np.uint8)),
            os.path.join(out_dir, f"err_{tag}.pgm"),
        )
        rows.append((cfg.label, cfg.factor, cfg.iterations, cfg.modules, cfg.relax, psnr))
    path = _write_csv(
        os.path.join(out_dir, "psnr.csv"),
        ["method", "factor", "iters", "modules", "lambda", "psnr_db"],
        rows,
    )
    print(path)
    return 0


def _add_common(p: argparse.ArgumentParser, *, trials=True):
    p.add_argument("--kind", default="sh", choices=["sh", "li"], help="interpolator")
    p.add_argument("--lambda", dest="relax", type=float, default=1.0, help="relaxation parameter")
    p.add_argument("--k-rate", type=int, default=1, help="sampling rate multiple of Nyquist")
    p.add_argument("--iterations", type=int, default=10)
    if trials:
        p.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dims", type=int, default=1, choices=[1, 2], help="1-D signals or 2-D fields")
    p.add_argument("--n-coarse", type=int, default=128, help="coarse samples (1-D)")
    p.add_argument("--ticks", type=int, default=16, help="fine ticks per sampling interval (1-D)")
    p.add_argument("--n-coarse-2d", type=int, default=32, help="lattice samples per axis (2-D)")
    p.add_argument("--ticks-2d", type=int, default=8, help="fine ticks per interval (2-D)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="interpcomp",
        description="Interpolation-distortion compensation experiments (CSV output)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convergence", help="mean SNR vs iteration for a list of module counts")
    _add_common(p)
    p.add_argument("--modules", type=_int_list, default=[0, 1, 2], help="comma list, e.g. 0,1,2")
    p.add_argument("--out", default="convergence.csv")
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("lambda-sweep", help="average dB/iteration over a relaxation grid")
    _add_common(p)
    p.add_argument("--modules", dest="modules_single", type=int, default=1)
    p.add_argument(
        "--lambda-grid",
        dest="lambda_grid",
        type=_float_list,
        default=[round(0.05 * i, 2) for i in range(2, 40)],
        help="comma list of relaxation values in (0,2)",
    )
    p.add_argument("--out", default="lambda_sweep.csv")
    p.set_defaults(func=cmd_lambda_sweep)

    p = sub.add_parser("noise", help="convergence traces with AWGN added to the input signal")
    _add_common(p)
    p.add_argument("--modules", type=_int_list, default=[0, 1, 2, 4])
    p.add_argument("--noise-power-db", type=float, default=-20.0)
    p.add_argument("--out", default="noise.csv")
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("rate", help="traces at several sampling-rate multiples")
    _add_common(p)
    p.add_argument("--modules", dest="modules_single", type=int, default=1)
    p.add_argument("--k-rates", type=_int_list, default=[1, 2])
    p.add_argument("--out", default="rate.csv")
    p.set_defaults(func=cmd_rate)

    p = sub.add_parser("analyze", help="closed-form constants for one configuration")
    _add_common(p, trials=False)
    p.add_argument("--modules", dest="modules_single", type=int, default=1)
    p.add_argument("--fft-block", type=int, default=2048)
    p.add_argument("--csv", action="store_true", help="emit CSV instead of aligned text")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("image", help="decimate + enlarge a PGM and report PSNR per method")
    p.add_argument("image", help="input PGM (P2 or P5, maxval 255)")
    p.add_argument("--factor", type=int, default=2)
    p.add_argument(
        "--methods",
        default="bilinear,iterative:2,iterative:10,hybrid:2:1",
        help="comma list: bilinear | iterative:N | hybrid:N:M",
    )
    p.add_argument("--lambda", dest="relax", type=float, default=1.0)
    p.add_argument("--accelerate", action="store_true", help="Chebyshev-accelerate the iteration")
    p.add_argument("--frame-a", type=float, default=1.0)
    p.add_argument("--frame-b", type=float, default=2.0)
    p.add_argument("--out-dir", default="image_bench")
    p.set_defaults(func=cmd_image)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, UsageError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
