"""``bgshrink`` command-line tool.

Every subcommand writes a CSV table (to ``--csv`` or stdout) whose first line
is a ``#`` comment naming the schema and its version. ``--svg`` additionally
renders a chart of the same data.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys

import numpy as np

from . import experiments as ex
from .estimation import LambdaSchedule, estimate_bands
from .dictionary import band_layout, make_dictionary
from .pgm import PGMError, read_pgm, write_pgm

SCHEMA_VERSION = 1

HEADERS = {
    "synth": "relative MSE = mean squared estimation error / (n * sigma^2) per trial",
    "denoise": "per-band estimated parameters, conditional risks and squared errors",
    "bounds": "worst-case excess-to-oracle risk ratios and explicit bounds",
    "curve": "single-atom shrinkage functions psi(beta)",
    "estimate-params": "band-wise maximum-likelihood parameter estimates",
    "validate": "closed forms vs full support enumeration, relative errors",
}


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".12g")
    return str(v)


def render_csv(command: str, columns, rows) -> str:
    buf = io.StringIO()
    buf.write(f"# bgshrink {command} schema v{SCHEMA_VERSION}: {HEADERS[command]}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def emit(args, command: str, columns, rows) -> None:
    text = render_csv(command, columns, rows)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def parse_grid(text: str) -> tuple:
    """``lo:hi:steps`` to an evenly spaced tuple."""
    try:
        lo, hi, steps = text.split(":")
        lo, hi, steps = float(lo), float(hi), int(steps)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi:steps, got {text!r}") from None
    if steps < 1 or (steps > 1 and hi < lo):
        raise argparse.ArgumentTypeError(f"bad grid {text!r}")
    return tuple(float(v) for v in np.linspace(lo, hi, steps))


def _sigmas(args, default):
    if args.sigma_grid is not None:
        return args.sigma_grid
    if args.sigma:
        return tuple(args.sigma)
    return default


def _add_sigma_flags(p, multi: bool = True):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--sigma", type=float, nargs="+" if multi else None,
                   help="noise standard deviation(s)")
    g.add_argument("--sigma-grid", type=parse_grid, metavar="LO:HI:STEPS")


def _add_output_flags(p):
    p.add_argument("--csv", help="CSV output path (default: stdout)")
    p.add_argument("--svg", help="also write an SVG chart here")


def cmd_synth(args) -> int:
    size, trials = tuple(args.size), args.trials
    if args.full_scale:
        size, trials = (128, 128), 1000
    methods = tuple(m for m in ex.ESTIMATOR_ORDER if m in (args.method or ex.ESTIMATOR_ORDER))
    config = ex.ExperimentConfig(size=size, levels=args.levels, p=args.p, sigma_x=args.sigma_x,
                                 sigmas=_sigmas(args, ex.ExperimentConfig.sigmas),
                                 trials=trials, seed=args.seed, estimators=methods)
    rows = ex.run_synthetic(config)
    emit(args, "synth", ex.synthetic_columns(methods), rows)
    if args.svg:
        from .plotting import plot_synthetic
        plot_synthetic(rows, methods, args.svg)
    return 0


def _load_image(args):
    clean = read_pgm(args.input)
    if args.add_noise:
        return ex.add_noise(clean, args.sigma, args.seed), clean
    reference = read_pgm(args.reference) if args.reference else None
    return clean, reference


def cmd_denoise(args) -> int:
    noisy, reference = _load_image(args)
    result = ex.denoise_image(noisy, args.sigma, args.method, args.levels, args.lambda0,
                              reference)
    if args.out:
        write_pgm(args.out, result.output)
    emit(args, "denoise", ex.DENOISE_COLUMNS, result.band_rows)
    if result.psnr_output is not None:
        print(f"psnr_noisy={result.psnr_input:.4f} psnr_{args.method}={result.psnr_output:.4f}",
              file=sys.stderr)
    if args.svg:
        from .plotting import plot_bands
        names = [r[0] for r in result.band_rows]
        plot_bands(names, {"MAP risk": [r[5] for r in result.band_rows],
                           "MMSE risk": [r[6] for r in result.band_rows]},
                   args.svg, "conditional risk per band")
    return 0


def cmd_estimate(args) -> int:
    noisy, _ = _load_image(args)
    D = make_dictionary("db5-2d", shape=noisy.shape, levels=args.levels)
    layout = band_layout(D)
    estimates = estimate_bands(D.analyze(noisy), layout, args.sigma,
                               LambdaSchedule.default(layout, args.lambda0))
    rows = ex.estimate_rows(estimates)
    emit(args, "estimate-params", ex.ESTIMATE_COLUMNS, rows)
    if args.svg:
        from .plotting import plot_bands
        plot_bands([r[0] for r in rows], {"p_hat": [r[3] for r in rows]}, args.svg,
                   "estimated support probability")
    return 0


def cmd_bounds(args) -> int:
    rows = ex.bounds_rows(ex.bounds_grid(args.g_min, args.g_max, args.steps))
    emit(args, "bounds", ex.BOUNDS_COLUMNS, rows)
    if args.svg:
        from .plotting import plot_bounds
        plot_bounds(rows, args.svg)
    return 0


def cmd_curve(args) -> int:
    methods = [m for m in ("map", "mmse") if m in (args.method or ("map", "mmse"))]
    if not methods:
        raise ValueError("curve supports methods map and mmse")
    betas = np.linspace(-args.beta_max, args.beta_max, args.points)
    rows = ex.shrinkage_dump(methods, args.p, args.sigma_x, _sigmas(args, (0.1, 0.5, 1.0)), betas)
    emit(args, "curve", ex.CURVE_COLUMNS, rows)
    if args.svg:
        from .plotting import plot_curves
        plot_curves(rows, args.svg)
    return 0


def cmd_validate(args) -> int:
    rows = ex.validate(args.seed, args.m, args.trials)
    emit(args, "validate", ex.VALIDATE_COLUMNS, rows)
    failed = [r[0] for r in rows if not r[-1]]
    print(f"validate: {len(rows) - len(failed)}/{len(rows)} trials passed "
          f"(tolerance {ex.VALIDATE_TOL:g})", file=sys.stderr)
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bgshrink", description="Bernoulli-Gaussian MAP/MMSE shrinkage experiments and tools.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="synthetic denoising experiment")
    p.add_argument("--size", type=int, nargs=2, metavar=("R", "C"), default=[64, 64])
    p.add_argument("--levels", type=int, default=3)
    p.add_argument("--p", type=float, default=0.1)
    p.add_argument("--sigma-x", type=float, default=1.0)
    _add_sigma_flags(p)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--method", action="append", choices=ex.ESTIMATOR_ORDER,
                   help="estimator to include (repeatable; default all)")
    p.add_argument("--full-scale", action="store_true",
                   help="128x128 signals and 1000 trials")
    _add_output_flags(p)
    p.set_defaults(func=cmd_synth)

    for name, func, helptext in (("denoise", cmd_denoise, "denoise a PGM image"),
                                 ("estimate-params", cmd_estimate, "per-band parameter estimates")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--in", dest="input", required=True, help="input P5 PGM")
        p.add_argument("--sigma", type=float, required=True, help="noise standard deviation")
        p.add_argument("--levels", type=int, default=3)
        p.add_argument("--lambda0", type=float, default=2.0)
        p.add_argument("--add-noise", action="store_true",
                       help="treat the input as clean and add noise first (uses --seed)")
        p.add_argument("--reference", help="clean PGM for PSNR and per-band errors")
        p.add_argument("--seed", type=int, default=0)
        if name == "denoise":
            p.add_argument("--method", choices=("map", "mmse"), default="mmse")
            p.add_argument("--out", help="output P5 PGM")
        _add_output_flags(p)
        p.set_defaults(func=func)

    p = sub.add_parser("bounds", help="worst-case ratio table over a log-spaced G grid")
    p.add_argument("--g-min", type=float, default=1e-4)
    p.add_argument("--g-max", type=float, default=10.0)
    p.add_argument("--steps", type=int, default=121)
    _add_output_flags(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("curve", help="tabulate the shrinkage functions")
    p.add_argument("--p", type=float, default=0.1)
    p.add_argument("--sigma-x", type=float, default=1.0)
    _add_sigma_flags(p)
    p.add_argument("--method", action="append", choices=("map", "mmse"))
    p.add_argument("--beta-max", type=float, default=4.0)
    p.add_argument("--points", type=int, default=401)
    _add_output_flags(p)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("validate", help="certify closed forms against enumeration")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--m", type=int, default=8)
    p.add_argument("--trials", type=int, default=100)
    _add_output_flags(p)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, PGMError, OSError) as err:
        print(f"bgshrink {args.command}: error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
