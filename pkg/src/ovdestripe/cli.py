"""Command-line front end: ``ovdestripe {orient,destripe,simulate,evaluate}``.

Every numeric option can also come from a flat ``key = value`` config file
passed with ``--config``; a flag given on the command line wins over the
file, which wins over the built-in default.  Keys are the long option names
with dashes replaced by underscores (``lambda1``, ``eps_stop``, ``gf_radius``).

Exit codes: 0 success, 1 I/O or usage error, 2 orientation undeterminable,
3 solver diagnostic.
"""
from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
from pathlib import Path

import numpy as np

from .guided_filter import GuidedFilterParams, background_eliminate
from .image import InvalidImageError, normalize
from .imageio import read_image, write_image
from .metrics import NOISE_FREE, STRIPED, SampleWindows, icv, mae, mrd, psnr, ssim
from .orientation import (
    DEFAULT_RADIUS, OrientationUndeterminable, enumerate_candidates, estimate_orientation,
    select_candidate,
)
from .simulator import (
    BUILTIN_BASES, StripeSpec, add_gaussian_noise, builtin_base, random_angles,
    simulate_group, write_metadata,
)
from .solver import SolverDiagnosticError, SolverParams, destripe, write_trace_csv

log = logging.getLogger("ovdestripe")

EXIT_OK, EXIT_USAGE, EXIT_ORIENTATION, EXIT_SOLVER = 0, 1, 2, 3

#: CSV columns written by ``evaluate --csv``.
EVAL_COLUMNS = ("metric", "window", "value", "flagged")


class UsageError(Exception):
    """Bad flags, bad config keys or unreadable inputs (exit code 1)."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors, which would collide with
    # the "orientation undeterminable" code
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# --------------------------------------------------------------------------
# config handling
# --------------------------------------------------------------------------

def read_config(path) -> dict[str, str]:
    """Parse a flat ``key = value`` file (``#`` starts a comment)."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    out = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise UsageError(f"{path}:{n}: expected 'key = value'")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


# option name -> (type, default, help); shared by several subcommands
_GF_OPTS = {
    "gf_radius": (int, GuidedFilterParams.radius, "guided filter window radius"),
    "gf_eps": (float, GuidedFilterParams.eps, "guided filter regularization"),
    "gf_t": (float, GuidedFilterParams.t, "background-elimination gain"),
    "r": (int, DEFAULT_RADIUS, "candidate template radius"),
}
_SOLVER_OPTS = {
    "lambda1": (float, SolverParams.lambda1, "weight of the oriented variation of the stripes"),
    "lambda2": (float, SolverParams.lambda2, "weight of the stripe sparsity term"),
    "rho1": (float, SolverParams.rho1, "penalty of the gradient split"),
    "rho2": (float, SolverParams.rho2, "penalty of the oriented split"),
    "rho3": (float, SolverParams.rho3, "penalty of the sparsity split"),
    "eps_stop": (float, SolverParams.eps_stop, "relative-change stopping threshold"),
    "n_max": (int, SolverParams.n_max, "iteration cap"),
    "theta": (float, None, "stripe angle in degrees; skips orientation estimation"),
}
_SIM_OPTS = {
    "kind": (str, StripeSpec.kind, "periodic or random"),
    "axis": (str, StripeSpec.orientation_axis, "stripe axis before rotation"),
    "amplitude": (float, StripeSpec.amplitude, "stripe amplitude"),
    "period": (int, StripeSpec.period, "period in pixels (periodic stripes)"),
    "coverage": (float, StripeSpec.coverage, "fraction of striped lines (random stripes)"),
    "seed": (int, StripeSpec.seed, "stripe seed"),
    "angles": (str, None, "comma-separated rotation angles in degrees"),
    "n_angles": (int, 10, "number of random angles when --angles is absent"),
    "angle_seed": (int, 0, "seed of the random angles"),
    "angle_low": (float, 0.0, "lower bound of random angles"),
    "angle_high": (float, 45.0, "upper bound of random angles"),
    "size": (int, None, "center-crop size (defaults to the builtin's size)"),
    "noise_sigma": (float, 0.0, "extra Gaussian noise level"),
    "noise_seed": (int, 0, "Gaussian noise seed"),
    "format": (str, "obds", "output format: obds, pgm or png"),
}


def _add_opts(parser, opts):
    for key, (typ, default, text) in opts.items():
        shown = "" if default is None else f" (default {default})"
        # defaults stay None so we can tell "not given" from "given"
        parser.add_argument("--" + key.replace("_", "-"), dest=key, type=typ, default=None,
                            help=text + shown)


def _resolve(args, opts):
    """Fill unset options from the config file, then from the defaults."""
    config = read_config(args.config) if args.config else {}
    unknown = sorted(set(config) - set(opts))
    if unknown:
        raise UsageError(f"unknown config key(s) for '{args.command}': {', '.join(unknown)}")
    for key, (typ, default, _) in opts.items():
        if getattr(args, key) is not None:
            continue
        if key in config:
            try:
                setattr(args, key, typ(config[key]))
            except ValueError as exc:
                raise UsageError(f"config key {key}: {exc}") from exc
        else:
            setattr(args, key, default)
    return args


def _gf(args) -> GuidedFilterParams:
    return GuidedFilterParams(args.gf_radius, args.gf_eps, args.gf_t)


def _load(path):
    try:
        return read_image(path)
    except (OSError, InvalidImageError) as exc:
        raise UsageError(str(exc)) from exc


def _fmt(x: float, digits: int) -> str:
    return "inf" if math.isinf(x) else f"{x:.{digits}f}"


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_orient(args) -> int:
    y = _load(args.input)
    gf = _gf(args)
    res = estimate_orientation(y, gf, args.r)
    print(f"theta_stripe={res.theta_stripe_deg:.2f}")
    print(f"theta_hat={res.chosen.theta_deg:.2f}")
    print(f"offset=({res.chosen.a},{res.chosen.b})")
    print(f"dominant_frequency=({res.dominant_freq[0]},{res.dominant_freq[1]})")
    if args.spectrum:
        mag = np.log1p(np.abs(np.fft.fftshift(np.fft.fft2(background_eliminate(y, gf)))))
        write_image(args.spectrum, normalize(mag))
    return EXIT_OK


def _default_output(path, suffix, ext=None) -> str:
    p = Path(path)
    return str(p.with_name(p.stem + suffix + (ext or p.suffix)))


def cmd_destripe(args) -> int:
    y = _load(args.input)
    if args.theta is None:
        direction = estimate_orientation(y, _gf(args), args.r).chosen
    else:
        direction = select_candidate(args.theta, enumerate_candidates(args.r))
    log.info("stripe direction %s", direction)
    params = SolverParams(direction, args.lambda1, args.lambda2, args.rho1, args.rho2,
                          args.rho3, args.eps_stop, args.n_max)
    result = destripe(y, params)

    out = args.output or _default_output(args.input, "_clean")
    stripes = args.stripes or _default_output(args.input, "_stripes")
    trace = args.trace or _default_output(args.input, "_trace", ".csv")
    write_image(out, result.X if out.endswith(".obds") else np.clip(result.X, 0.0, 1.0))
    # stripes are signed: integer formats store (S + 1) / 2
    write_image(stripes, result.S if stripes.endswith(".obds") else (result.S + 1.0) / 2.0)
    write_trace_csv(trace, result.trace)

    last = result.trace[-1].rel_change if result.trace else float("nan")
    print(f"direction={direction}")
    print(f"iterations={result.iterations}")
    print(f"final_rel_change={last:.3e}")
    print(f"converged={'yes' if result.converged else 'no'}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.format not in ("obds", "pgm", "png"):
        raise UsageError(f"unknown format {args.format!r}")
    if args.base in BUILTIN_BASES:
        base, size = builtin_base(args.base)
        size = args.size or size
    else:
        base, size = _load(args.base), args.size
    spec = StripeSpec(args.kind, args.axis, args.amplitude, args.period, args.coverage, args.seed)
    if args.angles:
        try:
            angles = [float(a) for a in args.angles.split(",")]
        except ValueError as exc:
            raise UsageError(f"bad --angles: {exc}") from exc
    else:
        angles = random_angles(args.n_angles, args.angle_seed, args.angle_low, args.angle_high)

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    cases = simulate_group(base, spec, angles, size)
    for n, case in enumerate(cases):
        degraded = case.degraded
        if args.noise_sigma > 0:
            degraded = add_gaussian_noise(degraded, args.noise_sigma, args.noise_seed + n)
        stem = f"case{n:02d}"
        write_image(outdir / f"{stem}_degraded.{args.format}", degraded)
        write_image(outdir / f"{stem}_truth.{args.format}", case.truth)
        meta = {"base": args.base, **case.metadata,
                "noise_sigma": args.noise_sigma, "noise_seed": args.noise_seed + n}
        write_metadata(outdir / f"{stem}.txt", meta)
        print(f"{stem} angle={case.angle_deg:.2f} shape={degraded.shape[0]}x{degraded.shape[1]}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    if not args.truth and not args.windows:
        raise UsageError("evaluate needs --truth (full reference) and/or --windows "
                         "(non-reference); see 'ovdestripe evaluate -h'")
    result = _load(args.result)
    rows = []
    if args.truth:
        truth = _load(args.truth)
        if truth.shape != result.shape:
            raise UsageError(f"shape mismatch: result {result.shape} vs truth {truth.shape}")
        values = {"mae_e2": 100.0 * mae(result, truth), "psnr": psnr(result, truth),
                  "ssim": ssim(result, truth)}
        print("MAE(E-2) PSNR SSIM")
        print(f"{values['mae_e2']:.2f} {_fmt(values['psnr'], 2)} {values['ssim']:.4f}")
        rows += [(k, "", repr(v), "") for k, v in values.items()]
    if args.windows:
        try:
            windows = SampleWindows.load(args.windows)
        except (OSError, ValueError) as exc:
            raise UsageError(f"{args.windows}: {exc}") from exc
        striped, clean = windows.tagged(STRIPED), windows.tagged(NOISE_FREE)
        if striped:
            res = icv(result, striped)
            for n, (v, flag) in enumerate(zip(res.values, res.flagged)):
                print(f"ICV[{n}]={v:.2f}" + (" (constant window)" if flag else ""))
                rows.append(("icv", str(n), repr(v), str(int(flag))))
        if clean:
            if not args.noisy:
                raise UsageError("MRD over noise-free windows needs --noisy")
            noisy = _load(args.noisy)
            res = mrd(noisy, result, clean)
            print(f"MRD={res.value:.2f}%" + (f" ({res.excluded} zero pixels excluded)"
                                             if res.excluded else ""))
            rows.append(("mrd", "", repr(res.value), str(res.excluded)))
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(EVAL_COLUMNS)
            writer.writerows(rows)
    return EXIT_OK


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------

_COMMANDS = {
    "orient": (cmd_orient, _GF_OPTS),
    "destripe": (cmd_destripe, {**_GF_OPTS, **_SOLVER_OPTS}),
    "simulate": (cmd_simulate, _SIM_OPTS),
    "evaluate": (cmd_evaluate, {}),
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ovdestripe", description="Oblique stripe removal toolkit.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("orient", help="estimate the stripe orientation")
    p.add_argument("input")
    p.add_argument("--spectrum", help="also write the log-magnitude spectrum image")
    _add_opts(p, _GF_OPTS)

    p = sub.add_parser("destripe", help="separate clean image and stripes")
    p.add_argument("input")
    p.add_argument("-o", "--output", help="clean image path (default <input>_clean.<ext>)")
    p.add_argument("--stripes", help="stripe image path (default <input>_stripes.<ext>)")
    p.add_argument("--trace", help="iteration trace CSV (default <input>_trace.csv)")
    _add_opts(p, {**_GF_OPTS, **_SOLVER_OPTS})

    p = sub.add_parser("simulate", help="generate ground-truthed oblique stripe images")
    p.add_argument("base", help=f"builtin base ({', '.join(BUILTIN_BASES)}) or image path")
    p.add_argument("--outdir", required=True)
    _add_opts(p, _SIM_OPTS)

    p = sub.add_parser("evaluate", help="quality indices of a destriped image")
    p.add_argument("result")
    p.add_argument("--truth", help="clean reference (MAE, PSNR, SSIM)")
    p.add_argument("--windows", help="sample-window file (ICV, MRD)")
    p.add_argument("--noisy", help="degraded input, required for MRD")
    p.add_argument("--csv", help="also write the metrics as CSV")

    for p in sub.choices.values():
        p.add_argument("--config", help="flat 'key = value' file of option defaults")
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(message)s")
        func, opts = _COMMANDS[args.command]
        return func(_resolve(args, opts))
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OrientationUndeterminable as exc:
        print(f"orientation undeterminable: {exc}", file=sys.stderr)
        return EXIT_ORIENTATION
    except SolverDiagnosticError as exc:
        print(f"solver diagnostic: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (OSError, ValueError) as exc:
        # invalid parameter values or unwritable outputs
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
