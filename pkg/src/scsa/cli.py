"""Command-line front end.

Exit codes: 0 success, 2 input or validation error, 3 solver failure,
4 internal-consistency alarm (kappa^2/chi > y_max), 5 target eigenvalue
count unreachable.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import report as rpt
from . import svg
from .core import Sweep, TargetN, analyze, select_chi
from .errors import (
    ConvergenceFailure,
    HypothesisViolation,
    PropositionViolation,
    ReportError,
    ScsaError,
    TargetUnreachable,
)
from .operator import Scheme
from .signal import (
    DEFAULT_DECAY_THRESHOLD,
    Signal,
    baseline_shift,
    format_csv,
    read_csv,
    validate,
)
from .solver import SolverConfig

log = logging.getLogger("scsa")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SOLVER = 3
EXIT_PROPOSITION = 4
EXIT_UNREACHABLE = 5


class UsageError(ScsaError, ValueError):
    pass


# --------------------------------------------------------------------------
# helpers

def _load_signal(args) -> Signal:
    if not args.input:
        raise UsageError("--input is required")
    s = read_csv(args.input, dx=args.dx, x0=args.x0)
    if args.baseline_shift:
        s = baseline_shift(s)
    report = validate(s, args.decay_threshold)
    if not report.ok:
        raise HypothesisViolation(
            f"{args.input}: signal fails " + "; ".join(report.failures())
            + ("" if args.baseline_shift or report.nonnegative
               else " (use --baseline-shift to remove a negative baseline)")
        )
    return s


def _config(args) -> SolverConfig:
    return SolverConfig(negativity_threshold=args.negativity_threshold)


def _write(text: str, path) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _recon_path(args) -> Path:
    if args.recon:
        return Path(args.recon)
    if args.out and args.out != "-":
        out = Path(args.out)
        return out.with_name(out.stem + ".reconstruction.csv")
    src = Path(args.input)
    return src.with_name(src.stem + ".reconstruction.csv")


def _emit_report(args, s: Signal, result, extra=None) -> None:
    recon = _recon_path(args)
    recon.write_text(format_csv([("x", s.x), ("y_chi", result.reconstruction.samples)]))
    if args.out and args.out != "-":
        out = Path(args.out)
        recon_ref = os.path.relpath(recon, out.parent or Path("."))
    else:
        recon_ref = str(recon.resolve())
    report = rpt.build_report(
        s, result, path=os.path.abspath(args.input), scheme=args.scheme,
        baseline_shifted=args.baseline_shift, reconstruction_csv=recon_ref,
    )
    if extra:
        report.update(extra)
    _write(rpt.dumps(report), args.out)


# --------------------------------------------------------------------------
# commands

def cmd_analyze(args) -> int:
    s = _load_signal(args)
    if args.chi is None:
        raise UsageError("--chi is required")
    result = analyze(s, args.chi, _config(args), args.scheme)
    _emit_report(args, s, result)
    return EXIT_OK


def cmd_sweep(args) -> int:
    s = _load_signal(args)
    if args.steps < 2 or not 0 < args.chi_min < args.chi_max:
        raise UsageError("sweep needs 0 < --chi-min < --chi-max and --steps >= 2")
    sel = select_chi(s, Sweep.geometric(args.chi_min, args.chi_max, args.steps),
                     _config(args), args.scheme)
    rows = ["chi,n_chi,relative_l2_error,M1,M2,M3"]
    for r in sel.results:
        m = ",".join(repr(float(v)) for v in r.momentums)
        rows.append(f"{r.chi!r},{r.n_chi},{r.relative_l2_error!r},{m}")
    _write("\n".join(rows) + "\n", args.out)
    return EXIT_OK


def cmd_target_n(args) -> int:
    s = _load_signal(args)
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    policy = TargetN(args.n, args.chi_min, args.chi_max, max_iters=args.max_iters)
    try:
        sel = select_chi(s, policy, _config(args), args.scheme)
    except TargetUnreachable as exc:
        lo, n_lo, hi, n_hi = exc.bracket
        print(f"target unreachable: {exc}", file=sys.stderr)
        print(f"best bracket: chi in [{lo!r}, {hi!r}] with N_chi in [{n_lo}, {n_hi}]",
              file=sys.stderr)
        return EXIT_UNREACHABLE
    print(f"chosen chi = {sel.chi!r} (N_chi = {sel.result.n_chi})", file=sys.stderr)
    target = {
        "n": args.n, "chi_min": args.chi_min, "chi_max": args.chi_max,
        "exact": sel.exact,
        "trace": [[row.chi, row.n_chi] for row in sel.trace],
    }
    _emit_report(args, s, sel.result, {"target": target})
    return EXIT_OK


def _plot_inputs(args):
    """(signal, y_chi, levels, default output stem) from a report or inline flags."""
    if args.report:
        report = rpt.load_report(args.report)
        base = Path(args.report).parent
        src = report["input"].get("path")
        recon_ref = report.get("reconstruction_csv")
        if not src or not recon_ref:
            raise ReportError("report lacks input path or reconstruction_csv")
        s = read_csv(src, dx=report["input"].get("dx"), x0=report["input"].get("x0", 0.0))
        if report["input"].get("baseline_shifted"):
            s = baseline_shift(s)
        recon_path = Path(recon_ref)
        if not recon_path.is_absolute():
            recon_path = base / recon_path
        y_chi = read_csv(recon_path)
        if not s.same_grid(y_chi):
            raise ReportError("reconstruction grid does not match the input signal")
        return s, y_chi, report["kappas_squared_over_chi"], Path(args.report).with_suffix("")
    s = _load_signal(args)
    if args.chi is None:
        raise UsageError("plotdata needs --report or --input with --chi")
    result = analyze(s, args.chi, _config(args), args.scheme)
    return s, result.reconstruction, list(result.levels), Path(args.input).with_suffix("")


def cmd_plotdata(args) -> int:
    s, y_chi, levels, stem = _plot_inputs(args)
    prefix = Path(args.out) if args.out else stem
    overlay = prefix.with_name(prefix.name + "_overlay.csv")
    wells = prefix.with_name(prefix.name + "_levels.csv")
    overlay.write_text(rpt.overlay_table(s, y_chi))
    wells.write_text(rpt.levels_table(s, levels))
    if args.svg:
        Path(args.svg).write_text(svg.render(s.x, s.samples, y_chi.samples, levels))
    print(f"wrote {overlay} and {wells}", file=sys.stderr)
    return EXIT_OK


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="CSV with x,y columns (or y only, with --dx)")
    common.add_argument("--dx", type=float, help="grid spacing for single-column input")
    common.add_argument("--x0", type=float, default=0.0,
                        help="first abscissa for single-column input")
    common.add_argument("--baseline-shift", action="store_true",
                        help="subtract the minimum sample before analysis")
    common.add_argument("--decay-threshold", type=float, default=DEFAULT_DECAY_THRESHOLD)
    common.add_argument("--negativity-threshold", type=float, default=None,
                        help="keep eigenvalues below minus this (default 1e-10*2/dx^2)")
    common.add_argument("--scheme", choices=[s.value for s in Scheme], default="fd2",
                        help="kinetic discretization (default: fd2)")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--recon", help="reconstruction CSV path")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="scsa", description="Semi-classical signal analysis of pulse-shaped signals.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="analyze one value of chi")
    p.add_argument("--chi", type=float)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sweep", parents=[common], help="geometric sweep over chi")
    p.add_argument("--chi-min", type=float, required=True)
    p.add_argument("--chi-max", type=float, required=True)
    p.add_argument("--steps", type=int, default=8)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("target-n", parents=[common],
                       help="smallest chi giving a target number of eigenvalues")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--chi-min", type=float, default=1e-2)
    p.add_argument("--chi-max", type=float, default=1e5)
    p.add_argument("--max-iters", type=int, default=100)
    p.set_defaults(func=cmd_target_n)

    p = sub.add_parser("plotdata", parents=[common],
                       help="overlay and potential-well tables (optionally SVG)")
    p.add_argument("--report", help="report written by analyze or target-n")
    p.add_argument("--chi", type=float)
    p.add_argument("--svg", help="also render both plots to this SVG file")
    p.set_defaults(func=cmd_plotdata)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except PropositionViolation as exc:
        print(f"internal consistency alarm: {exc}", file=sys.stderr)
        return EXIT_PROPOSITION
    except (ConvergenceFailure, np.linalg.LinAlgError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except TargetUnreachable as exc:
        print(f"target unreachable: {exc}", file=sys.stderr)
        return EXIT_UNREACHABLE
    except (ScsaError, ValueError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception:
        log.exception("unexpected failure")
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
