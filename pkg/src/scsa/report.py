"""JSON analysis reports and plot-ready tables.

Report schema (``"schema": "scsa-report/1"``)::

    {
      "schema": "scsa-report/1",
      "input": {"path": str|null, "M": int, "x0": float, "dx": float,
                "y_max": float, "baseline_shifted": bool},
      "scheme": "fd2" | "sine",
      "chi": float,
      "n_chi": int,
      "kappas": [float, ...],                  # decreasing
      "kappas_squared_over_chi": [float, ...], # each <= y_max
      "momentums": [M1, M2, M3],               # M_p = sum kappa**p
      "relative_l2_error": float|null,         # null encodes +inf
      "max_abs_error": float,
      "negativity_threshold": float,
      "solver": {"residual_max": float, "warnings": [str, ...]},
      "reconstruction_csv": str|null,          # relative to the report file
      "target": {...}                          # only from target-n
    }
"""

from __future__ import annotations

import json
import math
import os
from typing import Optional

import numpy as np

from .core import ScsaResult, check_levels
from .errors import PropositionViolation, ReportError
from .signal import Signal, format_csv

SCHEMA = "scsa-report/1"

_REQUIRED = {
    "input": dict, "chi": (int, float), "n_chi": int, "kappas": list,
    "kappas_squared_over_chi": list, "momentums": list,
    "max_abs_error": (int, float), "solver": dict,
}


def _finite_or_none(v: float) -> Optional[float]:
    return float(v) if math.isfinite(v) else None


def build_report(signal: Signal, result: ScsaResult, *, path=None, scheme="fd2",
                 baseline_shifted=False, reconstruction_csv=None) -> dict:
    spec = result.spectrum
    return {
        "schema": SCHEMA,
        "input": {
            "path": None if path is None else os.fspath(path),
            "M": signal.M,
            "x0": signal.x0,
            "dx": signal.dx,
            "y_max": signal.y_max(),
            "baseline_shifted": bool(baseline_shifted),
        },
        "scheme": str(getattr(scheme, "value", scheme)),
        "chi": result.chi,
        "n_chi": result.n_chi,
        "kappas": [float(k) for k in result.kappas],
        "kappas_squared_over_chi": [float(v) for v in spec.levels],
        "momentums": [float(m) for m in result.momentums],
        "relative_l2_error": _finite_or_none(result.relative_l2_error),
        "max_abs_error": float(result.max_abs_error),
        "negativity_threshold": spec.negativity_threshold,
        "solver": {
            "residual_max": float(spec.residuals.max()) if spec.n_chi else 0.0,
            "warnings": list(spec.warnings),
        },
        "reconstruction_csv": reconstruction_csv,
    }


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, allow_nan=False) + "\n"


def check_report(report: dict) -> dict:
    """Validate structure and re-check kappa^2/chi <= y_max."""
    if not isinstance(report, dict) or report.get("schema") != SCHEMA:
        raise ReportError(f"not a {SCHEMA} document")
    for key, kind in _REQUIRED.items():
        if key not in report or not isinstance(report[key], kind):
            raise ReportError(f"report field {key!r} missing or of wrong type")
    y_max = report["input"].get("y_max")
    if not isinstance(y_max, (int, float)):
        raise ReportError("report input.y_max missing")
    kappas = report["kappas"]
    levels = report["kappas_squared_over_chi"]
    if len(kappas) != report["n_chi"] or len(levels) != report["n_chi"]:
        raise ReportError("n_chi disagrees with the length of kappas")
    try:
        check_levels(levels, float(y_max))
    except PropositionViolation as exc:
        raise ReportError(f"report violates kappa^2/chi <= y_max: {exc}") from None
    return report


def load_report(path) -> dict:
    try:
        with open(path) as fh:
            report = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ReportError(f"{path}: invalid JSON ({exc})") from None
    return check_report(report)


# --------------------------------------------------------------------------
# plot tables

def overlay_table(signal: Signal, y_chi: Signal) -> str:
    """CSV with columns x, y, y_chi."""
    return format_csv([("x", signal.x), ("y", signal.samples), ("y_chi", y_chi.samples)])


def levels_table(signal: Signal, levels) -> str:
    """CSV of the potential well ``-y(x)`` followed by one row per level.

    Columns ``kind,n,x,value``: ``well`` rows carry ``x`` and ``-y``;
    ``level`` rows carry the eigenvalue index and ``-kappa_n^2/chi`` with
    an empty ``x``.
    """
    lines = ["kind,n,x,value"]
    for xi, yi in zip(signal.x, signal.samples):
        lines.append(f"well,,{float(xi)!r},{float(-yi)!r}")
    for n, lev in enumerate(np.asarray(levels, dtype=np.float64), start=1):
        lines.append(f"level,{n},,{float(-lev)!r}")
    return "\n".join(lines) + "\n"
