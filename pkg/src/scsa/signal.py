"""Uniformly sampled nonnegative signals and their CSV representation."""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import (
    GridMismatch,
    NonFiniteSample,
    NonPositiveSpacing,
    NonUniformGrid,
    SignalError,
    TooFewSamples,
)

DEFAULT_DECAY_THRESHOLD = 0.01
GRID_RTOL = 1e-6


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Signal:
    """Samples ``y(x0 + i*dx)``, ``i = 0..M-1``.

    The sample array is copied on construction and marked read-only, so a
    Signal can be shared freely between threads.
    """

    x0: float
    dx: float
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "x0", float(self.x0))
        object.__setattr__(self, "dx", float(self.dx))
        object.__setattr__(self, "samples", _frozen(self.samples))

    def __len__(self):
        return self.samples.size

    @property
    def M(self) -> int:
        return self.samples.size

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.M)

    def y_max(self) -> float:
        return float(self.samples.max())

    def with_samples(self, samples) -> "Signal":
        """Same grid, new values."""
        return Signal(self.x0, self.dx, samples)

    def same_grid(self, other: "Signal") -> bool:
        return (
            self.M == other.M
            and np.isclose(self.dx, other.dx, rtol=GRID_RTOL, atol=0.0)
            and abs(self.x0 - other.x0) <= GRID_RTOL * self.dx
        )


@dataclass(frozen=True)
class ValidationReport:
    nonnegative: bool
    min_value: float
    decay_ok: bool
    decay_threshold: float

    @property
    def ok(self) -> bool:
        return self.nonnegative and self.decay_ok

    def failures(self) -> list:
        """Human-readable names of the failed hypotheses."""
        out = []
        if not self.nonnegative:
            out.append(f"nonnegativity (min sample {self.min_value!r} < 0)")
        if not self.decay_ok:
            out.append(
                "endpoint decay (an endpoint sample exceeds "
                f"{self.decay_threshold:g} * y_max)"
            )
        return out


def from_samples(x0: float, dx: float, values: Iterable[float]) -> Signal:
    """Build a Signal, checking grid spacing, length and finiteness."""
    dx = float(dx)
    if not np.isfinite(dx) or dx <= 0:
        raise NonPositiveSpacing(f"grid spacing must be finite and > 0, got {dx!r}")
    if not np.isfinite(x0):
        raise NonFiniteSample(f"x0 must be finite, got {x0!r}")
    arr = np.array(list(values) if not isinstance(values, np.ndarray) else values,
                   dtype=np.float64)
    if arr.ndim != 1:
        raise SignalError("samples must be one-dimensional")
    if arr.size < 3:
        raise TooFewSamples(f"need at least 3 samples, got {arr.size}")
    bad = np.flatnonzero(~np.isfinite(arr))
    if bad.size:
        raise NonFiniteSample(f"sample {bad[0]} is not finite ({arr[bad[0]]!r})")
    return Signal(x0, dx, arr)


def validate(s: Signal, decay_threshold: float = DEFAULT_DECAY_THRESHOLD) -> ValidationReport:
    """Check nonnegativity and endpoint decay; failures are reported, not raised."""
    if not 0 < decay_threshold < 1:
        raise ValueError("decay_threshold must lie in (0, 1)")
    y = s.samples
    min_value = float(y.min())
    y_max = float(y.max())
    if y_max > 0:
        limit = decay_threshold * y_max
        decay_ok = bool(y[0] <= limit and y[-1] <= limit)
    else:
        # all-zero (or all-negative) signal: nothing to decay from
        decay_ok = True
    return ValidationReport(
        nonnegative=min_value >= 0,
        min_value=min_value,
        decay_ok=decay_ok,
        decay_threshold=float(decay_threshold),
    )


def baseline_shift(s: Signal) -> Signal:
    """Subtract the global minimum so the smallest sample is exactly zero."""
    return s.with_samples(s.samples - s.samples.min())


# --------------------------------------------------------------------------
# CSV I/O

def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def _data_rows(lines: Iterable[str]) -> list:
    rows = []
    for row in csv.reader(line for line in lines
                          if line.strip() and not line.lstrip().startswith("#")):
        row = [c.strip() for c in row if c.strip() != ""]
        if row:
            rows.append(row)
    return rows


def parse_csv(text: str, dx: Optional[float] = None, x0: float = 0.0) -> Signal:
    """Parse ``x,y`` (or single-column ``y``) CSV text into a Signal.

    A header row is detected by a non-numeric first row. Lines starting
    with ``#`` are comments. Two-column input must be uniformly spaced to
    relative tolerance 1e-6; single-column input needs ``dx``.
    """
    rows = _data_rows(io.StringIO(text))
    if rows and not all(_is_number(c) for c in rows[0]):
        rows = rows[1:]
    if not rows:
        raise TooFewSamples("no data rows in CSV input")
    ncols = {len(r) for r in rows}
    if len(ncols) != 1:
        raise SignalError("inconsistent number of columns in CSV input")
    ncol = ncols.pop()
    try:
        data = np.array([[float(c) for c in r] for r in rows], dtype=np.float64)
    except ValueError as exc:
        raise SignalError(f"non-numeric value in CSV data: {exc}") from None

    if ncol == 1:
        if dx is None:
            raise NonPositiveSpacing("single-column CSV requires an explicit dx")
        return from_samples(x0, dx, data[:, 0])
    if ncol != 2:
        raise SignalError(f"expected 1 or 2 columns, got {ncol}")

    x, y = data[:, 0], data[:, 1]
    if x.size < 3:
        raise TooFewSamples(f"need at least 3 samples, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise NonFiniteSample("x column contains non-finite values")
    step = (x[-1] - x[0]) / (x.size - 1)
    if not step > 0:
        raise NonPositiveSpacing("x column must be strictly increasing")
    dev = np.abs(np.diff(x) - step)
    if dev.max() > GRID_RTOL * step:
        i = int(dev.argmax())
        raise NonUniformGrid(
            f"x spacing at row {i} deviates from dx={step!r} by more than "
            f"relative {GRID_RTOL:g}"
        )
    if dx is not None and abs(dx - step) > GRID_RTOL * step:
        raise NonUniformGrid(f"given dx={dx!r} disagrees with x column spacing {step!r}")
    return from_samples(x[0], step, y)


def read_csv(path, dx: Optional[float] = None, x0: float = 0.0) -> Signal:
    with open(path, newline="") as fh:
        return parse_csv(fh.read(), dx=dx, x0=x0)


def format_csv(columns: Sequence[tuple]) -> str:
    """Render named numeric columns as CSV with round-trip (repr) precision."""
    names = [name for name, _ in columns]
    arrays = [np.asarray(values, dtype=np.float64) for _, values in columns]
    n = arrays[0].size
    if any(a.size != n for a in arrays):
        raise GridMismatch("columns have different lengths")
    buf = io.StringIO()
    buf.write(",".join(names) + "\n")
    for i in range(n):
        buf.write(",".join(repr(float(a[i])) for a in arrays) + "\n")
    return buf.getvalue()


def write_csv(path, s: Signal, name: str = "y") -> None:
    text = format_csv([("x", s.x), (name, s.samples)])
    with open(os.fspath(path), "w", newline="") as fh:
        fh.write(text)
