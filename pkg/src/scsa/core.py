"""Signal reconstruction from squared bound-state eigenfunctions.

For a nonnegative signal ``y`` and a parameter ``chi > 0`` the operator
``-d^2/dx^2 - chi*y`` has finitely many negative eigenvalues
``-kappa_n^2``. The approximation

    y_chi(x) = (4/chi) * sum_n kappa_n * psi_n(x)^2

uses only those bound states. Larger ``chi`` means more bound states and,
in the semiclassical limit, a closer fit.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Union

import numpy as np

from .errors import (
    GridMismatch,
    HypothesisViolation,
    NonPositiveChi,
    PropositionViolation,
    TargetUnreachable,
)
from .operator import Form, Scheme, assemble
from .signal import Signal
from .solver import (
    PROPOSITION_RTOL,
    SolverConfig,
    SpectralDecomposition,
    eigen_count,
    negative_spectrum,
    box_integral,
    trapezoid_weights,
)

MOMENT_ORDERS = 3


@dataclass(frozen=True, eq=False)
class ScsaResult:
    chi: float
    n_chi: int
    reconstruction: Signal
    relative_l2_error: float
    max_abs_error: float
    momentums: tuple
    kappas: np.ndarray
    spectrum: SpectralDecomposition = field(repr=False)

    @property
    def levels(self) -> np.ndarray:
        return self.spectrum.levels


# --------------------------------------------------------------------------
# chi policies

@dataclass(frozen=True)
class Fixed:
    chi: float

    def __post_init__(self):
        if not self.chi > 0:
            raise NonPositiveChi(f"chi must be > 0, got {self.chi!r}")


@dataclass(frozen=True)
class TargetN:
    """Smallest chi (to relative width ``rtol``) giving ``n_target`` bound states."""

    n_target: int
    chi_lo: float
    chi_hi: float
    max_iters: int = 100
    rtol: float = 1e-3

    def __post_init__(self):
        if self.n_target < 1:
            raise ValueError("n_target must be >= 1")
        if not 0 < self.chi_lo < self.chi_hi:
            raise ValueError("need 0 < chi_lo < chi_hi")


@dataclass(frozen=True)
class Sweep:
    chi_values: tuple

    def __post_init__(self):
        object.__setattr__(self, "chi_values", tuple(float(c) for c in self.chi_values))
        if not self.chi_values:
            raise ValueError("sweep needs at least one chi value")
        if any(not c > 0 for c in self.chi_values):
            raise NonPositiveChi("all sweep chi values must be > 0")

    @classmethod
    def geometric(cls, chi_min: float, chi_max: float, steps: int) -> "Sweep":
        if steps < 2 or not 0 < chi_min < chi_max:
            raise ValueError("need steps >= 2 and 0 < chi_min < chi_max")
        return cls(tuple(np.geomspace(chi_min, chi_max, steps)))


ChiPolicy = Union[Fixed, TargetN, Sweep]


@dataclass(frozen=True)
class TraceRow:
    chi: float
    n_chi: int
    relative_l2_error: Optional[float] = None
    momentums: Optional[tuple] = None


@dataclass(frozen=True, eq=False)
class Selection:
    """Outcome of :func:`select_chi`.

    ``exact`` is False only for TargetN when the count jumped past the
    target between two neighbouring chi values; ``result`` then holds the
    nearest achievable count.
    """

    chi: float
    result: ScsaResult
    trace: List[TraceRow]
    results: List[ScsaResult] = field(default_factory=list)
    exact: bool = True


# --------------------------------------------------------------------------

def reconstruct(spec: SpectralDecomposition) -> Signal:
    """Evaluate ``(4/chi) * sum kappa_n psi_n^2`` on the decomposition's grid."""
    if spec.n_chi == 0:
        values = np.zeros(spec.M)
    else:
        values = (4.0 / spec.chi) * (spec.kappas @ np.square(spec.eigenfunctions))
    return Signal(spec.x0, spec.dx, values)


def mass(y_chi: Signal) -> float:
    """Integral of a reconstruction over the Dirichlet box.

    Equals ``(4/chi) * sum kappa_n`` because each ``psi_n^2`` integrates to 1.
    """
    return float(box_integral(y_chi.samples, y_chi.dx))


def _trapezoid_norm(values: np.ndarray, dx: float) -> float:
    w = trapezoid_weights(values.size)
    return math.sqrt(float((w * values * values).sum()) * dx)


def error_metrics(y: Signal, y_chi: Signal) -> tuple:
    """``(relative L2 error, max abs error)`` of ``y_chi`` against ``y``.

    A zero reference gives relative error 0 when the two agree and
    ``inf`` otherwise.
    """
    if not y.same_grid(y_chi):
        raise GridMismatch("signals are sampled on different grids")
    diff = y.samples - y_chi.samples
    num = _trapezoid_norm(diff, y.dx)
    den = _trapezoid_norm(y.samples, y.dx)
    if den == 0.0:
        rel = 0.0 if num == 0.0 else math.inf
    else:
        rel = num / den
    max_abs = float(np.abs(diff).max()) if diff.size else 0.0
    return rel, max_abs


def momentums(spec: SpectralDecomposition, pmax: int = MOMENT_ORDERS) -> list:
    """Power sums ``sum_n kappa_n**p`` for ``p = 1..pmax``."""
    if pmax < 1:
        raise ValueError("pmax must be >= 1")
    k = np.asarray(spec.kappas, dtype=np.float64)
    return [float(np.sum(k ** p)) for p in range(1, pmax + 1)]


def check_levels(levels, y_max: float) -> None:
    """Raise PropositionViolation if some kappa^2/chi exceeds y_max."""
    levels = np.asarray(levels, dtype=np.float64)
    if levels.size and levels.max() > y_max * (1 + PROPOSITION_RTOL):
        raise PropositionViolation(
            f"kappa^2/chi = {levels.max()!r} exceeds y_max = {y_max!r}"
        )


def analyze(s: Signal, chi: float, solver_config: Optional[SolverConfig] = None,
            scheme: Union[Scheme, str] = Scheme.FD2) -> ScsaResult:
    """Assemble, solve, reconstruct and score one value of chi."""
    if s.samples.min() < 0:
        raise HypothesisViolation(
            f"signal must be nonnegative (min sample {s.samples.min()!r}); "
            "apply baseline_shift first"
        )
    op = assemble(s, chi, Form.PHYSICAL, scheme)
    spec = negative_spectrum(op, config=solver_config)
    check_levels(spec.levels, s.y_max())
    y_chi = reconstruct(spec)
    rel, max_abs = error_metrics(s, y_chi)
    return ScsaResult(
        chi=float(chi),
        n_chi=spec.n_chi,
        reconstruction=y_chi,
        relative_l2_error=rel,
        max_abs_error=max_abs,
        momentums=tuple(momentums(spec, MOMENT_ORDERS)),
        kappas=spec.kappas,
        spectrum=spec,
    )


def count_bound_states(s: Signal, chi: float, solver_config: Optional[SolverConfig] = None,
                       scheme: Union[Scheme, str] = Scheme.FD2) -> int:
    """N_chi by a Sturm count alone, without computing eigenvectors."""
    config = solver_config or SolverConfig()
    op = assemble(s, chi, Form.PHYSICAL, scheme)
    return eigen_count(op, -config.threshold_for(op))


def _row(result: ScsaResult) -> TraceRow:
    return TraceRow(result.chi, result.n_chi, result.relative_l2_error, result.momentums)


def _target_n(s, policy: TargetN, config, scheme) -> Selection:
    n = policy.n_target
    trace = []

    def count(chi):
        c = count_bound_states(s, chi, config, scheme)
        trace.append(TraceRow(chi, c))
        return c

    lo, hi = float(policy.chi_lo), float(policy.chi_hi)
    n_lo, n_hi = count(lo), count(hi)
    if n_lo == n:
        result = analyze(s, lo, config, scheme)
        return Selection(lo, result, trace, [result])
    if n_lo > n or n_hi < n:
        raise TargetUnreachable(
            f"N_chi ranges over [{n_lo}, {n_hi}] on [{lo:g}, {hi:g}], target {n}",
            (lo, n_lo, hi, n_hi),
        )
    # invariant: count(lo) < n <= count(hi); bisect in log(chi)
    iters = 0
    while hi / lo - 1.0 > policy.rtol and iters < policy.max_iters:
        mid = math.sqrt(lo * hi)
        c = count(mid)
        if c >= n:
            hi, n_hi = mid, c
        else:
            lo, n_lo = mid, c
        iters += 1
    converged = hi / lo - 1.0 <= policy.rtol
    if n_hi != n and not converged:
        raise TargetUnreachable(
            f"no chi with N_chi = {n} found in {policy.max_iters} iterations",
            (lo, n_lo, hi, n_hi),
        )
    result = analyze(s, hi, config, scheme)
    return Selection(hi, result, trace, [result], exact=(n_hi == n))


def select_chi(s: Signal, policy: ChiPolicy, solver_config: Optional[SolverConfig] = None,
               scheme: Union[Scheme, str] = Scheme.FD2) -> Selection:
    """Pick chi according to ``policy`` and run the analysis.

    Fixed runs a single analysis. TargetN bisects on chi using cheap Sturm
    counts (N_chi is nondecreasing in chi) and returns the smallest tested
    chi with exactly ``n_target`` bound states. Sweep analyses every chi
    and returns the one with the smallest relative error, with all results
    kept in ``Selection.results`` in input order.
    """
    if isinstance(policy, Fixed):
        result = analyze(s, policy.chi, solver_config, scheme)
        return Selection(policy.chi, result, [_row(result)], [result])
    if isinstance(policy, TargetN):
        return _target_n(s, policy, solver_config, scheme)
    if isinstance(policy, Sweep):
        config = solver_config or SolverConfig()
        workers = config.worker_count()

        def run(chi):
            return analyze(s, chi, config, scheme)

        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(run, policy.chi_values))
        else:
            results = [run(c) for c in policy.chi_values]
        best = min(results, key=lambda r: r.relative_l2_error)
        return Selection(best.chi, best, [_row(r) for r in results], results)
    raise TypeError(f"unknown chi policy {policy!r}")


def sweep_counts(s: Signal, chi_values: Sequence[float],
                 solver_config: Optional[SolverConfig] = None,
                 scheme: Union[Scheme, str] = Scheme.FD2) -> list:
    """N_chi for each chi by Sturm counts only."""
    return [count_bound_states(s, c, solver_config, scheme) for c in chi_values]
