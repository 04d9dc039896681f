"""Negative spectrum of a discretized Schrodinger operator.

Only the bound states are wanted, and there are usually far fewer of them
than grid points, so the full spectrum is never computed. Eigenvalues are
isolated by bisection on Sturm-sequence counts of the tridiagonal form,
eigenvectors come from inverse iteration, and vectors whose eigenvalues
are (nearly) equal are re-orthogonalized against each other.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import lapack

from .errors import ConvergenceFailure, PropositionViolation
from .operator import DiscretizedOperator, Form

log = logging.getLogger(__name__)

EPS = np.finfo(np.float64).eps
TINY = np.finfo(np.float64).tiny
THREADS_ENV = "SCSA_THREADS"

# Relative slack allowed on kappa^2 <= well depth before raising.
PROPOSITION_RTOL = 1e-9


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for :func:`negative_spectrum`.

    ``negativity_threshold`` is in the units of the operator matrix; None
    means ``1e-10 * 2/dx^2`` (scaled by 1/chi for semiclassical form).
    ``threads`` of None reads ``SCSA_THREADS`` (0 = sequential).
    """

    negativity_threshold: Optional[float] = None
    max_inverse_iters: int = 50
    cluster_rtol: float = 1e-6
    threads: Optional[int] = None

    def threshold_for(self, op: DiscretizedOperator) -> float:
        if self.negativity_threshold is not None:
            if self.negativity_threshold < 0:
                raise ValueError("negativity_threshold must be >= 0")
            return float(self.negativity_threshold)
        return default_negativity_threshold(op)

    def worker_count(self) -> int:
        if self.threads is not None:
            return max(0, int(self.threads))
        raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
        try:
            return max(0, int(raw))
        except ValueError:
            log.warning("ignoring non-integer %s=%r", THREADS_ENV, raw)
            return 0


def default_negativity_threshold(op: DiscretizedOperator) -> float:
    return 1e-10 * 2.0 * op.kinetic_scale


def _readonly(a) -> np.ndarray:
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Bound states of an operator, sorted by decreasing kappa.

    ``eigenvalues`` are in matrix units (divide-by-chi for semiclassical
    form); ``kappas`` are always physical, ``kappa_n = sqrt(-lambda_n)`` of
    ``H(-chi*y)``. Eigenfunctions are rows, normalized so that the
    trapezoid integral of ``psi_n^2`` over the Dirichlet box is 1 (see
    :func:`box_integral`).
    """

    chi: float
    dx: float
    x0: float
    form: Form
    eigenvalues: np.ndarray = field(repr=False)
    kappas: np.ndarray
    eigenfunctions: np.ndarray = field(repr=False)
    residuals: np.ndarray = field(repr=False)
    negativity_threshold: float = 0.0
    warnings: tuple = ()

    def __post_init__(self):
        for name in ("eigenvalues", "kappas", "residuals"):
            object.__setattr__(self, name, _readonly(getattr(self, name)))
        object.__setattr__(self, "eigenfunctions", _readonly(self.eigenfunctions))

    @property
    def n_chi(self) -> int:
        return self.kappas.size

    @property
    def M(self) -> int:
        return self.eigenfunctions.shape[1]

    @property
    def levels(self) -> np.ndarray:
        """kappa_n^2 / chi, the values comparable with the signal."""
        return self.kappas ** 2 / self.chi


def trapezoid_weights(M: int) -> np.ndarray:
    """Trapezoid weights (in units of dx) over the sampled window."""
    w = np.ones(M)
    w[0] = w[-1] = 0.5
    return w


def box_integral(values: np.ndarray, dx: float) -> np.ndarray:
    """Trapezoid integral over the Dirichlet box, along the last axis.

    The box ends one step outside the sampled window, where eigenfunctions
    vanish, so every sampled point gets full weight. This is the inner
    product under which the discretized operator is symmetric; the
    window-only trapezoid rule would bias the overlap of weakly bound
    states that still reach the window edge.
    """
    return np.sum(values, axis=-1) * dx


# --------------------------------------------------------------------------
# Sturm counts and bisection

def sturm_counts(d: np.ndarray, e: np.ndarray, shifts) -> np.ndarray:
    """Number of eigenvalues strictly below each shift.

    ``d``/``e`` are the diagonal and off-diagonal of a symmetric tridiagonal
    matrix. Counts are the number of negative pivots of the LDL^T
    factorization of ``T - shift``, evaluated for all shifts at once.
    """
    shifts = np.atleast_1d(np.asarray(shifts, dtype=np.float64))
    e2 = np.asarray(e, dtype=np.float64) ** 2
    pivmin = TINY * max(1.0, float(e2.max()) if e2.size else 1.0)
    q = d[0] - shifts
    np.putmask(q, np.abs(q) < pivmin, -pivmin)
    count = (q < 0).astype(np.int64)
    for i in range(1, len(d)):
        q = (d[i] - shifts) - e2[i - 1] / q
        np.putmask(q, np.abs(q) < pivmin, -pivmin)
        count += q < 0
    return count


def gershgorin_bounds(d: np.ndarray, e: np.ndarray) -> tuple:
    radius = np.zeros_like(d)
    radius[:-1] += np.abs(e)
    radius[1:] += np.abs(e)
    return float((d - radius).min()), float((d + radius).max())


def bisect_eigenvalues(d, e, indices, lower: float, upper: float,
                       points: int = 15) -> np.ndarray:
    """Eigenvalues number ``indices`` (0-based, ascending) inside (lower, upper].

    Multisection: every round evaluates ``points`` equally spaced shifts
    inside each open bracket in a single Sturm pass, shrinking it by a
    factor ``points + 1``, until the bracket is as narrow as floating point
    allows. The result is the midpoint of the final bracket.
    """
    k = np.asarray(indices, dtype=np.int64)
    lo = np.full(k.size, lower, dtype=np.float64)
    hi = np.full(k.size, upper, dtype=np.float64)
    pivmin = TINY * max(1.0, float(np.max(np.square(e))) if len(e) else 1.0)
    atol = 2.0 * pivmin
    frac = np.arange(1, points + 1) / (points + 1.0)
    active = np.ones(k.size, dtype=bool)
    for _ in range(128):
        tol = 2.0 * EPS * np.maximum(np.abs(lo), np.abs(hi)) + atol
        active &= (hi - lo) > tol
        if not active.any():
            break
        idx = np.flatnonzero(active)
        a, b = lo[idx], hi[idx]
        pts = a[:, None] + (b - a)[:, None] * frac
        counts = sturm_counts(d, e, pts.ravel()).reshape(pts.shape)
        above = counts > k[idx, None]
        # first shift with more than k eigenvalues below it
        first = np.where(above.any(axis=1), above.argmax(axis=1), points)
        rows = np.arange(idx.size)
        new_hi = np.where(first < points, pts[rows, np.minimum(first, points - 1)], b)
        new_lo = np.where(first > 0, pts[rows, np.maximum(first - 1, 0)], a)
        stuck = (new_lo == a) & (new_hi == b)
        lo[idx], hi[idx] = new_lo, new_hi
        active[idx[stuck]] = False
    return 0.5 * (lo + hi)


def eigen_count(op: DiscretizedOperator, lam: float) -> int:
    """Number of eigenvalues of ``op`` strictly below ``lam``."""
    if op.unscaled is not None:
        return eigen_count(op.unscaled, lam * op.eigenvalue_scale)
    d, e, _ = op.tridiagonal
    return int(sturm_counts(d, e, [lam])[0])


# --------------------------------------------------------------------------
# Inverse iteration

def _clusters(lams: np.ndarray, rtol: float) -> list:
    groups = []
    start = 0
    for j in range(1, lams.size):
        gap = lams[j] - lams[j - 1]
        if gap > rtol * max(abs(lams[j]), abs(lams[j - 1])):
            groups.append(list(range(start, j)))
            start = j
    if lams.size:
        groups.append(list(range(start, lams.size)))
    return groups


def _factor(d, e, sigma, scale):
    """LU of ``T - sigma``; nudges sigma off an exactly singular shift."""
    for attempt in range(8):
        dl, dd, du, du2, ipiv, info = lapack.dgttrf(e, d - sigma, e)
        if info == 0:
            return (dl, dd, du, du2, ipiv), sigma
        sigma = sigma + (attempt + 1) * EPS * scale
    raise np.linalg.LinAlgError("tridiagonal factorization failed")


def _inverse_iteration(d, e, lams, group, max_iters, scale) -> dict:
    """Eigenvectors of T for one cluster of eigenvalue indices."""
    m = d.size
    tol = 1e-11 * scale
    vectors = {}
    prev_sigma = None
    for j in group:
        sigma = lams[j]
        if prev_sigma is not None:
            pert = 10.0 * EPS * max(abs(sigma), EPS * scale)
            sigma = max(sigma, prev_sigma + pert)
        lu, sigma = _factor(d, e, sigma, scale)
        prev_sigma = sigma

        earlier = [vectors[i] for i in group if i in vectors]
        b = np.random.default_rng(j).uniform(-1.0, 1.0, m)
        b /= np.linalg.norm(b)
        hits = 0
        for it in range(max_iters):
            x, info = lapack.dgttrs(*lu, b[:, None])
            x = x[:, 0]
            for _ in range(2):
                for v in earlier:
                    x -= (v @ x) * v
            nrm = np.linalg.norm(x)
            if not np.isfinite(nrm) or nrm == 0.0:
                sigma = sigma + 10.0 * EPS * scale
                lu, sigma = _factor(d, e, sigma, scale)
                continue
            b = x / nrm
            if 1.0 / nrm <= tol:
                hits += 1
                if hits == 2:
                    break
        else:
            if hits == 0:
                raise ConvergenceFailure(j, max_iters)
        vectors[j] = b
    return vectors


def _sign_fix(v: np.ndarray) -> np.ndarray:
    """Make the first non-negligible component positive."""
    big = np.abs(v).max()
    if big == 0:
        return v
    first = np.flatnonzero(np.abs(v) > 1e-8 * big)[0]
    return -v if v[first] < 0 else v


# --------------------------------------------------------------------------

def _rescaled(op: DiscretizedOperator, phys: SpectralDecomposition) -> SpectralDecomposition:
    """Physical-form solution expressed in the units of ``op``."""
    lams = phys.eigenvalues / op.eigenvalue_scale
    psi = phys.eigenfunctions
    if phys.n_chi:
        resid = np.linalg.norm(op.matvec(psi.T) - psi.T * lams, axis=0)
    else:
        resid = phys.residuals
    return SpectralDecomposition(
        chi=op.chi, dx=op.dx, x0=op.x0, form=op.form, eigenvalues=lams,
        kappas=phys.kappas, eigenfunctions=psi, residuals=resid,
        negativity_threshold=phys.negativity_threshold / op.eigenvalue_scale,
        warnings=phys.warnings,
    )


def negative_spectrum(op: DiscretizedOperator,
                      negativity_threshold: Optional[float] = None,
                      config: Optional[SolverConfig] = None) -> SpectralDecomposition:
    """All eigenpairs of ``op`` with eigenvalue below ``-negativity_threshold``.

    Raises ConvergenceFailure if inverse iteration stalls on some eigenpair
    and PropositionViolation if an eigenvalue lies below the bottom of the
    potential well (impossible for a correct assembly).
    """
    config = config or SolverConfig()
    if negativity_threshold is None:
        negativity_threshold = config.threshold_for(op)
    if negativity_threshold < 0:
        raise ValueError("negativity_threshold must be >= 0")
    if op.unscaled is not None:
        return _rescaled(op, negative_spectrum(
            op.unscaled, negativity_threshold * op.eigenvalue_scale, config))
    d, e, q = op.tridiagonal
    m = d.size
    cut = -float(negativity_threshold)

    n = int(sturm_counts(d, e, [cut])[0])
    warnings = []
    if n == 0:
        empty = np.zeros(0)
        return SpectralDecomposition(
            chi=op.chi, dx=op.dx, x0=op.x0, form=op.form, eigenvalues=empty,
            kappas=empty, eigenfunctions=np.zeros((0, m)), residuals=empty,
            negativity_threshold=float(negativity_threshold),
        )

    g_lo, _ = gershgorin_bounds(d, e)
    scale = max(op.norm_inf, TINY)
    lower = g_lo - 2.0 * EPS * abs(g_lo) - 1.0 - EPS * scale
    lams = bisect_eigenvalues(d, e, np.arange(n), lower, cut)

    depth = op.well_depth
    bottom = -lams[0]
    if bottom > depth * (1 + PROPOSITION_RTOL) + 4 * EPS * scale:
        raise PropositionViolation(
            f"eigenvalue {lams[0]!r} lies below the well bottom {-depth!r}"
        )

    groups = _clusters(lams, config.cluster_rtol)
    for group in groups:
        if len(group) > 1 and np.any(np.diff(lams[group]) <= 4 * EPS * np.abs(lams[group[0]])):
            warnings.append(
                f"eigenvalues {group} coincide to working precision; "
                "continuum eigenvalues are simple, check the grid"
            )

    def work(group):
        return _inverse_iteration(d, e, lams, group, config.max_inverse_iters, scale)

    workers = config.worker_count()
    if workers > 1 and len(groups) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(work, groups))
    else:
        parts = [work(g) for g in groups]
    vectors = {}
    for part in parts:
        vectors.update(part)
    u = np.column_stack([vectors[j] for j in range(n)])
    v = u if q is None else q @ u

    v = v / np.sqrt(box_integral(v.T * v.T, op.dx))
    psi = np.array([_sign_fix(v[:, j]) for j in range(n)])
    resid = np.linalg.norm(op.matvec(psi.T) - psi.T * lams, axis=0)

    kappas = np.sqrt(-lams * op.eigenvalue_scale)
    for w in warnings:
        log.warning(w)
    return SpectralDecomposition(
        chi=op.chi, dx=op.dx, x0=op.x0, form=op.form, eigenvalues=lams,
        kappas=kappas, eigenfunctions=psi, residuals=resid,
        negativity_threshold=float(negativity_threshold), warnings=tuple(warnings),
    )
