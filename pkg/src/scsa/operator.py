"""Discretization of -d^2/dx^2 - chi*y on a uniform Dirichlet grid.

Two kinetic schemes are available:

``fd2``
    second-order central differences; the matrix is symmetric tridiagonal
    with ``diag = 2/dx^2 - chi*y`` and ``offdiag = -1/dx^2``.
``sine``
    sine-pseudospectral Laplacian. It shares the Dirichlet eigenbasis of
    the ``fd2`` matrix (DST-I vectors) but uses the exact symbol
    ``(k*pi/L)^2`` with ``L = (M+1)*dx``, so eigenfunctions with only a
    few points per wavelength are still resolved. The matrix is dense.

Both assume zero boundary values one step outside the sampled window.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np
from scipy.fft import dst
from scipy.linalg import hessenberg

from .errors import HypothesisViolation, NonPositiveChi
from .signal import Signal


class Form(str, enum.Enum):
    PHYSICAL = "physical"          # -d^2/dx^2 - chi*y
    SEMICLASSICAL = "semiclassical"  # -h^2 d^2/dx^2 - y, h = 1/sqrt(chi)


class Scheme(str, enum.Enum):
    FD2 = "fd2"
    SINE = "sine"


BOUNDARY = "dirichlet"


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DiscretizedOperator:
    """Symmetric discretization of the Schrodinger operator H(-chi*y).

    ``diag``/``offdiag`` are the main and first off-diagonal of the matrix.
    For the ``fd2`` scheme that is the whole matrix; for ``sine`` the full
    matrix lives in ``dense``. ``well_depth`` is the largest value of the
    potential well (``chi*y_max`` in physical form, ``y_max`` in
    semiclassical form); no eigenvalue can lie below ``-well_depth``.

    A semiclassical operator also keeps its physical counterpart in
    ``unscaled``. Dividing entries by chi rounds them, and weakly bound
    eigenvalues are sensitive to that rounding (relative error up to
    ``eps*||H||/|lambda|``), so solvers work on the exact physical entries
    and divide the eigenvalues by chi afterwards.
    """

    diag: np.ndarray = field(repr=False)
    offdiag: np.ndarray = field(repr=False)
    dx: float
    chi: float
    form: Form = Form.PHYSICAL
    scheme: Scheme = Scheme.FD2
    x0: float = 0.0
    well_depth: float = 0.0
    dense: Optional[np.ndarray] = field(default=None, repr=False)
    boundary: str = BOUNDARY
    unscaled: Optional["DiscretizedOperator"] = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "diag", _readonly(self.diag))
        object.__setattr__(self, "offdiag", _readonly(self.offdiag))
        if self.dense is not None:
            object.__setattr__(self, "dense", _readonly(self.dense))
        if self.offdiag.size != self.diag.size - 1:
            raise ValueError("offdiag must have length M-1")

    @property
    def M(self) -> int:
        return self.diag.size

    @property
    def is_tridiagonal(self) -> bool:
        return self.dense is None

    @property
    def eigenvalue_scale(self) -> float:
        """Multiply matrix eigenvalues by this to get physical -kappa^2."""
        return self.chi if self.form is Form.SEMICLASSICAL else 1.0

    @property
    def kinetic_scale(self) -> float:
        """Value of ``1/dx^2`` in the units of this matrix."""
        return 1.0 / (self.dx * self.dx * self.eigenvalue_scale)

    def to_dense(self) -> np.ndarray:
        if self.dense is not None:
            return np.array(self.dense)
        a = np.diag(self.diag)
        if self.M > 1:
            idx = np.arange(self.M - 1)
            a[idx, idx + 1] = self.offdiag
            a[idx + 1, idx] = self.offdiag
        return a

    def matvec(self, v: np.ndarray) -> np.ndarray:
        if self.dense is not None:
            return self.dense @ v
        out = self.diag[:, None] * v if v.ndim == 2 else self.diag * v
        e = self.offdiag if v.ndim == 1 else self.offdiag[:, None]
        out[:-1] += e * v[1:]
        out[1:] += e * v[:-1]
        return out

    @cached_property
    def tridiagonal(self) -> tuple:
        """``(d, e, Q)`` with ``Q @ T @ Q.T`` equal to the matrix.

        ``Q`` is None when the matrix is already tridiagonal; otherwise the
        dense matrix is reduced by Householder similarity transforms.
        """
        if self.dense is None:
            return self.diag, self.offdiag, None
        h, q = hessenberg(self.dense, calc_q=True)
        d = np.diag(h).copy()
        e = 0.5 * (np.diag(h, 1) + np.diag(h, -1))
        return d, e, q

    @cached_property
    def norm_inf(self) -> float:
        if self.dense is not None:
            return float(np.abs(self.dense).sum(axis=1).max())
        row = np.abs(self.diag).copy()
        row[:-1] += np.abs(self.offdiag)
        row[1:] += np.abs(self.offdiag)
        return float(row.max())


def sine_laplacian(M: int, dx: float) -> np.ndarray:
    """Dense sine-pseudospectral matrix of -d^2/dx^2 with Dirichlet ends."""
    length = (M + 1) * dx
    symbol = (np.arange(1, M + 1) * np.pi / length) ** 2
    basis = dst(np.eye(M), type=1, norm="ortho")  # symmetric and orthogonal
    lap = (basis * symbol) @ basis
    return 0.5 * (lap + lap.T)


def assemble(s: Signal, chi: float, form: Form | str = Form.PHYSICAL,
             scheme: Scheme | str = Scheme.FD2) -> DiscretizedOperator:
    """Discretize H(-chi*y) for the signal ``s``.

    In semiclassical form every matrix entry is the physical entry divided
    by ``chi``, which is the operator ``-h^2 d^2/dx^2 - y`` with
    ``h = 1/sqrt(chi)``.
    """
    chi = float(chi)
    if not np.isfinite(chi) or chi <= 0:
        raise NonPositiveChi(f"chi must be finite and > 0, got {chi!r}")
    form = Form(form)
    scheme = Scheme(scheme)
    y = s.samples
    if y.min() < 0:
        raise HypothesisViolation(
            f"signal must be nonnegative to form a potential well (min {y.min()!r})"
        )

    inv_dx2 = 1.0 / (s.dx * s.dx)
    potential = chi * y
    dense = None
    if scheme is Scheme.FD2:
        diag = 2.0 * inv_dx2 - potential
        offdiag = np.full(s.M - 1, -inv_dx2)
    else:
        dense = sine_laplacian(s.M, s.dx)
        dense[np.diag_indices(s.M)] -= potential
        diag = np.diag(dense).copy()
        offdiag = np.diag(dense, 1).copy()
    depth = chi * s.y_max()
    physical = DiscretizedOperator(
        diag=diag, offdiag=offdiag, dx=s.dx, chi=chi, form=Form.PHYSICAL, scheme=scheme,
        x0=s.x0, well_depth=float(depth), dense=dense,
    )
    if form is Form.PHYSICAL:
        return physical
    return DiscretizedOperator(
        diag=diag / chi, offdiag=offdiag / chi, dx=s.dx, chi=chi, form=form, scheme=scheme,
        x0=s.x0, well_depth=float(depth / chi),
        dense=None if dense is None else dense / chi, unscaled=physical,
    )


def weyl_estimate(s: Signal, chi: float) -> float:
    """Semiclassical estimate of the number of negative eigenvalues.

    ``(sqrt(chi)/pi) * integral(sqrt(y) dx)`` with trapezoid weights.
    """
    if chi <= 0:
        raise NonPositiveChi(f"chi must be > 0, got {chi!r}")
    root = np.sqrt(np.clip(s.samples, 0.0, None))
    integral = s.dx * (root.sum() - 0.5 * (root[0] + root[-1]))
    return float(np.sqrt(chi) / np.pi * integral)
