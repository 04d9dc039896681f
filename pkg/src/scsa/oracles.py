"""Closed-form and brute-force reference spectra for testing the solver."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import MatrixTooLarge
from .operator import DiscretizedOperator
from .signal import Signal, from_samples

BRUTE_FORCE_MAX_M = 512


@dataclass(frozen=True)
class PoschlTellerSpec:
    """Bound states of ``-d^2/dx^2 - U*sech^2(x)``.

    With ``s = (-1 + sqrt(1 + 4U))/2`` the bound states are
    ``kappa = s, s-1, ...`` while positive; ``U = s(s+1)``.
    """

    U: float
    s: float
    kappas: tuple

    @property
    def count(self) -> int:
        return len(self.kappas)

    def eigenvalues(self) -> np.ndarray:
        return -np.square(self.kappas)


def poschl_teller_spectrum(U: float) -> PoschlTellerSpec:
    if not U > 0:
        raise ValueError(f"well depth U must be > 0, got {U!r}")
    s = (-1.0 + math.sqrt(1.0 + 4.0 * U)) / 2.0
    kappas = []
    n = 0
    while s - n > 0:
        kappas.append(s - n)
        n += 1
    return PoschlTellerSpec(U=float(U), s=s, kappas=tuple(kappas))


def poschl_teller_count(U: float) -> int:
    """Number of bound states; the n-th state appears once ``U > n(n-1)``."""
    return poschl_teller_spectrum(U).count


def sech2_signal(amplitude: float, width: float, x0: float, dx: float, M: int) -> Signal:
    """``amplitude * sech^2(x/width)`` sampled at ``x0 + i*dx``."""
    if not amplitude > 0 or not width > 0:
        raise ValueError("amplitude and width must be > 0")
    x = x0 + dx * np.arange(M)
    # sech via exp(-|u|) avoids cosh overflow far out in the tails
    u = np.abs(x / width)
    t = np.exp(-u)
    sech = 2.0 * t / (1.0 + t * t)
    return from_samples(x0, dx, amplitude * sech * sech)


def sech2_on_window(amplitude: float, width: float, a: float, b: float, M: int) -> Signal:
    """Like :func:`sech2_signal` on ``M`` points spanning ``[a, b]``."""
    return sech2_signal(amplitude, width, a, (b - a) / (M - 1), M)


def brute_force_spectrum(op: DiscretizedOperator) -> np.ndarray:
    """Every eigenvalue of ``op`` from a dense symmetric eigensolve, ascending."""
    if op.M > BRUTE_FORCE_MAX_M:
        raise MatrixTooLarge(
            f"dense eigensolve limited to M <= {BRUTE_FORCE_MAX_M}, got {op.M}"
        )
    return np.sort(np.linalg.eigvalsh(op.to_dense()))
