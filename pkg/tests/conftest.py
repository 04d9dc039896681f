import numpy as np
import pytest
from scipy.integrate import trapezoid

from scsa import from_samples, sech2_on_window


def gaussian(M=512, a=-10.0, b=10.0):
    x = np.linspace(a, b, M)
    return from_samples(a, (b - a) / (M - 1), np.exp(-x ** 2))


def two_bump(M=1024):
    x = np.linspace(0.0, 12.0, M)
    y = np.exp(-(x - 4) ** 2 / 0.5) + 0.55 * np.exp(-(x - 6) ** 2 / 1.2)
    return from_samples(0.0, 12.0 / (M - 1), y)


def random_pulse(rng, M, n_bumps=None):
    """Sum of a few Gaussian bumps, decayed at both ends of [-10, 10]."""
    x = np.linspace(-10, 10, M)
    y = np.zeros(M)
    for _ in range(n_bumps or rng.integers(1, 4)):
        y += rng.uniform(0.2, 2.0) * np.exp(-(x - rng.uniform(-4, 4)) ** 2
                                             / rng.uniform(0.3, 3.0))
    return from_samples(-10.0, 20.0 / (M - 1), y)


@pytest.fixture
def soliton():
    return sech2_on_window(2.0, 1.0, -20.0, 20.0, 1024)


@pytest.fixture
def sech2():
    return sech2_on_window(1.0, 1.0, -20.0, 20.0, 1024)


@pytest.fixture
def gauss():
    return gaussian()


def box_trapezoid(values, dx):
    """Trapezoid rule over the Dirichlet box: zero ghost nodes appended at both ends."""
    padded = np.pad(np.atleast_2d(values), ((0, 0), (1, 1)))
    return trapezoid(padded, dx=dx, axis=-1)


def box_gram(psi, dx):
    n = psi.shape[0]
    return np.array([[box_trapezoid(psi[i] * psi[j], dx)[0] for j in range(n)]
                     for i in range(n)])


def assert_hygiene(op, spec):
    """Normalization, orthogonality and residual checks for one solve."""
    if spec.n_chi == 0:
        return
    gram = box_gram(spec.eigenfunctions, spec.dx)
    assert np.abs(np.diag(gram) - 1).max() <= 1e-10
    off = gram - np.diag(np.diag(gram))
    assert np.abs(off).max() <= 1e-8
    assert spec.residuals.max() <= 1e-8 * op.norm_inf
    assert np.all(np.diff(spec.kappas) < 0)
