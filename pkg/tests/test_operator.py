import numpy as np
import pytest

from scsa import (
    Form,
    NonPositiveChi,
    assemble,
    from_samples,
    negative_spectrum,
    poschl_teller_spectrum,
    sech2_on_window,
    weyl_estimate,
)
from scsa.oracles import brute_force_spectrum
from scsa.operator import sine_laplacian

from conftest import random_pulse


def test_physical_entries():
    op = assemble(from_samples(0, 1, [0, 1, 0]), 1.0)
    np.testing.assert_array_equal(op.diag, [2, 1, 2])
    np.testing.assert_array_equal(op.offdiag, [-1, -1])
    assert op.form is Form.PHYSICAL and op.boundary == "dirichlet"


def test_semiclassical_is_physical_over_chi():
    s = from_samples(0, 1, [0, 1, 0])
    phys = assemble(s, 4.0)
    semi = assemble(s, 4.0, Form.SEMICLASSICAL)
    np.testing.assert_array_equal(semi.diag, phys.diag / 4.0)
    np.testing.assert_array_equal(semi.offdiag, phys.offdiag / 4.0)
    np.testing.assert_array_equal(semi.to_dense(), phys.to_dense() / 4.0)


def test_zero_signal_is_free_laplacian():
    op = assemble(from_samples(0, 0.5, np.zeros(6)), 7.0)
    np.testing.assert_array_equal(op.diag, np.full(6, 8.0))
    np.testing.assert_array_equal(op.offdiag, np.full(5, -4.0))


@pytest.mark.parametrize("chi", [0.0, -1.0, float("nan")])
def test_bad_chi(chi):
    with pytest.raises(NonPositiveChi):
        assemble(from_samples(0, 1, [0, 1, 0]), chi)


def test_negative_signal_rejected():
    with pytest.raises(ValueError):
        assemble(from_samples(0, 1, [0, -1, 0]), 1.0)


def test_matvec_matches_dense():
    rng = np.random.default_rng(0)
    s = random_pulse(rng, 40)
    for scheme in ("fd2", "sine"):
        op = assemble(s, 3.0, scheme=scheme)
        v = rng.standard_normal(40)
        np.testing.assert_allclose(op.matvec(v), op.to_dense() @ v, rtol=1e-13, atol=1e-10)


def test_sine_laplacian_spectrum():
    # eigenvalues (k*pi/L)^2 with L = (M+1)*dx, and same eigenvectors as FD2
    M, dx = 9, 0.3
    lap = sine_laplacian(M, dx)
    k = np.arange(1, M + 1)
    np.testing.assert_allclose(np.linalg.eigvalsh(lap), (k * np.pi / ((M + 1) * dx)) ** 2,
                               rtol=1e-12)
    fd = assemble(from_samples(0, dx, np.zeros(M)), 1.0).to_dense()
    assert np.abs(lap @ fd - fd @ lap).max() < 1e-9


def test_tridiagonal_reduction_preserves_matrix():
    s = random_pulse(np.random.default_rng(1), 60)
    op = assemble(s, 10.0, scheme="sine")
    d, e, q = op.tridiagonal
    t = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
    np.testing.assert_allclose(q @ t @ q.T, op.to_dense(), atol=1e-10 * op.norm_inf)


class TestWeyl:
    def test_zero_signal(self):
        assert weyl_estimate(from_samples(0, 1, np.zeros(5)), 10.0) == 0.0

    def test_sech2_chi144(self):
        # oracle: closed-form count 12 for U = 144
        s = sech2_on_window(1.0, 1.0, -20.0, 20.0, 1024)
        exact = poschl_teller_spectrum(144.0).count
        assert exact == 12
        assert abs(weyl_estimate(s, 144.0) - exact) <= 1

    def test_sqrt_chi_scaling(self):
        s = random_pulse(np.random.default_rng(2), 100)
        assert weyl_estimate(s, 4 * 3.7) == pytest.approx(2 * weyl_estimate(s, 3.7), rel=1e-15)


@pytest.mark.parametrize("seed", range(6))
def test_semiclassical_eigenvalues_scale(seed):
    rng = np.random.default_rng(seed)
    s = random_pulse(rng, int(rng.integers(10, 51)))
    chi = float(rng.uniform(1, 200))
    phys = brute_force_spectrum(assemble(s, chi))
    semi = brute_force_spectrum(assemble(s, chi, Form.SEMICLASSICAL))
    np.testing.assert_allclose(semi, phys / chi, rtol=1e-12, atol=1e-12 * np.abs(phys).max() / chi)
    # and the bound-state solver agrees in physical kappas
    kp = negative_spectrum(assemble(s, chi)).kappas
    ks = negative_spectrum(assemble(s, chi, Form.SEMICLASSICAL)).kappas
    np.testing.assert_allclose(ks, kp, rtol=1e-12)


def test_semiclassical_pairs_fit_scaled_matrix():
    # eigenpairs come from the exact physical entries; they must still
    # satisfy the rounded, divided-by-chi matrix to residual precision
    s = random_pulse(np.random.default_rng(7), 300)
    op = assemble(s, 437.3, Form.SEMICLASSICAL)
    assert op.unscaled is not None and op.unscaled.form is Form.PHYSICAL
    spec = negative_spectrum(op)
    dense = np.linalg.eigvalsh(op.to_dense())
    np.testing.assert_allclose(spec.eigenvalues, dense[:spec.n_chi], rtol=0,
                               atol=1e-12 * op.norm_inf)
    assert spec.residuals.max() <= 1e-8 * op.norm_inf


@pytest.mark.parametrize("seed", range(6))
def test_eigenvalues_monotone_in_chi(seed):
    rng = np.random.default_rng(100 + seed)
    s = random_pulse(rng, int(rng.integers(10, 51)))
    chi = float(rng.uniform(0.5, 50))
    lo = brute_force_spectrum(assemble(s, chi))
    hi = brute_force_spectrum(assemble(s, chi * rng.uniform(1.01, 3)))
    assert np.all(hi <= lo + 1e-12 * np.abs(lo).max())
