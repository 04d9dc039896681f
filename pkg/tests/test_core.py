import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import scsa.core as core
from scsa import (
    Fixed,
    Form,
    GridMismatch,
    HypothesisViolation,
    PropositionViolation,
    SolverConfig,
    SpectralDecomposition,
    Sweep,
    TargetN,
    TargetUnreachable,
    analyze,
    assemble,
    count_bound_states,
    eigen_count,
    error_metrics,
    from_samples,
    mass,
    momentums,
    negative_spectrum,
    reconstruct,
    select_chi,
)

from conftest import assert_hygiene, random_pulse


def synthetic(kappas, psi, chi, dx=0.5):
    psi = np.atleast_2d(np.asarray(psi, dtype=float))
    k = np.asarray(kappas, dtype=float)
    return SpectralDecomposition(
        chi=chi, dx=dx, x0=0.0, form=Form.PHYSICAL, eigenvalues=-k ** 2,
        kappas=k, eigenfunctions=psi, residuals=np.zeros(k.size),
    )


class TestReconstruct:
    def test_empty(self):
        spec = synthetic([], np.zeros((0, 7)), 3.0)
        out = reconstruct(spec)
        assert out.M == 7
        np.testing.assert_array_equal(out.samples, 0.0)

    def test_single_state_mass(self):
        # kappa = 2, chi = 8 gives prefactor 4*2/8 = 1, so the mass is that of psi^2
        psi = np.array([0.0, 1.0, 1.0, 0.0])
        psi /= np.sqrt(np.sum(psi ** 2) * 0.5)
        y_chi = reconstruct(synthetic([2.0], psi, 8.0))
        np.testing.assert_allclose(y_chi.samples, psi ** 2, rtol=1e-15)
        assert mass(y_chi) == pytest.approx(1.0, rel=1e-14)

    def test_soliton(self, soliton):
        r = analyze(soliton, 1.0)
        assert r.n_chi == 1
        assert r.max_abs_error <= 1e-3
        assert r.relative_l2_error <= 1e-3


class TestErrorMetrics:
    def test_identity(self, gauss):
        assert error_metrics(gauss, gauss) == (0.0, 0.0)

    def test_zero_reference(self):
        z = from_samples(0, 1, np.zeros(5))
        assert error_metrics(z, z) == (0.0, 0.0)
        other = from_samples(0, 1, [0, 1, 0, 0, 0])
        assert error_metrics(z, other)[0] == math.inf

    def test_negation(self, gauss):
        neg = gauss.with_samples(-gauss.samples)
        rel, max_abs = error_metrics(gauss, neg)
        assert rel == pytest.approx(2.0, rel=1e-14)
        assert max_abs == 2 * gauss.y_max()

    def test_window_trapezoid(self):
        # half weights at the endpoints: ||[1,1,1]|| = sqrt(2) with dx = 1
        ones = from_samples(0, 1, [1.0, 1.0, 1.0])
        zero = from_samples(0, 1, [0.0, 0.0, 0.0])
        assert error_metrics(ones, zero)[0] == 1.0
        assert core._trapezoid_norm(ones.samples, 1.0) == pytest.approx(math.sqrt(2))

    def test_grid_mismatch(self, gauss):
        other = from_samples(gauss.x0, gauss.dx * 1.01, gauss.samples)
        with pytest.raises(GridMismatch):
            error_metrics(gauss, other)


class TestMomentums:
    @pytest.mark.parametrize("kappas, expected", [
        ([3, 2, 1], [6, 14, 36]),
        ([1], [1, 1, 1]),
    ])
    def test_power_sums(self, kappas, expected):
        spec = synthetic(kappas, np.zeros((len(kappas), 4)), 1.0)
        assert momentums(spec) == expected

    def test_empty(self):
        assert momentums(synthetic([], np.zeros((0, 4)), 1.0), pmax=2) == [0.0, 0.0]

    def test_pmax(self):
        with pytest.raises(ValueError):
            momentums(synthetic([1], np.zeros((1, 4)), 1.0), pmax=0)


class TestAnalyze:
    def test_gaussian(self, gauss):
        r = analyze(gauss, 100.0)
        assert r.n_chi >= 1
        assert r.n_chi == eigen_count(assemble(gauss, 100.0), -r.spectrum.negativity_threshold)
        assert r.levels.max() <= gauss.y_max()
        assert r.momentums[0] == pytest.approx(r.kappas.sum())

    def test_zero_signal(self):
        z = from_samples(0, 0.1, np.zeros(50))
        r = analyze(z, 10.0)
        assert r.n_chi == 0
        assert (r.relative_l2_error, r.max_abs_error) == (0.0, 0.0)
        assert r.momentums == (0.0, 0.0, 0.0)

    def test_negative_signal(self):
        with pytest.raises(HypothesisViolation):
            analyze(from_samples(0, 1, [0, 1, -0.1, 0]), 1.0)

    def test_proposition_violation(self, gauss, monkeypatch):
        real = core.negative_spectrum

        def inflated(op, **kw):
            spec = real(op, **kw)
            k = spec.kappas * 100
            return SpectralDecomposition(spec.chi, spec.dx, spec.x0, spec.form, -k ** 2, k,
                                         spec.eigenfunctions, spec.residuals)

        monkeypatch.setattr(core, "negative_spectrum", inflated)
        with pytest.raises(PropositionViolation):
            analyze(gauss, 50.0)

    def test_hygiene(self, gauss):
        r = analyze(gauss, 400.0)
        assert_hygiene(assemble(gauss, 400.0), r.spectrum)


class TestSelectChi:
    def test_fixed_equals_analyze(self, gauss):
        sel = select_chi(gauss, Fixed(30.0))
        direct = analyze(gauss, 30.0)
        assert sel.chi == 30.0 and sel.exact
        np.testing.assert_array_equal(sel.result.kappas, direct.kappas)
        np.testing.assert_array_equal(sel.result.reconstruction.samples,
                                      direct.reconstruction.samples)

    def test_target_n_sech2(self, sech2):
        # the third bound state of a sech^2 well appears at chi = 6
        sel = select_chi(sech2, TargetN(3, 1.0, 100.0))
        assert sel.exact and sel.result.n_chi == 3
        assert 6.0 < sel.chi <= 12.0
        # smallest to the bracket width
        assert count_bound_states(sech2, sel.chi / (1 + 2e-3)) < 3

    def test_target_n_at_lower_end(self, sech2):
        sel = select_chi(sech2, TargetN(1, 1.0, 100.0))
        assert sel.chi == 1.0 and sel.result.n_chi == 1

    def test_target_unreachable(self, sech2):
        with pytest.raises(TargetUnreachable) as info:
            select_chi(sech2, TargetN(50, 1.0, 10.0))
        lo, n_lo, hi, n_hi = info.value.bracket
        assert (lo, hi) == (1.0, 10.0) and n_hi < 50

    def test_target_zero_signal(self):
        with pytest.raises(TargetUnreachable):
            select_chi(from_samples(0, 0.1, np.zeros(40)), TargetN(1, 0.01, 1e5))

    def test_target_overshoot_flagged(self, sech2, monkeypatch):
        # two states appear at once near chi = 5
        monkeypatch.setattr(core, "count_bound_states",
                            lambda s, chi, *a: 0 if chi < 5.0 else 2)
        sel = select_chi(sech2, TargetN(1, 1.0, 100.0))
        assert not sel.exact
        assert sel.chi == pytest.approx(5.0, rel=1.1e-3)

    def test_sweep(self, gauss):
        chis = [20.0, 50.0, 100.0, 200.0]
        sel = select_chi(gauss, Sweep(chis))
        counts = [r.n_chi for r in sel.results]
        assert counts == sorted(counts)
        assert [row.chi for row in sel.trace] == chis
        for chi, r in zip(chis, sel.results):
            op = assemble(gauss, chi)
            assert r.n_chi == eigen_count(op, -SolverConfig().threshold_for(op))
        assert sel.result.relative_l2_error == min(r.relative_l2_error for r in sel.results)

    def test_sweep_threads_identical(self, gauss):
        chis = Sweep.geometric(10, 300, 4)
        serial = select_chi(gauss, chis, SolverConfig(threads=1))
        threaded = select_chi(gauss, chis, SolverConfig(threads=4))
        for a, b in zip(serial.results, threaded.results):
            np.testing.assert_array_equal(a.reconstruction.samples, b.reconstruction.samples)

    def test_bad_policies(self):
        with pytest.raises(ValueError):
            Fixed(0.0)
        with pytest.raises(ValueError):
            TargetN(0, 1, 2)
        with pytest.raises(ValueError):
            Sweep([])
        with pytest.raises(ValueError):
            Sweep.geometric(10, 1, 3)


def test_chi_convergence_sine(gauss):
    chis = Sweep.geometric(25, 1600, 4).chi_values
    errs = [analyze(gauss, c, scheme="sine").relative_l2_error for c in chis]
    assert all(b < a for a, b in zip(errs, errs[1:]))


pulses = st.builds(
    lambda seed, M: random_pulse(np.random.default_rng(seed), M),
    st.integers(0, 2 ** 32 - 1), st.integers(40, 200),
)
chis = st.floats(0.5, 500.0)


@settings(max_examples=25, deadline=None)
@given(pulses, chis)
def test_reconstruction_nonnegative(s, chi):
    assert analyze(s, chi).reconstruction.samples.min() >= 0.0


@settings(max_examples=25, deadline=None)
@given(pulses, chis)
def test_mass_identity(s, chi):
    r = analyze(s, chi)
    assert mass(r.reconstruction) == pytest.approx(4 / chi * r.kappas.sum(), rel=1e-9, abs=1e-300)
    assert r.momentums[0] * 4 / chi == pytest.approx(mass(r.reconstruction), rel=1e-9, abs=1e-300)


@settings(max_examples=25, deadline=None)
@given(pulses, chis, st.floats(1.0, 5.0))
def test_counting_monotone(s, chi, factor):
    assert count_bound_states(s, chi) <= count_bound_states(s, chi * factor)


@settings(max_examples=25, deadline=None)
@given(pulses, chis)
def test_levels_below_peak(s, chi):
    r = analyze(s, chi)
    assert np.all(r.levels <= s.y_max() * (1 + 1e-9))


@settings(max_examples=10, deadline=None)
@given(pulses, chis, st.floats(0.1, 10.0))
def test_amplitude_scaling(s, chi, a):
    # chi*y is what the operator sees: (a*y, chi/a) has the same kappas
    k1 = analyze(s, chi).kappas
    k2 = analyze(s.with_samples(a * s.samples), chi / a).kappas
    assert k1.size == k2.size
    np.testing.assert_allclose(k2, k1, rtol=1e-9)


def test_solver_matches_spectrum(gauss):
    r = analyze(gauss, 75.0)
    spec = negative_spectrum(assemble(gauss, 75.0))
    np.testing.assert_array_equal(r.kappas, spec.kappas)
