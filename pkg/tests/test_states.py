"""State constructors and the closed-form oracles: moments by direct
quadrature, symmetries, and spot values."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qpsf.errors import ConfigurationError, TruncationError
from qpsf.grids import PositionGrid, forward_fourier
from qpsf.states import (
    CoherentParams,
    PlaneWavePairParams,
    SqueezeParams,
    cat_wave,
    coherent_cat_norm,
    coherent_vec,
    coherent_wave,
    fock_wave,
    oracle_generalized_kr_coherent,
    oracle_kr_cat,
    oracle_kr_fock1,
    plane_wave_pair,
    squeezed_cat_wave,
    squeezed_coherent_wave,
)


def mean_q(psi):
    return float((psi.grid.q * psi.position_density()).sum() * psi.grid.dq)


def mean_p(psi):
    phi = forward_fourier(psi)
    return float((phi.grid.p * phi.momentum_density()).sum() * phi.grid.dp)


def var_q(psi):
    m = mean_q(psi)
    return float(((psi.grid.q - m) ** 2 * psi.position_density()).sum() * psi.grid.dq)


class TestCoherent:
    def test_vacuum_centered(self, ref_grid):
        psi = coherent_wave(CoherentParams(0), ref_grid)
        assert abs(mean_q(psi)) < 1e-9
        assert abs(mean_p(psi)) < 1e-9

    def test_real_displacement(self, ref_grid):
        psi = coherent_wave(CoherentParams(3), ref_grid)
        assert mean_q(psi) == pytest.approx(3 * np.sqrt(2), abs=1e-6)
        assert abs(mean_p(psi)) < 1e-9

    def test_rotated_displacement(self, ref_grid):
        # alpha0 = 3 e^{i pi/4}: <q> = <p> = 3 under the alpha map
        psi = coherent_wave(CoherentParams(3 * np.exp(1j * np.pi / 4)), ref_grid)
        assert mean_q(psi) == pytest.approx(3.0, abs=1e-6)
        assert mean_p(psi) == pytest.approx(3.0, abs=1e-6)

    def test_coverage_guard(self):
        g = PositionGrid.from_span(-4, 4, 64)
        with pytest.raises(TruncationError):
            coherent_wave(CoherentParams(4), g)


class TestFock:
    def test_vacuum_equals_coherent_zero(self, ref_grid):
        f0 = fock_wave(0, ref_grid)
        c0 = coherent_wave(CoherentParams(0), ref_grid)
        assert np.abs(f0.values - c0.values).max() < 1e-10

    def test_one_photon_odd(self, ref_grid):
        # node 0 of the half-open grid has no mirror partner
        f1 = fock_wave(1, ref_grid)
        assert np.abs(f1.values[1:] + f1.values[1:][::-1]).max() < 1e-9

    def test_orthogonality(self, ref_grid):
        f0 = fock_wave(0, ref_grid)
        f1 = fock_wave(1, ref_grid)
        overlap = (np.conj(f0.values) * f1.values).sum() * ref_grid.dq
        assert abs(overlap) < 1e-9

    def test_orthonormal_family(self, ref_grid):
        members = [fock_wave(n, ref_grid) for n in range(11)]
        for i, a in enumerate(members):
            for j, b in enumerate(members):
                overlap = (np.conj(a.values) * b.values).sum() * ref_grid.dq
                assert abs(overlap - (i == j)) < 1e-8

    def test_bounds(self, ref_grid):
        with pytest.raises(ConfigurationError):
            fock_wave(51, ref_grid)
        with pytest.raises(TruncationError):
            fock_wave(40, PositionGrid.from_span(-5, 5, 64))


class TestCat:
    def test_degenerate_is_vacuum(self, ref_grid):
        cat = cat_wave(CoherentParams(0), ref_grid)
        vac = coherent_wave(CoherentParams(0), ref_grid)
        assert np.abs(cat.values - vac.values).max() < 1e-10

    def test_normalized_and_symmetric(self, ref_grid):
        cat = cat_wave(CoherentParams(3), ref_grid)
        assert cat.norm_squared() == pytest.approx(1.0, abs=1e-9)
        assert abs(mean_q(cat)) < 1e-9

    def test_analytic_norm(self, ref_grid):
        assert coherent_cat_norm(3.0) == pytest.approx((2 + 2 * np.exp(-18.0)) ** -0.5,
                                                       abs=1e-15)
        # the grid normalization agrees with the analytic constant
        cat = cat_wave(CoherentParams(3), ref_grid)
        plus = coherent_wave(CoherentParams(3), ref_grid)
        minus = coherent_wave(CoherentParams(-3), ref_grid)
        rebuilt = coherent_cat_norm(3.0) * (plus.values + minus.values)
        assert np.abs(cat.values - rebuilt).max() < 1e-9


class TestPlaneWavePair:
    GRID = PositionGrid.from_span(-110, 110, 1024)

    def test_equal_momenta_rejected(self):
        with pytest.raises(ConfigurationError):
            PlaneWavePairParams(2.0, 2.0, 20.0)

    def test_narrow_window_rejected(self):
        with pytest.raises(ConfigurationError):
            plane_wave_pair(PlaneWavePairParams(-0.2, 0.2, 20.0), self.GRID)

    def test_span_guard(self, ref_grid):
        with pytest.raises(TruncationError):
            plane_wave_pair(PlaneWavePairParams(-2, 2, 20.0), ref_grid)

    def test_momentum_peaks(self):
        psi = plane_wave_pair(PlaneWavePairParams(-2, 2, 20.0), self.GRID)
        phi = forward_fourier(psi)
        dens = phi.momentum_density()
        peaks = phi.grid.p[dens > 0.5 * dens.max()]
        assert abs(peaks.min() + 2) <= phi.grid.dp
        assert abs(peaks.max() - 2) <= phi.grid.dp

    def test_position_fringes(self):
        psi = plane_wave_pair(PlaneWavePairParams(-2, 2, 20.0), self.GRID)
        dens = psi.position_density()
        # |psi|^2 ~ cos^2(q dp/2) * window: zeros where q * 4 = pi mod 2 pi
        g = self.GRID
        inner = np.abs(g.q) < 10
        expect = np.cos(g.q * 2.0) ** 2 * np.exp(-g.q ** 2 / 20.0 ** 2)
        expect *= dens[inner].max() / expect[inner].max()
        assert np.abs(dens[inner] - expect[inner]).max() < 1e-3 * dens.max()


class TestSqueezed:
    def test_zero_squeeze_is_coherent(self, ref_grid):
        sq = squeezed_coherent_wave(CoherentParams(1), SqueezeParams(0.0), ref_grid)
        co = coherent_wave(CoherentParams(1), ref_grid)
        assert np.abs(sq.values - co.values).max() < 1e-10

    def test_variance_law(self, ref_grid):
        squeezed = squeezed_coherent_wave(CoherentParams(0), SqueezeParams(0.5, 0.0),
                                          ref_grid)
        assert var_q(squeezed) == pytest.approx(np.exp(-1.0) / 2, abs=1e-6)
        anti = squeezed_coherent_wave(CoherentParams(0), SqueezeParams(0.5, np.pi),
                                      ref_grid)
        assert var_q(anti) == pytest.approx(np.exp(1.0) / 2, abs=1e-6)

    def test_phase_restriction(self, ref_grid):
        with pytest.raises(ConfigurationError):
            squeezed_coherent_wave(CoherentParams(0), SqueezeParams(0.5, 0.3), ref_grid)

    def test_params_hyperbolic_identity(self):
        p = SqueezeParams(1.3, 0.7)
        assert p.mu ** 2 - abs(p.nu) ** 2 == pytest.approx(1.0, abs=1e-12)


class TestSqueezedCat:
    def test_degenerate_is_vacuum(self, ref_grid):
        sc = squeezed_cat_wave(SqueezeParams(0.0), ref_grid)
        vac = coherent_wave(CoherentParams(0), ref_grid)
        assert np.abs(sc.values - vac.values).max() < 1e-10

    def test_even_parity(self, ref_grid):
        sc = squeezed_cat_wave(SqueezeParams(0.5), ref_grid)
        assert np.abs(sc.values[1:] - sc.values[1:][::-1]).max() < 1e-9

    def test_norm(self, ref_grid):
        sc = squeezed_cat_wave(SqueezeParams(0.9), ref_grid)
        assert sc.norm_squared() == pytest.approx(1.0, abs=1e-8)


class TestOracles:
    def test_coherent_wigner_peak(self):
        assert oracle_generalized_kr_coherent(0.7 + 0.2j, 0.7 + 0.2j, 0.0) \
            == pytest.approx(2 / np.pi)

    def test_vacuum_kr_value(self):
        assert oracle_generalized_kr_coherent(0, 0, 1.0) \
            == pytest.approx(np.sqrt(2) / np.pi)

    def test_real_axis_real_valued(self):
        vals = oracle_generalized_kr_coherent(np.linspace(-2, 2, 11), 0, 1.0)
        assert np.abs(vals.imag).max() < 1e-15

    @settings(max_examples=40, deadline=None)
    @given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-1.5, 1.5),
           st.floats(-3, 3))
    def test_conjugation_flip(self, x, y, a0, sigma):
        a = x + 1j * y
        left = np.conj(oracle_generalized_kr_coherent(a, a0, sigma))
        right = oracle_generalized_kr_coherent(a, a0, -sigma)
        assert abs(left - right) <= 1e-12 * max(1.0, abs(right))

    def test_cat_degenerate_matches_coherent(self):
        alphas = np.linspace(-1, 1, 7) + 0.3j
        for sigma in (0.0, 0.5, 1.0):
            cat = oracle_kr_cat(alphas, 0.0, sigma)
            coh = oracle_generalized_kr_coherent(alphas, 0.0, sigma)
            assert np.abs(cat - coh).max() < 1e-14

    def test_cat_wigner_origin(self):
        # sigma=0 at the origin: bracket = 2 e^{-2|a0|^2} + 2, prefactor
        # 2N^2/pi, hence exactly 2/pi
        assert oracle_kr_cat(0.0, 3.0, 0.0) == pytest.approx(2 / np.pi, abs=1e-12)

    def test_cat_interference_centers(self):
        # interference envelope centered at +- sigma * alpha0 on the Re axis
        x = np.linspace(-4, 4, 801)
        nn = coherent_cat_norm(3.0) ** 2
        for sigma in (0.5, 1.0):
            vals = oracle_kr_cat(x, 3.0, sigma)
            lobes = nn * (oracle_generalized_kr_coherent(x, 3.0, sigma)
                          + oracle_generalized_kr_coherent(x, -3.0, sigma))
            interference = np.abs(vals - lobes)
            assert abs(abs(x[np.argmax(interference)]) - sigma * 3.0) < 0.05

    def test_fock1_axes_vanish(self):
        assert abs(oracle_kr_fock1(1.7)) < 1e-15
        assert abs(oracle_kr_fock1(0.9j)) < 1e-15

    def test_fock1_spot_value(self):
        a = (1 + 1j) / np.sqrt(2)
        direct = (np.sqrt(2) / np.pi) * (a ** 2 - np.conj(a) ** 2) * np.exp(
            -abs(a) ** 2 - a ** 2 / 2 + np.conj(a) ** 2 / 2)
        assert oracle_kr_fock1(a) == pytest.approx(direct, abs=1e-15)
