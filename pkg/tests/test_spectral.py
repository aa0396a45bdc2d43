import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nls1d.spectral import (
    ComplexField,
    SymbolSpec,
    apply_symbol,
    bernstein_audit,
    bessel_symbol,
    fractional_derivative_symbol,
    identity_symbol,
    lebesgue_norm,
    lp_project,
    make_grid,
    phi_bump,
    sobolev_norm,
)


def gaussian_field(L=40.0, n=1024):
    g = make_grid(L, n)
    return ComplexField(g, np.exp(-g.x**2).astype(complex))


def single_mode(g, j, A=1.0):
    return ComplexField(g, A * np.exp(1j * g.k[j] * g.x))


class TestGrid:
    def test_wavenumbers(self):
        g = make_grid(2 * np.pi, 16)
        assert g.k[0] == 0.0
        assert g.k[1] == pytest.approx(1.0, abs=1e-15)

    def test_nyquist(self):
        g = make_grid(40.0, 512)
        assert np.max(np.abs(g.k)) == pytest.approx(np.pi * 512 / 40, rel=1e-14)

    def test_spacing_consistency(self):
        g = make_grid(17.5, 64)
        assert g.dx * g.n == pytest.approx(g.L, rel=1e-15)
        # antisymmetric about zero except the (negative) Nyquist mode
        assert np.allclose(np.sort(g.k[1 : g.n // 2]), np.sort(-g.k[g.n // 2 + 1 :]))

    @pytest.mark.parametrize("n", [12, 100, 8, 0])
    def test_rejects_bad_counts(self, n):
        with pytest.raises(ValueError):
            make_grid(10.0, n)

    def test_rejects_bad_length(self):
        with pytest.raises(ValueError):
            make_grid(-1.0, 64)

    def test_roundtrip_fft(self):
        g = make_grid(20.0, 128)
        rng = np.random.Generator(np.random.Philox(3))
        u = rng.standard_normal(128) + 1j * rng.standard_normal(128)
        back = np.fft.ifft(np.fft.fft(u))
        assert np.max(np.abs(back - u)) < 1e-12 * np.max(np.abs(u))


class TestField:
    def test_rejects_nan(self):
        g = make_grid(10.0, 16)
        bad = np.ones(16, dtype=complex)
        bad[3] = np.nan
        with pytest.raises(ValueError):
            ComplexField(g, bad)

    def test_rejects_wrong_shape(self):
        g = make_grid(10.0, 16)
        with pytest.raises(ValueError):
            ComplexField(g, np.ones(17, dtype=complex))

    def test_tail_of_smooth_field(self):
        assert gaussian_field().spectral_tail() < 1e-12

    def test_tail_of_nyquist_heavy_field(self):
        g = make_grid(10.0, 64)
        u = single_mode(g, 30)  # near-Nyquist mode
        assert u.spectral_tail() == pytest.approx(1.0, abs=1e-12)

    def test_zero_field_indicators(self):
        g = make_grid(10.0, 16)
        z = ComplexField(g, np.zeros(16, dtype=complex))
        assert z.spectral_tail() == 0.0
        assert z.boundary_mass() == 0.0


class TestSymbols:
    def test_identity(self):
        u = gaussian_field()
        out = apply_symbol(u, identity_symbol())
        assert np.max(np.abs(out.samples - u.samples)) < 1e-13

    def test_zeroth_power_is_identity(self):
        u = gaussian_field()
        out = apply_symbol(u, fractional_derivative_symbol(0.0))
        assert np.max(np.abs(out.samples - u.samples)) < 1e-13

    def test_single_mode_eigenfunction(self):
        g = make_grid(20.0, 256)
        u = single_mode(g, 5)
        out = apply_symbol(u, fractional_derivative_symbol(1.0))
        assert np.allclose(out.samples, abs(g.k[5]) * u.samples, atol=1e-12)

    def test_nan_symbol_rejected(self):
        u = gaussian_field()
        bad = SymbolSpec(lambda k: np.where(k == 0, np.nan, 1.0))
        with pytest.raises(ValueError):
            apply_symbol(u, bad)

    def test_timestamp_preserved(self):
        g = make_grid(20.0, 64)
        u = ComplexField(g, np.ones(64, dtype=complex), t=1.25)
        assert apply_symbol(u, bessel_symbol(0.3)).t == 1.25

    @settings(max_examples=25, deadline=None)
    @given(
        a=st.floats(-2, 2),
        b=st.floats(-2, 2),
        s=st.floats(0.1, 1.5),
    )
    def test_linearity(self, a, b, s):
        g = make_grid(10.0, 64)
        rng = np.random.Generator(np.random.Philox(11))
        u = ComplexField(g, rng.standard_normal(64) + 1j * rng.standard_normal(64))
        v = ComplexField(g, rng.standard_normal(64) + 1j * rng.standard_normal(64))
        sym = fractional_derivative_symbol(s)
        lhs = apply_symbol(ComplexField(g, a * u.samples + b * v.samples), sym).samples
        rhs = a * apply_symbol(u, sym).samples + b * apply_symbol(v, sym).samples
        assert np.max(np.abs(lhs - rhs)) < 1e-12 * (1 + np.max(np.abs(rhs)))


class TestBump:
    def test_plateau_and_support(self):
        assert phi_bump(0.0) == 1.0
        assert phi_bump(1.0) == 1.0
        assert phi_bump(2.0) == 0.0
        assert phi_bump(3.5) == 0.0

    def test_range_and_monotone(self):
        rho = np.linspace(0, 3, 301)
        vals = phi_bump(rho)
        assert np.all(vals >= 0) and np.all(vals <= 1)
        assert np.all(np.diff(vals) <= 1e-15)


class TestProjections:
    def test_partition_of_unity(self):
        u = gaussian_field()
        lo = lp_project(u, 4.0, "leq_N")
        hi = lp_project(u, 4.0, "gt_N")
        err = np.max(np.abs(lo.samples + hi.samples - u.samples))
        assert err < 1e-13

    def test_low_mode_passthrough(self):
        g = make_grid(20.0, 256)
        u = single_mode(g, 3)
        out = lp_project(u, 2.0 * abs(g.k[3]), "leq_N")
        assert np.max(np.abs(out.samples - u.samples)) < 1e-12

    def test_high_mode_killed(self):
        g = make_grid(20.0, 256)
        u = single_mode(g, 40)
        out = lp_project(u, abs(g.k[40]) / 2.0, "leq_N")
        assert np.max(np.abs(out.samples)) < 1e-12

    def test_nested_projection_composition(self):
        # P_{<=M} P_{<=N} = P_{<=M} whenever 2M <= N
        g = make_grid(20.0, 512)
        rng = np.random.Generator(np.random.Philox(5))
        u = ComplexField(g, rng.standard_normal(512) + 1j * rng.standard_normal(512))
        M, N = 4.0, 8.0
        once = lp_project(u, M, "leq_N")
        twice = lp_project(lp_project(u, N, "leq_N"), M, "leq_N")
        assert np.max(np.abs(once.samples - twice.samples)) < 1e-12

    def test_rejects_bad_scale(self):
        with pytest.raises(ValueError):
            lp_project(gaussian_field(), -1.0, "leq_N")


class TestNorms:
    def test_plancherel(self):
        u = gaussian_field()
        assert sobolev_norm(u, 0.0) == pytest.approx(lebesgue_norm(u, 2), rel=1e-12)

    def test_single_mode_sobolev(self):
        g = make_grid(20.0, 256)
        A, j, s = 1.7, 9, 0.75
        u = single_mode(g, j, A)
        expect = A * abs(g.k[j]) ** s * math.sqrt(g.L)
        assert sobolev_norm(u, s) == pytest.approx(expect, rel=1e-12)
        winh = (1 + g.k[j] ** 2) ** (s / 2)
        assert sobolev_norm(u, s, homogeneous=False) == pytest.approx(
            A * winh * math.sqrt(g.L), rel=1e-12
        )

    def test_gaussian_hhalf_against_quadrature(self):
        # oracle: Riemann sum of the continuum integral (1/2pi) int |k||uhat|^2
        # at 4x resolution, with uhat from the analytic transform
        u = gaussian_field(L=40.0, n=1024)
        fine_k = 2 * np.pi * np.fft.fftfreq(4096, d=40.0 / 4096)
        dk = 2 * np.pi / 40.0
        uhat = np.sqrt(np.pi) * np.exp(-fine_k**2 / 4.0)
        # grid spectrum only carries multiples of 2pi/L, so sum those
        mask = np.isclose(fine_k / dk, np.round(fine_k / dk), atol=1e-9)
        oracle2 = np.sum(np.abs(fine_k[mask]) * uhat[mask] ** 2) * dk / (2 * np.pi)
        assert sobolev_norm(u, 0.5) == pytest.approx(math.sqrt(oracle2), rel=1e-6)

    def test_gaussian_hhalf_continuum_value(self):
        # analytic line value is exactly 1; the tori differ by the k-space
        # rectangle-rule kink correction ~ (2pi/L)^2/24
        for L, n in ((40.0, 1024), (80.0, 2048)):
            g = make_grid(L, n)
            u = ComplexField(g, np.exp(-g.x**2).astype(complex))
            gap = abs(sobolev_norm(u, 0.5) - 1.0)
            assert gap < 1.1 * (2 * np.pi / L) ** 2 / 24.0

    def test_negative_order_requires_zero_mean(self):
        g = make_grid(20.0, 64)
        u = ComplexField(g, np.ones(64, dtype=complex))
        with pytest.raises(ValueError):
            sobolev_norm(u, -0.5)

    def test_negative_order_mean_free(self):
        g = make_grid(20.0, 256)
        u = single_mode(g, 4)
        s = -0.5
        expect = abs(g.k[4]) ** s * math.sqrt(g.L)
        assert sobolev_norm(u, s) == pytest.approx(expect, rel=1e-12)

    def test_lebesgue_constant_field(self):
        g = make_grid(12.0, 64)
        u = ComplexField(g, np.full(64, 0.5 + 0.5j))
        c = abs(0.5 + 0.5j)
        assert lebesgue_norm(u, 8) == pytest.approx(c * 12.0 ** (1 / 8), rel=1e-12)
        assert lebesgue_norm(u, math.inf) == pytest.approx(c, rel=1e-15)

    def test_lebesgue_zero_field(self):
        g = make_grid(12.0, 64)
        z = ComplexField(g, np.zeros(64, dtype=complex))
        for r in (1, 2, 8, math.inf):
            assert lebesgue_norm(z, r) == 0.0

    def test_lebesgue_gaussian_l2(self):
        # (int e^{-2x^2})^{1/2} = (pi/2)^{1/4}
        assert lebesgue_norm(gaussian_field(), 2) == pytest.approx(
            (np.pi / 2) ** 0.25, rel=1e-12
        )

    def test_lebesgue_gaussian_l8(self):
        assert lebesgue_norm(gaussian_field(), 8) == pytest.approx(
            (np.sqrt(np.pi / 8)) ** (1 / 8), rel=1e-10
        )

    def test_rejects_r_below_one(self):
        with pytest.raises(ValueError):
            lebesgue_norm(gaussian_field(), 0.5)


class TestBernstein:
    def make_band_field(self, seed=0):
        g = make_grid(16.0, 2048)
        rng = np.random.Generator(np.random.Philox(seed))
        hat = np.zeros(2048, dtype=complex)
        live = (np.abs(g.k) > 0.2) & (np.abs(g.k) < 150.0)
        hat[live] = rng.standard_normal(live.sum()) + 1j * rng.standard_normal(live.sum())
        hat *= (1 + g.k**2) ** (-0.5)
        return ComplexField(g, np.fft.ifft(hat))

    def test_ratios_bounded_over_sweep(self):
        caps = np.zeros(5)
        for seed in range(10):
            f = self.make_band_field(seed)
            for N in (4.0, 8.0, 16.0, 32.0):
                rep = bernstein_audit(f, N, 0.5, 2, 4)
                for j, r in enumerate(rep.ratios):
                    if not math.isnan(r):
                        caps[j] = max(caps[j], r)
        assert np.all(caps < 5.0)
        assert np.all(caps > 0.0)

    def test_single_mode_band_ratio_near_one(self):
        g = make_grid(16.0, 2048)
        j = 64
        N = abs(g.k[j])
        u = ComplexField(g, np.exp(1j * g.k[j] * g.x))
        rep = bernstein_audit(u, N, 0.5, 2, 4)
        assert 0.5 <= rep.ratios[2] <= 2.0

    def test_zero_field_gives_nan_sentinels(self):
        g = make_grid(16.0, 64)
        z = ComplexField(g, np.zeros(64, dtype=complex))
        rep = bernstein_audit(z, 4.0, 0.5, 2, 4)
        assert all(math.isnan(r) for r in rep.ratios)
        assert rep.finite_ratios() == []

    def test_rejects_bad_exponents(self):
        with pytest.raises(ValueError):
            bernstein_audit(gaussian_field(), 4.0, 0.5, 4, 2)
        with pytest.raises(ValueError):
            bernstein_audit(gaussian_field(), 4.0, -1.0, 2, 4)
