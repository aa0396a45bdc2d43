import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nls1d.dynamics import SolverConfig, evolve
from nls1d.functionals import (
    AdmissiblePair,
    DiagnosticsRecord,
    SlabAccumulator,
    energy,
    energy_terms,
    is_admissible,
    l8_interval_split,
    mass,
    slab_norm,
)
from nls1d.spectral import ComplexField, make_grid


def gaussian(L=40.0, n=1024, A=1.0):
    g = make_grid(L, n)
    return ComplexField(g, A * np.exp(-g.x**2).astype(complex))


class TestMassEnergy:
    def test_zero(self):
        g = make_grid(10.0, 64)
        z = ComplexField(g, np.zeros(64, dtype=complex))
        assert mass(z) == 0.0
        assert energy(z, 3) == 0.0

    def test_constant_mass(self):
        g = make_grid(12.0, 64)
        u = ComplexField(g, np.full(64, 0.5 - 0.1j))
        assert mass(u) == pytest.approx(abs(0.5 - 0.1j) ** 2 * 12.0, rel=1e-13)

    def test_gaussian_mass(self):
        assert mass(gaussian()) == pytest.approx(math.sqrt(math.pi / 2), rel=1e-12)

    def test_single_mode_energy(self):
        g = make_grid(20.0, 256)
        A, j = 0.8, 6
        u = ComplexField(g, A * np.exp(1j * g.k[j] * g.x))
        terms = energy_terms(u, 3)
        assert terms.kinetic == pytest.approx(0.5 * A**2 * g.k[j] ** 2 * g.L, rel=1e-12)
        assert terms.potential == pytest.approx(A**8 * g.L / 8.0, rel=1e-12)
        assert terms.total == pytest.approx(terms.kinetic + terms.potential)

    def test_energy_conserved_under_evolution(self):
        u = gaussian(A=0.9)
        cfg = SolverConfig.from_k(3, dt=1e-3, T=1.0, diag_stride=0.5)
        es = [r.energy for r in evolve(u, cfg).records]
        assert max(abs(e - es[0]) for e in es) / es[0] < 1e-6


class TestAdmissible:
    def test_endpoint_pair(self):
        assert is_admissible(math.inf, 2)

    def test_diagonal_pair(self):
        assert is_admissible(6, 6)

    def test_non_admissible(self):
        assert not is_admissible(4, 4)

    def test_r_endpoint(self):
        assert is_admissible(4, math.inf)

    def test_r_below_two(self):
        assert not is_admissible(8, 1.5)

    def test_float_tolerance(self):
        assert is_admissible(6.0 + 1e-14, 6.0)

    def test_pair_type_validates(self):
        AdmissiblePair(8, 4)
        with pytest.raises(ValueError):
            AdmissiblePair(3, 12)

    @settings(max_examples=40, deadline=None)
    @given(r=st.floats(2.0, 64.0))
    def test_solving_for_q_is_admissible(self, r):
        q = 2.0 / (0.5 - 1.0 / r) if r > 2 else math.inf
        assert is_admissible(q, r)


class TestSlabAccumulator:
    def test_monotone_growth(self):
        acc = SlabAccumulator(q=8, r=8)
        values = []
        for i, v in enumerate([1.0, 0.9, 1.1, 0.5]):
            acc.push(0.1 * i, v)
            values.append(acc.value())
        assert all(b >= a - 1e-15 for a, b in zip(values, values[1:]))

    def test_rejects_nonincreasing_times(self):
        acc = SlabAccumulator(q=8, r=8)
        acc.push(0.0, 1.0)
        with pytest.raises(ValueError):
            acc.push(0.0, 1.0)

    def test_sup_norm_mode(self):
        acc = SlabAccumulator(q=math.inf, r=4)
        for i, v in enumerate([0.3, 0.9, 0.4]):
            acc.push(0.1 * i, v)
        assert acc.value() == 0.9


def constant_profile_trajectory(c=0.7, L=12.0, T=2.0, n_rec=41):
    """Records mimicking a constant-modulus field |u| = c on length L."""
    cfg = SolverConfig.from_k(3, dt=T / (n_rec - 1), T=T, diag_stride=T / (n_rec - 1))
    from nls1d.dynamics import Trajectory

    traj = Trajectory(config=cfg)
    for i in range(n_rec):
        t = i * T / (n_rec - 1)
        traj.records.append(
            DiagnosticsRecord(
                t=t,
                mass=c**2 * L,
                energy=0.0,
                hhalf=0.0,
                l8_density=c**8 * L,
                tail=0.0,
            )
        )
    return traj


class TestSlabNorm:
    def test_constant_profile(self):
        c, L, T = 0.7, 12.0, 2.0
        traj = constant_profile_trajectory(c, L, T)
        expect = c * L ** (1 / 8) * T ** (1 / 8)
        assert slab_norm(traj, 8, 8) == pytest.approx(expect, rel=1e-12)

    def test_zero_trajectory(self):
        traj = constant_profile_trajectory(0.0)
        assert slab_norm(traj, 8, 8) == 0.0

    def test_quadrature_refinement(self):
        u = gaussian()
        fine = SolverConfig.from_k(3, dt=1e-3, T=1.0, diag_stride=0.025, linear=True)
        coarse = SolverConfig.from_k(3, dt=1e-3, T=1.0, diag_stride=0.05, linear=True)
        a = slab_norm(evolve(u, coarse), 8, 8)
        b = slab_norm(evolve(u, fine), 8, 8)
        assert abs(a - b) / b < 1e-3

    def test_monotone_in_interval(self):
        u = gaussian()
        cfg1 = SolverConfig.from_k(3, dt=1e-2, T=0.5, diag_stride=0.05)
        cfg2 = SolverConfig.from_k(3, dt=1e-2, T=1.0, diag_stride=0.05)
        assert slab_norm(evolve(u, cfg1), 8, 8) <= slab_norm(evolve(u, cfg2), 8, 8)

    def test_hoelder_consistency(self):
        u = gaussian()
        cfg = SolverConfig.from_k(3, dt=1e-2, T=1.0, diag_stride=0.05)
        traj = evolve(u, cfg)
        sup8 = max(r.l8_density ** (1 / 8) for r in traj.records)
        assert slab_norm(traj, 8, 8) <= sup8 * 1.0 ** (1 / 8) * (1 + 1e-9)

    def test_general_r_needs_snapshots(self):
        u = gaussian()
        cfg = SolverConfig.from_k(3, dt=1e-2, T=0.2, diag_stride=0.1)
        bare = evolve(u, cfg)
        with pytest.raises(ValueError):
            slab_norm(bare, 6, 6)
        stored = evolve(u, cfg, snapshot_times="all")
        assert slab_norm(stored, 6, 6) > 0


class TestIntervalSplit:
    def test_single_interval_when_total_small(self):
        traj = constant_profile_trajectory(c=0.1, T=2.0)
        total = slab_norm(traj, 8, 8)
        intervals = l8_interval_split(traj, delta=2 * total)
        assert intervals == [(0.0, 2.0)]

    def test_constant_profile_count(self):
        c, L, T = 0.7, 12.0, 2.0
        traj = constant_profile_trajectory(c, L, T, n_rec=2001)
        total = slab_norm(traj, 8, 8)
        delta = total / 2 ** (1 / 8)  # aim for exactly 2 intervals
        intervals = l8_interval_split(traj, delta)
        assert abs(len(intervals) - (total / delta) ** 8) <= 1

    def test_cover_and_order(self):
        u = gaussian()
        cfg = SolverConfig.from_k(3, dt=1e-2, T=1.0, diag_stride=0.01)
        traj = evolve(u, cfg)
        total = slab_norm(traj, 8, 8)
        intervals = l8_interval_split(traj, total / 1.1)
        assert len(intervals) >= 2
        assert intervals[0][0] == 0.0
        assert intervals[-1][1] == pytest.approx(1.0)
        for (a0, b0), (a1, b1) in zip(intervals, intervals[1:]):
            assert b0 == a1 and a0 < b0

    def test_doubling_delta_never_increases_count(self):
        u = gaussian()
        cfg = SolverConfig.from_k(3, dt=1e-2, T=1.0, diag_stride=0.01)
        traj = evolve(u, cfg)
        total = slab_norm(traj, 8, 8)
        n1 = len(l8_interval_split(traj, total / 1.15))
        n2 = len(l8_interval_split(traj, 2 * total / 1.15))
        assert n2 <= n1

    def test_too_coarse_raises(self):
        traj = constant_profile_trajectory(c=0.7, T=2.0, n_rec=3)
        total = slab_norm(traj, 8, 8)
        with pytest.raises(ValueError):
            l8_interval_split(traj, total / 1.9)


class TestRecordCsv:
    def test_header_schema(self):
        from nls1d.functionals import CSV_COLUMNS

        assert CSV_COLUMNS == (
            "t",
            "mass",
            "energy",
            "hhalf",
            "l8_density",
            "morawetz_action",
            "modified_energy",
            "tail",
        )

    def test_optional_cells_empty(self):
        rec = DiagnosticsRecord(
            t=0.5, mass=1.0, energy=2.0, hhalf=0.5, l8_density=0.1, tail=1e-12
        )
        row = rec.to_csv_row()
        assert row.split(",")[5] == "" and row.split(",")[6] == ""
        assert len(row.split(",")) == 8

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            DiagnosticsRecord(t=0, mass=-1, energy=0, hhalf=0, l8_density=0, tail=0)
