"""Conserved quantities, spacetime slab norms, and admissible-pair checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, NamedTuple

import numpy as np

from .spectral import ComplexField, lebesgue_norm

if TYPE_CHECKING:
    from .dynamics import Trajectory

__all__ = [
    "mass",
    "energy",
    "energy_terms",
    "EnergyTerms",
    "AdmissiblePair",
    "is_admissible",
    "SlabAccumulator",
    "DiagnosticsRecord",
    "CSV_COLUMNS",
    "slab_norm",
    "l8_interval_split",
]


def mass(field_: ComplexField) -> float:
    """M[u] = ||u||_2^2, by the rectangle rule."""
    return float(np.sum(np.abs(field_.samples) ** 2) * field_.grid.dx)


class EnergyTerms(NamedTuple):
    kinetic: float
    potential: float

    @property
    def total(self) -> float:
        return self.kinetic + self.potential


def energy_terms(field_: ComplexField, p: float) -> EnergyTerms:
    """Kinetic and potential parts of the defocusing energy.

    E[u] = 1/2 ||u_x||_2^2 + 1/(2p+2) ||u||_{2p+2}^{2p+2}, with the gradient
    term evaluated spectrally (multiplier i*k) and the potential term by
    quadrature.  ``p`` is the nonlinearity exponent (integer k in the
    monomial case |u|^{2k} u).
    """
    grid = field_.grid
    hat = np.fft.fft(field_.samples)
    kinetic = 0.5 * float(np.sum(grid.k**2 * np.abs(hat) ** 2)) * grid.L / grid.n**2
    r = 2.0 * p + 2.0
    potential = float(np.sum(np.abs(field_.samples) ** r)) * grid.dx / r
    return EnergyTerms(kinetic=kinetic, potential=potential)


def energy(field_: ComplexField, p: float) -> float:
    return energy_terms(field_, p).total


def _half_sum(q: float, r: float) -> bool:
    """Exact check of 2/q + 1/r == 1/2 (1/inf := 0), rationally when possible."""
    qi = 0.0 if math.isinf(q) else None
    ri = 0.0 if math.isinf(r) else None
    if (qi is not None or float(q).is_integer()) and (ri is not None or float(r).is_integer()):
        s = Fraction(0)
        s += Fraction(2, int(q)) if qi is None else Fraction(0)
        s += Fraction(1, int(r)) if ri is None else Fraction(0)
        return s == Fraction(1, 2)
    lhs = (0.0 if math.isinf(q) else 2.0 / q) + (0.0 if math.isinf(r) else 1.0 / r)
    return abs(lhs - 0.5) <= 1e-12


def is_admissible(q: float, r: float) -> bool:
    """Schroedinger-admissible pair in 1D: 2/q + 1/r = 1/2, 2 <= r <= inf."""
    if q < 1 or r < 1:
        return False
    if r < 2:
        return False
    return _half_sum(q, r)


@dataclass(frozen=True)
class AdmissiblePair:
    """A validated admissible exponent pair (q, r)."""

    q: float
    r: float

    def __post_init__(self) -> None:
        if not is_admissible(self.q, self.r):
            raise ValueError(f"({self.q}, {self.r}) is not an admissible pair")


@dataclass
class SlabAccumulator:
    """Running L^q_t L^r_x estimate fed with (t, ||u(t)||_r) samples.

    Uses the composite trapezoid rule in time; the value is nondecreasing
    as the slab grows (q < inf).
    """

    q: float
    r: float
    times: list[float] = field(default_factory=list)
    norms: list[float] = field(default_factory=list)

    def push(self, t: float, norm_r: float) -> None:
        if self.times and t <= self.times[-1]:
            raise ValueError("sample times must be strictly increasing")
        if norm_r < 0:
            raise ValueError("norms must be nonnegative")
        self.times.append(float(t))
        self.norms.append(float(norm_r))

    def value(self) -> float:
        if not self.times:
            return 0.0
        if math.isinf(self.q):
            return max(self.norms)
        if len(self.times) < 2:
            return 0.0
        powered = np.asarray(self.norms) ** self.q
        return float(np.trapezoid(powered, np.asarray(self.times))) ** (1.0 / self.q)


CSV_COLUMNS = (
    "t",
    "mass",
    "energy",
    "hhalf",
    "l8_density",
    "morawetz_action",
    "modified_energy",
    "tail",
)


@dataclass(frozen=True)
class DiagnosticsRecord:
    """Per-time-sample scalar diagnostics.

    ``morawetz_action`` and ``modified_energy`` are optional; ``boundary``
    is an extra torus-truncation indicator that is not part of the fixed
    CSV schema.
    """

    t: float
    mass: float
    energy: float
    hhalf: float
    l8_density: float
    tail: float
    morawetz_action: float | None = None
    modified_energy: float | None = None
    boundary: float = 0.0

    def __post_init__(self) -> None:
        for name in ("mass", "energy", "hhalf", "l8_density"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")

    def to_csv_row(self) -> str:
        def fmt(v: float | None) -> str:
            return "" if v is None else repr(float(v))

        return ",".join(
            (
                fmt(self.t),
                fmt(self.mass),
                fmt(self.energy),
                fmt(self.hhalf),
                fmt(self.l8_density),
                fmt(self.morawetz_action),
                fmt(self.modified_energy),
                fmt(self.tail),
            )
        )


def _r_norms(traj: "Trajectory", r: float) -> tuple[list[float], list[float]]:
    """(times, ||u(t)||_r) at record times, from records (r=8) or snapshots."""
    times = [rec.t for rec in traj.records]
    if r == 8:
        return times, [rec.l8_density ** (1.0 / 8.0) for rec in traj.records]
    missing = [t for t in times if traj.snapshot_at(t) is None]
    if missing:
        raise ValueError(
            f"L^{r} samples need stored snapshots; missing at t={missing[:3]}..."
        )
    return times, [lebesgue_norm(traj.snapshot_at(t), r) for t in times]


def slab_norm(traj: "Trajectory", q: float, r: float) -> float:
    """L^q_t L^r_x norm of a trajectory over its full time range."""
    if len(traj.records) < 2:
        raise ValueError("slab norm needs at least two diagnostic records")
    times, norms = _r_norms(traj, r)
    acc = SlabAccumulator(q=q, r=r)
    for t, v in zip(times, norms):
        acc.push(t, v)
    return acc.value()


def l8_interval_split(traj: "Trajectory", delta: float) -> list[tuple[float, float]]:
    """Greedy partition of [0, T] into slabs of L^8_{t,x} norm at most delta.

    Every slab except possibly the last is filled to at least delta/2; a
    record grid too coarse to land in [delta/2, delta] raises.
    Returns the list of (t_start, t_end) boundaries.
    """
    if not delta > 0:
        raise ValueError("threshold must be positive")
    if len(traj.records) < 2:
        raise ValueError("interval split needs at least two records")
    times = np.asarray([rec.t for rec in traj.records])
    dens = np.asarray([rec.l8_density for rec in traj.records])
    # cumulative trapezoid of the L^8 density: C(t) = int_0^t ||u||_8^8
    cum = np.concatenate(([0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(times))))
    target = delta**8
    intervals: list[tuple[float, float]] = []
    i = 0
    while i < len(times) - 1:
        base = cum[i]
        j = i + 1
        while j < len(times) - 1 and cum[j + 1] - base <= target:
            j += 1
        filled = cum[j] - base
        if filled > target:
            raise ValueError(
                "record grid too coarse to resolve a split point; refine diag_stride"
            )
        if j < len(times) - 1 and filled < (delta / 2.0) ** 8:
            raise ValueError(
                "record grid too coarse: one step overshoots the fill window"
            )
        intervals.append((float(times[i]), float(times[j])))
        i = j
    return intervals
