"""Interaction-picture diagnostics: pullbacks, Cauchy tests, residuals.

The pullback v(t) = e^{-it Laplacian} u(t) is constant in time exactly when
the evolution is free; for a scattering solution it converges, and the
final pullback doubles as the scattering-state estimate (the truncation is
quantified by the horizon-refinement comparison rather than by a second
time integration of the interaction term).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .dynamics import free_propagate
from .functionals import mass
from .spectral import ComplexField, sobolev_norm

if TYPE_CHECKING:
    from .dynamics import Trajectory

__all__ = [
    "pullback",
    "ScatteringReport",
    "cauchy_audit",
    "scattering_state",
    "global_l8_budget",
]


def pullback(field_: ComplexField) -> ComplexField:
    """v(t) = e^{-it Laplacian} u(t); keeps t as metadata on the result."""
    if field_.t == 0.0:
        return field_
    moved = free_propagate(field_, -field_.t)
    return ComplexField(field_.grid, moved.samples, field_.t)


def _diff_norm(a: ComplexField, b: ComplexField, s: float) -> float:
    diff = ComplexField(a.grid, a.samples - b.samples, a.t)
    return sobolev_norm(diff, s, homogeneous=False)


@dataclass(frozen=True)
class ScatteringReport:
    """Pullback distance matrix, scattering-state residual curve, verdict.

    ``conclusive`` is False when the Cauchy decay precondition failed, in
    which case ``residuals`` may be empty; this is a report state, not an
    error.
    """

    times: list[float]
    distance_matrix: list[list[float]]
    residuals: list[float]
    decay_ratio: float
    conclusive: bool
    s: float
    u_plus: ComplexField | None = None

    def to_json(self) -> str:
        return json.dumps(
            {
                "times": self.times,
                "distance_matrix": self.distance_matrix,
                "residuals": self.residuals,
                "decay_ratio": self.decay_ratio,
                "conclusive": self.conclusive,
                "s": self.s,
            },
            sort_keys=True,
        )


def _snapshots_sorted(traj: "Trajectory") -> list[ComplexField]:
    return [traj.snapshots[t] for t in sorted(traj.snapshots)]


def cauchy_audit(traj: "Trajectory", s: float = 1.0) -> ScatteringReport:
    """Distance matrix d(i,j) = ||v(t_i) - v(t_j)||_{H^s} over snapshots.

    ``decay_ratio`` compares the last consecutive gap to the first; a
    scattering run shows d(i, i+1) shrinking as the window moves out.
    """
    snaps = _snapshots_sorted(traj)
    if len(snaps) < 4:
        raise ValueError("Cauchy audit needs at least 4 stored snapshots")
    vs = [pullback(f) for f in snaps]
    times = [f.t for f in snaps]
    n = len(vs)
    d = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d[i, j] = d[j, i] = _diff_norm(vs[i], vs[j], s)
    first = d[0, 1]
    last = d[n - 2, n - 1]
    ratio = last / first if first > 0 else 0.0
    return ScatteringReport(
        times=times,
        distance_matrix=d.tolist(),
        residuals=[],
        decay_ratio=float(ratio),
        conclusive=ratio < 1.0,
        s=s,
    )


def scattering_state(traj: "Trajectory", s: float = 1.0) -> ScatteringReport:
    """Estimate u_plus = v(T_final) and the residual curve r(t).

    r(t_i) = ||u(t_i) - e^{i t_i Laplacian} u_plus||_{H^s}, evaluated by
    actually propagating u_plus forward (no pullback shortcut), so
    r(T_final) = 0 certifies the propagator round-trip as well.  Marked
    inconclusive (no exception) when the Cauchy decay precondition fails.
    """
    base = cauchy_audit(traj, s=s)
    snaps = _snapshots_sorted(traj)
    if not base.conclusive:
        return base
    u_plus = ComplexField(snaps[-1].grid, pullback(snaps[-1]).samples, 0.0)
    residuals = []
    for f in snaps:
        freely = free_propagate(u_plus, f.t)
        residuals.append(_diff_norm(f, freely, s))
    return ScatteringReport(
        times=base.times,
        distance_matrix=base.distance_matrix,
        residuals=residuals,
        decay_ratio=base.decay_ratio,
        conclusive=True,
        s=s,
        u_plus=u_plus,
    )


def global_l8_budget(traj: "Trajectory") -> tuple[float, float]:
    """Two normalizations of the slab L^8 norm of a trajectory.

    Returns (slab / ||u0||_{H^1}, slab / (||u0||_2^{3/4} (sup_t Hdot^{1/2})^{1/4})).
    The second is the eighth root of the integrated-audit ratio, so the two
    bookkeepings must agree across modules.
    """
    from .functionals import slab_norm

    recs = traj.records
    if len(recs) < 2:
        raise ValueError("budget needs at least two records")
    slab = slab_norm(traj, 8, 8)
    u0 = traj.snapshot_at(recs[0].t)
    if u0 is None:
        raise ValueError("budget needs the initial snapshot stored")
    h1 = sobolev_norm(u0, 1.0, homogeneous=False)
    l2 = math.sqrt(mass(u0))
    sup_hhalf = max(r.hhalf for r in recs)
    r1 = slab / h1 if h1 > 0 else 0.0
    denom = l2 ** (3.0 / 4.0) * sup_hhalf ** (1.0 / 4.0)
    r2 = slab / denom if denom > 0 else 0.0
    return r1, r2
