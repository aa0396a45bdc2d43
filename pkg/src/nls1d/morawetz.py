"""Four-particle interaction functional M_a and its monotonicity audits.

M_a(t) = 2 Im int conj(w) grad a . grad w over the 4-fold tensor product
w(t, x1..x4) = prod_j u(t, x_j), with the convex weight
a(z) = sqrt(z2^2 + z3^2 + z4^2) evaluated after the fixed orthonormal
rotation z = A x.  Everything is integrated in x-coordinates via the
pullback grad_x a(Ax) = A^T (grad a)(Ax), which keeps the quadrature on a
tensor grid where w factorizes:

    conj(w) d_j w = c(x_j) * prod_{i != j} q(x_i),
    q = |u|^2,  c = conj(u) * u'.

The field is first downsampled by spectral truncation to ``n_sub`` points
(derivative computed on the downsampled field), optionally restricted to a
sub-box window, and handed to the selected inner-loop kernel backend.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from . import _kernels
from .spectral import ComplexField, lebesgue_norm, sobolev_norm

if TYPE_CHECKING:
    from .dynamics import Trajectory

__all__ = [
    "ROTATION",
    "MorawetzConfig",
    "MonotonicityReport",
    "weight_gradient",
    "downsample",
    "interaction_action",
    "action_bound_ratio",
    "monotonicity_audit",
    "integrated_audit",
]

# Orthonormal change of variables z = A x; entries are exact in binary.
ROTATION = 0.5 * np.array(
    [
        [1.0, 1.0, 1.0, 1.0],
        [1.0, 1.0, -1.0, -1.0],
        [1.0, -1.0, 1.0, -1.0],
        [-1.0, 1.0, 1.0, -1.0],
    ]
)
ROTATION.setflags(write=False)


def weight_gradient(z: np.ndarray) -> np.ndarray:
    """grad a(z) = (0, z2, z3, z4)/|z'|; zero vector on the singular set z' = 0."""
    z = np.asarray(z, dtype=float)
    if z.shape != (4,):
        raise ValueError("weight gradient expects a 4-vector")
    zp = z[1:]
    r = float(np.sqrt(np.sum(zp**2)))
    out = np.zeros(4)
    if r > 0.0:
        out[1:] = zp / r
    return out


@dataclass(frozen=True)
class MorawetzConfig:
    """Quadrature parameters for the interaction functional.

    ``n_sub``: downsampled points per axis (n_sub^4 total evaluations).
    ``window``: optional sub-box half-width; only points with |x| <= window
    enter the sum (valid when the field's mass is captured by the window).
    ``singular_policy``: handling of z' = 0; only "zero" is implemented
    (the integrand is bounded there, so zeroing is a measure-zero-on-grid
    perturbation quantified by the refinement oracle).
    """

    n_sub: int = 48
    window: float | None = None
    singular_policy: str = "zero"
    max_points: float = 2.0e8
    downsample_loss_tol: float = 1e-4
    tail_budget: float = 1e-6
    boundary_budget: float = 1e-6
    quad_rtol: float = 1e-3

    def __post_init__(self) -> None:
        if self.n_sub < 8 or self.n_sub % 2 != 0:
            raise ValueError("n_sub must be an even integer >= 8")
        if float(self.n_sub) ** 4 > self.max_points:
            raise ValueError(
                f"n_sub={self.n_sub} means {self.n_sub**4:.2e} evaluations, "
                f"over the budget of {self.max_points:.2e}"
            )
        if self.singular_policy != "zero":
            raise ValueError(f"unknown singular policy {self.singular_policy!r}")
        if self.window is not None and not self.window > 0:
            raise ValueError("window half-width must be positive")


@dataclass(frozen=True)
class _SubGrid:
    """Grid1D-compatible view at a non-dyadic point count (internal)."""

    L: float
    n: int

    def __post_init__(self) -> None:
        dx = self.L / self.n
        object.__setattr__(self, "dx", dx)
        object.__setattr__(self, "x", -0.5 * self.L + dx * np.arange(self.n))
        object.__setattr__(self, "k", 2.0 * np.pi * np.fft.fftfreq(self.n, d=dx))

    @property
    def k_max(self) -> float:
        return np.pi * self.n / self.L


def downsample(field_: ComplexField, n_sub: int) -> ComplexField:
    """Spectral truncation of the field to ``n_sub`` points on the same torus."""
    n = field_.grid.n
    if n_sub > n:
        raise ValueError(f"cannot downsample {n} points to {n_sub}")
    if n_sub == n:
        return field_
    hat = np.fft.fft(field_.samples)
    half = n_sub // 2
    sub_hat = np.concatenate((hat[:half], hat[n - half :]))
    # +-Nyquist of the coarse grid alias onto one slot; sum keeps the
    # truncation equal to sampling the low-pass interpolant (real stays real)
    sub_hat[half] += hat[half]
    sub = np.fft.ifft(sub_hat * (n_sub / n))
    return ComplexField(_SubGrid(field_.grid.L, n_sub), sub, field_.t)


def _check_preconditions(field_: ComplexField, cfg: MorawetzConfig) -> None:
    tail = field_.spectral_tail()
    if tail > cfg.tail_budget:
        raise ValueError(f"spectral tail {tail:.3e} exceeds budget {cfg.tail_budget:.1e}")
    boundary = field_.boundary_mass()
    if boundary > cfg.boundary_budget:
        raise ValueError(
            f"boundary mass {boundary:.3e} exceeds budget {cfg.boundary_budget:.1e}"
        )


def interaction_action(field_: ComplexField, cfg: MorawetzConfig) -> float:
    """M_a of the field by tensor-grid quadrature (see module docstring)."""
    _check_preconditions(field_, cfg)
    total2 = float(np.sum(np.abs(field_.samples) ** 2) * field_.grid.dx)
    if total2 == 0.0:
        return 0.0
    sub = downsample(field_, cfg.n_sub)
    sub2 = float(np.sum(np.abs(sub.samples) ** 2) * sub.grid.dx)
    loss = abs(math.sqrt(sub2) - math.sqrt(total2)) / math.sqrt(total2)
    if loss > cfg.downsample_loss_tol:
        raise ValueError(
            f"downsampling to n_sub={cfg.n_sub} loses {loss:.3e} of the L2 norm "
            f"(tolerance {cfg.downsample_loss_tol:.1e}); increase n_sub"
        )
    u = sub.samples
    dk = sub.grid.k.copy()
    dk[cfg.n_sub // 2] = 0.0  # odd derivative: drop the unpaired Nyquist mode
    du = np.fft.ifft(1j * dk * np.fft.fft(u))
    q = np.abs(u) ** 2
    c = np.conj(u) * du
    x = sub.grid.x
    if cfg.window is not None:
        keep = np.abs(x) <= cfg.window
        inside = float(np.sum(q[keep]) * sub.grid.dx)
        missed = 1.0 - inside / sub2 if sub2 > 0 else 0.0
        # a missed mass fraction eps perturbs the integral by O(eps), below
        # the quadrature floor as long as it stays within the same tolerance
        if missed > cfg.downsample_loss_tol:
            raise ValueError(
                f"window {cfg.window} misses mass fraction {missed:.3e} "
                f"(> {cfg.downsample_loss_tol:.1e}); widen the window"
            )
        x, q, c = x[keep], q[keep], c[keep]
    acc = _kernels.accumulate(x, q, c)
    return 2.0 * sub.grid.dx**4 * acc.imag


def action_bound_ratio(field_: ComplexField, cfg: MorawetzConfig) -> float:
    """|M_a| / (4 ||u||_{Hdot^{1/2}}^2 ||u||_2^6); 0 for the zero field.

    The denominator is the sharp final step of the boundedness chain; the
    remaining Hardy/interpolation step contributes an implicit constant, so
    audits assert an empirically stable bound rather than <= 1.
    """
    l2 = lebesgue_norm(field_, 2)
    if l2 == 0.0:
        return 0.0
    hhalf = sobolev_norm(field_, 0.5, homogeneous=True)
    if hhalf == 0.0:
        return 0.0
    ma = interaction_action(field_, cfg)
    return abs(ma) / (4.0 * hhalf**2 * l2**6)


@dataclass(frozen=True)
class MonotonicityReport:
    """Central-difference audit of dM_a/dt >= 8*pi*int|u|^8.

    ``defects[i] = dM_a/dt(t_i) - 8*pi*l8(t_i)`` at interior record times;
    passes when ``min_defect >= -tol_mono``.  ``empirical_constant`` is the
    smallest observed (dM_a/dt)/int|u|^8, informing the 8*pi-vs-16*pi gap.
    """

    t_samples: list[float]
    ma_values: list[float]
    defects: list[float]
    min_defect: float
    tol_mono: float
    empirical_constant: float
    integrated_lhs: float
    integrated_rhs: float

    @property
    def passed(self) -> bool:
        return self.min_defect >= -self.tol_mono

    @property
    def integrated_passed(self) -> bool:
        return self.integrated_lhs >= self.integrated_rhs - self.tol_mono * (
            self.t_samples[-1] - self.t_samples[0]
        )

    def to_json(self) -> str:
        return json.dumps(
            {
                "t_samples": self.t_samples,
                "M_a": self.ma_values,
                "defects": self.defects,
                "min_defect": self.min_defect,
                "tol_mono": self.tol_mono,
                "empirical_constant": self.empirical_constant,
                "integrated_lhs": self.integrated_lhs,
                "integrated_rhs": self.integrated_rhs,
                "passed": self.passed and self.integrated_passed,
            },
            sort_keys=True,
        )


def monotonicity_audit(traj: "Trajectory", quad_rtol: float = 1e-3) -> MonotonicityReport:
    """Audit the monotonicity claim on a trajectory carrying M_a samples.

    tol_mono combines the second-order finite-difference error (scale set
    by third differences of M_a) with the per-sample quadrature error
    estimate ``quad_rtol * max|M_a|`` propagated through the stencil.
    """
    recs = [r for r in traj.records if r.morawetz_action is not None]
    if len(recs) < 3:
        raise ValueError("monotonicity audit needs M_a at >= 3 consecutive times")
    t = np.asarray([r.t for r in recs])
    ma = np.asarray([r.morawetz_action for r in recs])
    l8 = np.asarray([r.l8_density for r in recs])
    dt = np.diff(t)
    if not np.allclose(dt, dt[0], rtol=1e-9, atol=0.0):
        raise ValueError("M_a samples must be uniformly spaced in time")
    h = float(dt[0])

    dma = (ma[2:] - ma[:-2]) / (2.0 * h)
    defects = dma - 8.0 * math.pi * l8[1:-1]

    if len(ma) >= 4:
        third = np.abs(np.diff(ma, n=3)) / h**3
        scale3 = float(np.max(third)) if third.size else 0.0
    else:
        scale3 = 0.0
    quad_term = quad_rtol * float(np.max(np.abs(ma))) / h
    tol_mono = 5.0 * h**2 * scale3 + quad_term

    positive = l8[1:-1] > 0
    if np.any(positive):
        cstar = float(np.min(dma[positive] / l8[1:-1][positive]))
    else:
        cstar = math.inf

    # integrated form: M_a(end) - M_a(start) >= 8 pi int int |u|^8 dx dt
    lhs = float(ma[-1] - ma[0])
    rhs = 8.0 * math.pi * float(np.trapezoid(l8, t))
    return MonotonicityReport(
        t_samples=[float(v) for v in t[1:-1]],
        ma_values=[float(v) for v in ma],
        defects=[float(v) for v in defects],
        min_defect=float(np.min(defects)),
        tol_mono=float(tol_mono),
        empirical_constant=cstar,
        integrated_lhs=lhs,
        integrated_rhs=rhs,
    )


def integrated_audit(traj: "Trajectory") -> float:
    """int int |u|^8 divided by (sup_t ||u||_{Hdot^{1/2}}^2) * mass(u0)^3.

    The trajectory-level form of the spacetime bound; audits assert the
    ratio is stable under refinement and bounded by the empirical constant.
    """
    recs = traj.records
    if len(recs) < 2:
        raise ValueError("integrated audit needs at least two records")
    t = np.asarray([r.t for r in recs])
    l8 = np.asarray([r.l8_density for r in recs])
    sup_hhalf = max(r.hhalf for r in recs)
    mass0 = recs[0].mass
    denom = sup_hhalf**2 * mass0**3
    if denom == 0.0:
        return 0.0
    return float(np.trapezoid(l8, t)) / denom
