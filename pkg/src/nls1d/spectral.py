"""Periodic grids, Fourier multipliers, dyadic projections, and norms.

Conventions (fixed for the whole package)
-----------------------------------------
* The spatial domain is the torus ``[-L/2, L/2)`` sampled at ``n`` uniform
  points, ``x_j = -L/2 + j*dx`` with ``dx = L/n``.
* Angular wavenumbers ``k_j = 2*pi*j/L`` for ``j in {-n/2, ..., n/2-1}``,
  stored DC-first (standard DFT layout): index ``i`` carries ``j = i`` for
  ``i < n/2`` and ``j = i - n`` otherwise; the Nyquist mode sits at
  ``i = n/2`` with ``k = -pi*n/L``.
* Differentiation acts as ``d/dx <-> i*k``, so the Laplacian has symbol
  ``-k**2``, the fractional derivative ``|grad|^s`` has symbol ``|k|^s``,
  and the free propagator over time ``t`` has symbol ``exp(-1j*t*k**2)``.
* Symbol values at ``k = 0``: ``|0|**0 := 1`` (so ``s = 0`` is the
  identity) and ``|0|**s := 0`` for ``s > 0``.
* Physical-space integrals use the rectangle rule ``sum(...) * dx``, which
  is spectrally accurate for smooth periodic integrands.  With the NumPy
  DFT normalization this makes ``sum(|u_j|^2)*dx == sum(|uhat|^2)*L/n**2``
  (Plancherel).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np

__all__ = [
    "Grid1D",
    "ComplexField",
    "SymbolSpec",
    "BernsteinReport",
    "phi_bump",
    "make_grid",
    "apply_symbol",
    "lp_project",
    "sobolev_norm",
    "lebesgue_norm",
    "bernstein_audit",
    "identity_symbol",
    "fractional_derivative_symbol",
    "bessel_symbol",
    "free_phase_symbol",
    "lp_symbol",
]


def phi_bump(rho: np.ndarray | float) -> np.ndarray:
    """Radial bump: 1 on [0, 1], 0 on [2, inf), cos^2(pi*(rho-1)/2) between.

    C^1, monotone nonincreasing, and satisfies the exact partition
    ``phi + (1 - phi) = 1`` used by the dyadic projections.
    """
    rho = np.abs(np.asarray(rho, dtype=float))
    out = np.zeros_like(rho)
    out[rho <= 1.0] = 1.0
    band = (rho > 1.0) & (rho < 2.0)
    out[band] = np.cos(0.5 * np.pi * (rho[band] - 1.0)) ** 2
    return out


@dataclass(frozen=True)
class Grid1D:
    """Uniform periodic grid on ``[-L/2, L/2)``.

    ``n`` must be a power of two (>= 16) so that dyadic experiments and the
    FFT stay on friendly sizes.  ``x``, ``k`` are precomputed sample points
    and angular wavenumbers (DC-first ordering).
    """

    L: float
    n: int
    dx: float = field(init=False)
    x: np.ndarray = field(init=False, repr=False)
    k: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not self.L > 0:
            raise ValueError(f"grid length must be positive, got {self.L}")
        if self.n < 16 or self.n & (self.n - 1) != 0:
            raise ValueError(f"point count must be a power of two >= 16, got {self.n}")
        dx = self.L / self.n
        object.__setattr__(self, "dx", dx)
        x = -0.5 * self.L + dx * np.arange(self.n)
        k = 2.0 * np.pi * np.fft.fftfreq(self.n, d=dx)
        x.setflags(write=False)
        k.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "k", k)

    @property
    def k_max(self) -> float:
        """Nyquist wavenumber pi*n/L."""
        return np.pi * self.n / self.L


def make_grid(L: float, n: int) -> Grid1D:
    """Construct a grid; see :class:`Grid1D` for the validation rules."""
    return Grid1D(L=float(L), n=int(n))


@dataclass(frozen=True)
class ComplexField:
    """Complex samples of u(t, .) on a grid, stamped with simulation time."""

    grid: Grid1D
    samples: np.ndarray
    t: float = 0.0

    def __post_init__(self) -> None:
        samples = np.ascontiguousarray(self.samples, dtype=np.complex128)
        if samples.shape != (self.grid.n,):
            raise ValueError(
                f"samples shape {samples.shape} does not match grid n={self.grid.n}"
            )
        if not np.all(np.isfinite(samples.view(np.float64))):
            raise ValueError("field samples contain NaN or Inf")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    def with_samples(self, samples: np.ndarray, t: float | None = None) -> "ComplexField":
        return ComplexField(self.grid, samples, self.t if t is None else t)

    def spectral_tail(self) -> float:
        """||u restricted to |k| > k_max/2||_2 / ||u||_2 (sharp cutoff).

        Under-resolution indicator: a well-resolved field has essentially no
        content in the outer half of the spectrum.
        """
        hat = np.fft.fft(self.samples)
        total = float(np.sum(np.abs(hat) ** 2))
        if total == 0.0:
            return 0.0
        outer = np.abs(self.grid.k) > 0.5 * self.grid.k_max
        return math.sqrt(float(np.sum(np.abs(hat[outer]) ** 2)) / total)

    def boundary_mass(self) -> float:
        """||u restricted to |x| > L/4||_2 / ||u||_2 (torus-vs-line indicator)."""
        a2 = np.abs(self.samples) ** 2
        total = float(np.sum(a2))
        if total == 0.0:
            return 0.0
        outer = np.abs(self.grid.x) > 0.25 * self.grid.L
        return math.sqrt(float(np.sum(a2[outer])) / total)


@dataclass(frozen=True)
class SymbolSpec:
    """A Fourier multiplier: a total map from angular wavenumber to C.

    ``order`` is optional homogeneity metadata (``|k|^s`` has order ``s``);
    purely informational.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    order: float | None = None

    def values_on(self, grid: Grid1D) -> np.ndarray:
        vals = np.asarray(self.evaluator(grid.k))
        if vals.shape != grid.k.shape:
            raise ValueError("symbol evaluator must return one value per wavenumber")
        if not np.all(np.isfinite(vals)):
            raise ValueError("symbol evaluates to NaN/Inf on a grid wavenumber")
        return vals


def _abs_power(k: np.ndarray, s: float) -> np.ndarray:
    """|k|^s with |0|^0 := 1 and |0|^s := 0 for s > 0 (error for s < 0 at 0)."""
    a = np.abs(k)
    if s == 0.0:
        return np.ones_like(a)
    with np.errstate(divide="ignore"):
        out = a**s
    if s > 0:
        out[a == 0.0] = 0.0
    return out


def identity_symbol() -> SymbolSpec:
    return SymbolSpec(lambda k: np.ones_like(k), order=0.0)


def fractional_derivative_symbol(s: float) -> SymbolSpec:
    """|grad|^s, i.e. the multiplier |k|^s."""
    return SymbolSpec(lambda k: _abs_power(k, s), order=s)


def bessel_symbol(s: float) -> SymbolSpec:
    """<grad>^s = (1 + |grad|^2)^{s/2}, i.e. the multiplier (1 + k^2)^{s/2}."""
    return SymbolSpec(lambda k: (1.0 + k**2) ** (0.5 * s), order=s)


def free_phase_symbol(t: float) -> SymbolSpec:
    """Free Schroedinger propagator over time t: exp(-1j*t*k^2)."""
    return SymbolSpec(lambda k: np.exp(-1j * t * k**2))


def lp_symbol(N: float, mode: Literal["at_N", "leq_N", "gt_N"]) -> SymbolSpec:
    """Dyadic projection multiplier built from :func:`phi_bump`."""
    if not N > 0:
        raise ValueError(f"dyadic scale must be positive, got N={N}")
    if mode == "leq_N":
        return SymbolSpec(lambda k: phi_bump(k / N))
    if mode == "gt_N":
        return SymbolSpec(lambda k: 1.0 - phi_bump(k / N))
    if mode == "at_N":
        return SymbolSpec(lambda k: phi_bump(k / N) - phi_bump(2.0 * k / N))
    raise ValueError(f"unknown projection mode {mode!r}")


def apply_symbol(field: ComplexField, symbol: SymbolSpec) -> ComplexField:
    """Apply a Fourier multiplier: ifft(symbol(k) * fft(u)).

    The input is untouched and the time stamp is preserved.
    """
    vals = symbol.values_on(field.grid)
    out = np.fft.ifft(vals * np.fft.fft(field.samples))
    return ComplexField(field.grid, out, field.t)


def lp_project(
    field: ComplexField, N: float, mode: Literal["at_N", "leq_N", "gt_N"]
) -> ComplexField:
    """Littlewood-Paley projection at dyadic scale N.

    ``leq_N`` and ``gt_N`` use the exact partition ``phi`` / ``1 - phi``, so
    their sum reproduces the field to machine precision.
    """
    return apply_symbol(field, lp_symbol(N, mode))


def _spectral_weights(grid: Grid1D, s: float, homogeneous: bool) -> np.ndarray:
    if homogeneous:
        return _abs_power(grid.k, s)
    return (1.0 + grid.k**2) ** (0.5 * s)


def sobolev_norm(field: ComplexField, s: float, homogeneous: bool = True) -> float:
    """H^s (inhomogeneous) or Hdot^s (homogeneous) norm via Plancherel.

    Normalized so that ``s = 0`` reproduces the L^2 norm.  A homogeneous
    norm with ``s < 0`` requires a vanishing mean (the DC weight would be
    infinite); in that case the DC mode is checked and then dropped.
    """
    hat = np.fft.fft(field.samples)
    grid = field.grid
    if homogeneous and s < 0:
        total = math.sqrt(float(np.sum(np.abs(hat) ** 2)))
        if total > 0 and abs(hat[0]) > 1e-12 * total:
            raise ValueError("negative-order homogeneous norm requires zero mean")
        hat = hat.copy()
        hat[0] = 0.0
        w = np.abs(grid.k)
        w[0] = 1.0  # dropped mode; weight arbitrary
        weights = w**s
    else:
        weights = _spectral_weights(grid, s, homogeneous)
    norm2 = float(np.sum(weights**2 * np.abs(hat) ** 2)) * grid.L / grid.n**2
    return math.sqrt(max(norm2, 0.0))


def lebesgue_norm(field: ComplexField, r: float) -> float:
    """L^r norm by the rectangle rule; ``r = inf`` returns the sample max."""
    if r < 1:
        raise ValueError(f"Lebesgue exponent must be >= 1, got {r}")
    a = np.abs(field.samples)
    if math.isinf(r):
        return float(a.max()) if a.size else 0.0
    return float(np.sum(a**r) * field.grid.dx) ** (1.0 / r)


_BERNSTEIN_LABELS = (
    "high_pass_smoothing",
    "low_pass_derivative",
    "band_derivative",
    "low_pass_embedding",
    "band_embedding",
)


@dataclass(frozen=True)
class BernsteinReport:
    """LHS/RHS ratios for the five dyadic norm comparisons.

    NaN marks a 0/0 pair (projection annihilated the field); callers skip
    those entries.  Ratio order matches ``labels``.
    """

    N: float
    s: float
    p: float
    q: float
    ratios: tuple[float, float, float, float, float]
    labels: tuple[str, ...] = _BERNSTEIN_LABELS

    def finite_ratios(self) -> list[float]:
        return [r for r in self.ratios if not math.isnan(r)]


def _ratio(lhs: float, rhs: float) -> float:
    if rhs == 0.0:
        return math.nan if lhs < 1e-300 else math.inf
    return lhs / rhs


def bernstein_audit(
    field: ComplexField, N: float, s: float, p: float, q: float
) -> BernsteinReport:
    """Evaluate both sides of the five frequency-localized inequalities.

    1. ||P_{>=N} f||_p        vs  N^{-s} || |grad|^s P_{>=N} f ||_p
    2. || |grad|^s P_{<=N} f||_p  vs  N^{s} || P_{<=N} f ||_p
    3. || |grad|^s P_N f||_p  vs  N^{s} || P_N f ||_p   (two-sided in theory)
    4. || P_{<=N} f ||_q      vs  N^{1/p - 1/q} || P_{<=N} f ||_p
    5. || P_N f ||_q          vs  N^{1/p - 1/q} || P_N f ||_p

    ``P_{>=N}`` passes ``|k| >= N`` fully and kills ``|k| <= N/2`` (smooth
    edge), consistent with the dyadic family used everywhere else.
    """
    if s <= 0:
        raise ValueError(f"smoothing order must be positive, got s={s}")
    if not (1 <= p <= q):
        raise ValueError(f"need 1 <= p <= q, got p={p}, q={q}")
    geq = apply_symbol(field, SymbolSpec(lambda k: 1.0 - phi_bump(2.0 * k / N)))
    leq = lp_project(field, N, "leq_N")
    band = lp_project(field, N, "at_N")
    ds = fractional_derivative_symbol(s)
    gap = N ** (1.0 / p - (0.0 if math.isinf(q) else 1.0 / q))

    r1 = _ratio(lebesgue_norm(geq, p), N ** (-s) * lebesgue_norm(apply_symbol(geq, ds), p))
    r2 = _ratio(lebesgue_norm(apply_symbol(leq, ds), p), N**s * lebesgue_norm(leq, p))
    r3 = _ratio(lebesgue_norm(apply_symbol(band, ds), p), N**s * lebesgue_norm(band, p))
    r4 = _ratio(lebesgue_norm(leq, q), gap * lebesgue_norm(leq, p))
    r5 = _ratio(lebesgue_norm(band, q), gap * lebesgue_norm(band, p))
    return BernsteinReport(N=N, s=s, p=p, q=q, ratios=(r1, r2, r3, r4, r5))
