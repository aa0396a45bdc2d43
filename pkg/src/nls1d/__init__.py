"""Pseudospectral solver and estimate-audit toolkit for the 1D defocusing NLS.

i u_t + u_xx = |u|^{2p} u on a large periodic torus, with diagnostics for
conservation laws, the four-particle interaction functional, smoothed-energy
almost-conservation, and scattering behavior.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .dynamics import (
    BlowupError,
    SolverConfig,
    Trajectory,
    dispersive_audit,
    evolve,
    free_propagate,
    nonlinear_phase_step,
    strang_step,
)
from .functionals import (
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
from .imethod import (
    IMultiplier,
    RescaleParams,
    apply_I,
    i_property_audit,
    increment_sweep,
    lambda_for_small_energy,
    m_symbol,
    modified_energy,
    rescale,
)
from .initial_data import InitialDataSpec, generate_initial_data
from .morawetz import (
    ROTATION,
    MorawetzConfig,
    action_bound_ratio,
    integrated_audit,
    interaction_action,
    monotonicity_audit,
    weight_gradient,
)
from .scattering import ScatteringReport, cauchy_audit, global_l8_budget, pullback, scattering_state
from .spectral import (
    ComplexField,
    Grid1D,
    SymbolSpec,
    apply_symbol,
    bernstein_audit,
    lebesgue_norm,
    lp_project,
    make_grid,
    phi_bump,
    sobolev_norm,
)

__version__ = "0.1.0"
