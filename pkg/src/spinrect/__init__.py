"""Steady-state spin transport and rectification on boundary-driven 2D
spin-1/2 lattices.

The package builds anisotropic exchange models on small two-dimensional
lattices, couples boundary columns to magnetization reservoirs through a
Lindblad master equation, finds the non-equilibrium steady state either by
Krylov time propagation or by a direct null-space solve, and measures bond
currents and the rectification coefficient under drive reversal.
"""

from .lattice import (
    FieldAssignment,
    FieldKind,
    GeometryKind,
    LatticeError,
    LatticeSpec,
    assign_field,
    build_geometry,
    enumerate_small_geometries,
    mirror_permutation,
    six_site_triangle,
)
from .liouville import (
    Liouvillian,
    apply_liouvillian,
    build_liouvillian,
    devectorize,
    vectorize,
)
from .operators import (
    DriveDirection,
    DriveMode,
    DriveSpec,
    ModelParams,
    OperatorError,
    build_hamiltonian,
    build_jump_operators,
    current_observable,
    embed_site_operator,
    total_sz,
)
from .steady import (
    DegenerateSteadyStateError,
    KrylovError,
    NessSolution,
    PropagationOptions,
    SteadyStateError,
    evolve_to_ness,
    maximally_mixed,
    rk4_propagate,
    solve_ness_dense,
    stationarity_residual,
)
from .transport import (
    CurrentReport,
    MeasurementError,
    NotConvergedError,
    RectificationResult,
    SweepRow,
    bond_currents,
    column_current,
    expectation,
    rectification_coefficient,
    solve_steady_state,
    sweep,
)

__version__ = "0.1.0"
