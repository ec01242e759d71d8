"""Collective right-side reservoirs and their dark states.

Replacing the per-site drains with one collective jump on the whole right
column changes the dissipator's range: superpositions orthogonal to the
collective mode are no longer damped.  On the six-site wedge this makes
the stationary manifold degenerate, which the dense null-space solver
detects and refuses; time propagation still converges, to the particular
steady state selected by the initial condition.

Run:  python demos/06_collective_drains.py
"""

from spinrect import (
    DegenerateSteadyStateError,
    DriveDirection,
    DriveMode,
    DriveSpec,
    FieldKind,
    ModelParams,
    assign_field,
    bond_currents,
    column_current,
    six_site_triangle,
    solve_steady_state,
)

spec = six_site_triangle()
params = ModelParams(delta=0.5, field=assign_field(spec, FieldKind.ASCENDING_LR, 1.0, 1.0))

for mode in (DriveMode.SEPARATE, DriveMode.COLLECTIVE_UNIFORM, DriveMode.COLLECTIVE_PHASED):
    drive = DriveSpec(mode, DriveDirection.FORWARD)
    print(f"=== {mode.value} ===")
    try:
        dense = solve_steady_state(spec, params, drive, method="dense")
        print(f"  dense solve: unique steady state, residual {dense.residual:.2e}")
        state = dense.state
    except DegenerateSteadyStateError as err:
        print(f"  dense solve refused: {err}")
        prop = solve_steady_state(spec, params, drive, method="propagation")
        print(f"  propagation from the maximally mixed state converged, "
              f"residual {prop.residual:.2e}")
        state = prop.state
    j, _ = column_current(bond_currents(state, spec, params.alpha))
    print(f"  steady current J = {j:+.6f}\n")
