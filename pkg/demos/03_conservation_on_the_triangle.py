"""Current conservation on the six-site triangular wedge.

At the steady state the summed current crossing every inter-column cut is
the same number J, vertical bonds carry canceling currents, and each
undriven site has zero net outflow.

Run:  python demos/03_conservation_on_the_triangle.py
"""

from spinrect import (
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
params = ModelParams(delta=1.0, field=assign_field(spec, FieldKind.ASCENDING_LR, 1.0, 1.0))
sol = solve_steady_state(spec, params, DriveSpec())
print(f"steady state found by the {sol.method} route, residual {sol.residual:.2e}\n")

report = bond_currents(sol.state, spec, params.alpha)
print("oriented bond currents (low column -> high column):")
for (k, j), value in sorted(report.bond_currents.items()):
    tag = "vertical " if spec.column_of(k) == spec.column_of(j) else "transport"
    print(f"  {k} -> {j}  ({tag}): {value:+.6f}")

print("\ncut sums (must all agree):")
for c, total in enumerate(report.column_sums, start=1):
    print(f"  columns {c} -> {c + 1}: {total:+.8f}")
j, resid = column_current(report)
print(f"common current J = {j:.8f}, homogeneity residual {resid:.2e}")

print("\nnet outflow of the undriven sites (zero at stationarity):")
for site, div in report.divergence.items():
    print(f"  site {site}: {div:+.2e}")
