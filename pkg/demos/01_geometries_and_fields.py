"""Tour of the built-in lattices: columns, bonds, reservoirs, field profiles.

Run:  python demos/01_geometries_and_fields.py
"""

from spinrect import (
    FieldKind,
    GeometryKind,
    assign_field,
    build_geometry,
    mirror_permutation,
)


def sketch(spec):
    """Columns left to right, one bracket per column."""
    parts = []
    for c in range(1, spec.n_columns + 1):
        parts.append("[" + " ".join(str(s) for s in spec.column_sites(c)) + "]")
    return "  ".join(parts)


for kind in (GeometryKind.TRIANGULAR10, GeometryKind.ASYM8,
             GeometryKind.SYM10, GeometryKind.SYM9):
    spec = build_geometry(kind)
    print(f"=== {kind.value} ===")
    print(f"  sites: {spec.n_sites}, columns {spec.column_sizes}: {sketch(spec)}")
    print(f"  bonds ({len(spec.bonds)}): {sorted(spec.bonds)}")
    left = ", ".join(f"{s} (gamma={g:g})" for s, g in spec.left_reservoir)
    right = ", ".join(f"{s} (gamma={g:g})" for s, g in spec.right_reservoir)
    print(f"  reservoirs: left {left} | right {right}")

    for fk in (FieldKind.ASCENDING_LR, FieldKind.ASCENDING_RL):
        fa = assign_field(spec, fk, 1.0, 1.0)
        per_col = [fa.values[spec.column_sites(c)[0] - 1]
                   for c in range(1, spec.n_columns + 1)]
        print(f"  field {fk.value:13s}: per-column {per_col}")

    perm = mirror_permutation(spec)
    if perm is None:
        print("  mirror symmetry: none (geometrically asymmetric)")
    else:
        print(f"  mirror symmetry: site permutation {perm}")
    print()
