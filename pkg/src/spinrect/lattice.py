"""Lattice geometries, reservoir placements and magnetic-field profiles.

A lattice is a set of spin-1/2 sites arranged in columns, a bond graph
connecting them, and two groups of reservoir attachments on the boundary
columns.  Everything downstream (Hamiltonians, dissipators, currents) is
derived from the :class:`LatticeSpec` built here.

Site indexing is column-major: sites are numbered 1..N going top-to-bottom
within a column, columns left to right.  This fixes the tensor-product
ordering of all operators.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum

__all__ = [
    "LatticeError",
    "LatticeSpec",
    "GeometryKind",
    "FieldKind",
    "FieldAssignment",
    "build_geometry",
    "assign_field",
    "enumerate_small_geometries",
    "mirror_permutation",
    "six_site_triangle",
]


class LatticeError(ValueError):
    """A lattice description violates one of its structural invariants."""


def _canonical_bond(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class LatticeSpec:
    """Immutable description of a lattice with boundary reservoirs.

    Parameters
    ----------
    n_sites
        Number of spin sites N.
    sites
        ``sites[k]`` is the ``(column, row)`` position of site ``k+1``;
        both indices start at 1.
    bonds
        Unordered pairs of interacting sites.  Bonds must join sites in
        the same column (vertical) or in adjacent columns (transport).
    left_reservoir, right_reservoir
        ``(site, gamma)`` attachments; left sites must lie in the leftmost
        column, right sites in the rightmost, and the two sets must be
        disjoint.
    """

    n_sites: int
    sites: tuple[tuple[int, int], ...]
    bonds: frozenset[tuple[int, int]]
    left_reservoir: tuple[tuple[int, float], ...] = ()
    right_reservoir: tuple[tuple[int, float], ...] = ()

    def __post_init__(self):
        if self.n_sites < 1:
            raise LatticeError("lattice needs at least one site")
        if len(self.sites) != self.n_sites:
            raise LatticeError(
                f"got {len(self.sites)} site positions for n_sites={self.n_sites}"
            )
        if any(c < 1 or r < 1 for c, r in self.sites):
            raise LatticeError("column and row indices start at 1")
        if len(set(self.sites)) != self.n_sites:
            raise LatticeError("two sites occupy the same (column, row) position")
        if self.n_columns < 2:
            raise LatticeError("boundary-driven lattice needs at least two columns")

        for i, j in self.bonds:
            if not (1 <= i <= self.n_sites and 1 <= j <= self.n_sites):
                raise LatticeError(f"bond ({i},{j}) has an endpoint outside 1..{self.n_sites}")
            if i == j:
                raise LatticeError(f"self-bond on site {i}")
            if (i, j) != _canonical_bond(i, j):
                raise LatticeError(f"bond ({i},{j}) is not stored as (low, high)")
            if abs(self.column_of(i) - self.column_of(j)) > 1:
                raise LatticeError(
                    f"bond ({i},{j}) links non-adjacent columns "
                    f"{self.column_of(i)} and {self.column_of(j)}"
                )
        if not self._connected():
            raise LatticeError("bond graph is not connected")

        cmin, cmax = self.leftmost_column, self.rightmost_column
        for s, g in self.left_reservoir:
            if self.column_of(s) != cmin:
                raise LatticeError(f"left reservoir site {s} is not in the leftmost column")
            if g <= 0:
                raise LatticeError(f"reservoir coupling on site {s} must be positive")
        for s, g in self.right_reservoir:
            if self.column_of(s) != cmax:
                raise LatticeError(f"right reservoir site {s} is not in the rightmost column")
            if g <= 0:
                raise LatticeError(f"reservoir coupling on site {s} must be positive")
        left_sites = [s for s, _ in self.left_reservoir]
        right_sites = [s for s, _ in self.right_reservoir]
        if len(set(left_sites)) != len(left_sites) or len(set(right_sites)) != len(right_sites):
            raise LatticeError("duplicate reservoir attachment")
        if set(left_sites) & set(right_sites):
            raise LatticeError("left and right reservoirs share a site")

    # -- geometry helpers ------------------------------------------------

    def column_of(self, site: int) -> int:
        return self.sites[site - 1][0]

    def row_of(self, site: int) -> int:
        return self.sites[site - 1][1]

    @property
    def n_columns(self) -> int:
        return max(c for c, _ in self.sites)

    @property
    def leftmost_column(self) -> int:
        return min(c for c, _ in self.sites)

    @property
    def rightmost_column(self) -> int:
        return max(c for c, _ in self.sites)

    def column_sites(self, c: int) -> tuple[int, ...]:
        """Sites in column ``c``, ordered by row."""
        return tuple(
            s for s in sorted(range(1, self.n_sites + 1), key=lambda s: self.row_of(s))
            if self.column_of(s) == c
        )

    @property
    def column_sizes(self) -> tuple[int, ...]:
        return tuple(
            len(self.column_sites(c))
            for c in range(self.leftmost_column, self.rightmost_column + 1)
        )

    def oriented_bonds(self) -> tuple[tuple[int, int], ...]:
        """All bonds oriented low column -> high column (low row -> high
        row for vertical bonds), sorted."""
        out = []
        for i, j in self.bonds:
            ci, cj = self.column_of(i), self.column_of(j)
            if ci < cj or (ci == cj and self.row_of(i) < self.row_of(j)):
                out.append((i, j))
            else:
                out.append((j, i))
        return tuple(sorted(out))

    def cut_bonds(self, c: int) -> tuple[tuple[int, int], ...]:
        """Oriented transport bonds crossing from column ``c`` to ``c+1``."""
        return tuple(
            (k, j) for k, j in self.oriented_bonds()
            if self.column_of(k) == c and self.column_of(j) == c + 1
        )

    def neighbors(self, site: int) -> tuple[int, ...]:
        return tuple(sorted(
            j if i == site else i for i, j in self.bonds if site in (i, j)
        ))

    @property
    def reservoir_sites(self) -> frozenset[int]:
        return frozenset(s for s, _ in self.left_reservoir + self.right_reservoir)

    @property
    def interior_sites(self) -> tuple[int, ...]:
        """Sites not attached to any reservoir."""
        res = self.reservoir_sites
        return tuple(s for s in range(1, self.n_sites + 1) if s not in res)

    def _connected(self) -> bool:
        if self.n_sites == 1:
            return True
        adj: dict[int, set[int]] = {s: set() for s in range(1, self.n_sites + 1)}
        for i, j in self.bonds:
            adj[i].add(j)
            adj[j].add(i)
        seen = {1}
        stack = [1]
        while stack:
            for nb in adj[stack.pop()]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        return len(seen) == self.n_sites


class GeometryKind(Enum):
    """The four named lattices plus a marker for user-supplied ones."""

    TRIANGULAR10 = "triangular10"   # columns (1,2,3,4), 1 left / 4 right reservoirs
    ASYM8 = "asym8"                 # columns (1,2,3,2), 1 left / 2 right
    SYM10 = "sym10"                 # columns (2,2,2,2,2), 2 left / 2 right
    SYM9 = "sym9"                   # columns (3,3,3), 3 left / 3 right
    CUSTOM = "custom"


def _column_major_sites(column_sizes: tuple[int, ...]) -> tuple[tuple[int, int], ...]:
    return tuple(
        (c + 1, r + 1) for c, size in enumerate(column_sizes) for r in range(size)
    )


def _triangular_bonds(column_sizes: tuple[int, ...]) -> frozenset[tuple[int, int]]:
    """Vertical bonds within each column plus diagonals from each site at
    row r to rows r and r+1 of the next column (where those rows exist)."""
    sites = _column_major_sites(column_sizes)
    index = {pos: k + 1 for k, pos in enumerate(sites)}
    bonds = set()
    for (c, r), s in index.items():
        if (c, r + 1) in index:
            bonds.add(_canonical_bond(s, index[(c, r + 1)]))
        for dr in (0, 1):
            if (c + 1, r + dr) in index:
                bonds.add(_canonical_bond(s, index[(c + 1, r + dr)]))
    return frozenset(bonds)


def _rectangular_bonds(column_sizes: tuple[int, ...]) -> frozenset[tuple[int, int]]:
    """Square-lattice nearest neighbours: vertical within columns,
    horizontal between same-row sites of adjacent columns."""
    sites = _column_major_sites(column_sizes)
    index = {pos: k + 1 for k, pos in enumerate(sites)}
    bonds = set()
    for (c, r), s in index.items():
        if (c, r + 1) in index:
            bonds.add(_canonical_bond(s, index[(c, r + 1)]))
        if (c + 1, r) in index:
            bonds.add(_canonical_bond(s, index[(c + 1, r)]))
    return frozenset(bonds)


def _named_geometry(kind: GeometryKind) -> LatticeSpec:
    if kind is GeometryKind.TRIANGULAR10:
        cols = (1, 2, 3, 4)
        bonds = _triangular_bonds(cols)
        left = ((1, 1.0),)
        right = tuple((s, 0.25) for s in (7, 8, 9, 10))
    elif kind is GeometryKind.ASYM8:
        cols = (1, 2, 3, 2)
        bonds = _triangular_bonds(cols)
        left = ((1, 1.0),)
        right = tuple((s, 0.5) for s in (7, 8))
    elif kind is GeometryKind.SYM10:
        cols = (2, 2, 2, 2, 2)
        bonds = _rectangular_bonds(cols)
        left = tuple((s, 1.0) for s in (1, 2))
        right = tuple((s, 1.0) for s in (9, 10))
    elif kind is GeometryKind.SYM9:
        cols = (3, 3, 3)
        bonds = _rectangular_bonds(cols)
        left = tuple((s, 1.0) for s in (1, 2, 3))
        right = tuple((s, 1.0) for s in (7, 8, 9))
    else:
        raise LatticeError(f"no named geometry for {kind}")
    return LatticeSpec(
        n_sites=sum(cols),
        sites=_column_major_sites(cols),
        bonds=bonds,
        left_reservoir=left,
        right_reservoir=right,
    )


def build_geometry(kind: GeometryKind | LatticeSpec) -> LatticeSpec:
    """Return the lattice for one of the named geometries, or validate and
    pass through a custom :class:`LatticeSpec`.

    Custom specs are re-validated so callers get a structural error naming
    the violated invariant rather than garbage downstream.
    """
    if isinstance(kind, LatticeSpec):
        # reconstruct to re-run validation on externally built instances
        return LatticeSpec(
            n_sites=kind.n_sites,
            sites=kind.sites,
            bonds=kind.bonds,
            left_reservoir=kind.left_reservoir,
            right_reservoir=kind.right_reservoir,
        )
    if kind is GeometryKind.CUSTOM:
        raise LatticeError("pass the custom LatticeSpec itself, not GeometryKind.CUSTOM")
    return _named_geometry(kind)


def six_site_triangle(
    gamma_left: float = 1.0, gamma_right: float = 1.0 / 3.0
) -> LatticeSpec:
    """The six-site triangular wedge with columns (1, 2, 3), one reservoir
    on the left tip and one on each of the three right sites."""
    cols = (1, 2, 3)
    return LatticeSpec(
        n_sites=6,
        sites=_column_major_sites(cols),
        bonds=_triangular_bonds(cols),
        left_reservoir=((1, gamma_left),),
        right_reservoir=tuple((s, gamma_right) for s in (4, 5, 6)),
    )


# -- magnetic fields ----------------------------------------------------


class FieldKind(Enum):
    HOMOGENEOUS = "homogeneous"
    ASCENDING_LR = "ascending_lr"   # grows column by column, left to right
    ASCENDING_RL = "ascending_rl"   # grows column by column, right to left


@dataclass(frozen=True)
class FieldAssignment:
    """Per-site longitudinal field values h_i (in units of the exchange
    coupling), constant within each column."""

    kind: FieldKind
    h0: float
    step: float
    values: tuple[float, ...]

    def reversed_profile(self) -> "FieldAssignment":
        """The same profile with the column direction flipped."""
        flip = {
            FieldKind.ASCENDING_LR: FieldKind.ASCENDING_RL,
            FieldKind.ASCENDING_RL: FieldKind.ASCENDING_LR,
            FieldKind.HOMOGENEOUS: FieldKind.HOMOGENEOUS,
        }
        return FieldAssignment(flip[self.kind], self.h0, self.step, self.values[::-1])


def assign_field(
    spec: LatticeSpec, kind: FieldKind, h0: float, step: float = 1.0
) -> FieldAssignment:
    """Assign a field value to every site of ``spec``.

    ``HOMOGENEOUS`` puts ``h0`` on every site.  ``ASCENDING_LR`` puts
    ``h0 + step*(c-1)`` on column c so the field grows toward the right;
    ``ASCENDING_RL`` puts ``h0 + step*(C-c)`` so it grows toward the left.
    """
    ncol = spec.n_columns
    values = []
    for s in range(1, spec.n_sites + 1):
        c = spec.column_of(s)
        if kind is FieldKind.HOMOGENEOUS:
            values.append(h0)
        elif kind is FieldKind.ASCENDING_LR:
            values.append(h0 + step * (c - 1))
        elif kind is FieldKind.ASCENDING_RL:
            values.append(h0 + step * (ncol - c))
        else:
            raise LatticeError(f"unknown field kind {kind}")
    return FieldAssignment(kind=kind, h0=h0, step=step, values=tuple(values))


# -- mirror symmetry ----------------------------------------------------


def mirror_permutation(spec: LatticeSpec) -> tuple[int, ...] | None:
    """Left-right mirror permutation of the sites, if it is a symmetry.

    Site at ``(c, r)`` is mapped to the site at ``(C+1-c, r)``.  The
    permutation is returned (``perm[i-1]`` is the image of site ``i``)
    only if it exists for every site, preserves the bond set, and swaps
    the left and right reservoirs with equal couplings; otherwise ``None``.
    """
    ncol = spec.n_columns
    index = {pos: k + 1 for k, pos in enumerate(spec.sites)}
    perm = []
    for c, r in spec.sites:
        target = (ncol + 1 - c, r)
        if target not in index:
            return None
        perm.append(index[target])

    def image(s: int) -> int:
        return perm[s - 1]

    mirrored_bonds = frozenset(_canonical_bond(image(i), image(j)) for i, j in spec.bonds)
    if mirrored_bonds != spec.bonds:
        return None
    left = {(image(s), g) for s, g in spec.left_reservoir}
    right = {(image(s), g) for s, g in spec.right_reservoir}
    if left != set(spec.right_reservoir) or right != set(spec.left_reservoir):
        return None
    return tuple(perm)


# -- exhaustive small-geometry enumeration -------------------------------

# Template: the six-site triangular wedge, columns (1, 2, 3).
_TEMPLATE_SITES: dict[int, tuple[int, int]] = {
    1: (1, 1), 2: (2, 1), 3: (2, 2), 4: (3, 1), 5: (3, 2), 6: (3, 3),
}
_TEMPLATE_BONDS: tuple[tuple[int, int], ...] = (
    (1, 2), (1, 3), (2, 3), (2, 4), (2, 5), (3, 5), (3, 6), (4, 5), (5, 6),
)
# Row flip within each column (top row <-> bottom row) is a symmetry of
# the template; used to fold out mirror-equivalent sub-lattices.
_TEMPLATE_ROW_FLIP: dict[int, int] = {1: 1, 2: 3, 3: 2, 4: 6, 5: 5, 6: 4}


def _subgraph_connected(sites: frozenset[int], bonds: frozenset[tuple[int, int]]) -> bool:
    if not sites:
        return False
    adj: dict[int, set[int]] = {s: set() for s in sites}
    for i, j in bonds:
        adj[i].add(j)
        adj[j].add(i)
    start = next(iter(sites))
    seen = {start}
    stack = [start]
    while stack:
        for nb in adj[stack.pop()]:
            if nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return len(seen) == len(sites)


def _normalized_form(
    sites: frozenset[int],
    bonds: frozenset[tuple[int, int]],
    left: frozenset[int],
    right: frozenset[int],
):
    """Canonical tuple for a template sub-lattice: columns shifted to start
    at 1, rows compacted within each column, sites relabelled column-major."""
    cmin = min(_TEMPLATE_SITES[s][0] for s in sites)
    per_col: dict[int, list[int]] = {}
    for s in sites:
        c, _ = _TEMPLATE_SITES[s]
        per_col.setdefault(c - cmin + 1, []).append(s)
    pos = {}
    for c, members in per_col.items():
        members.sort(key=lambda s: _TEMPLATE_SITES[s][1])
        for r, s in enumerate(members, start=1):
            pos[s] = (c, r)
    order = sorted(sites, key=lambda s: pos[s])
    relabel = {s: k + 1 for k, s in enumerate(order)}
    new_sites = tuple(pos[s] for s in order)
    new_bonds = tuple(sorted(_canonical_bond(relabel[i], relabel[j]) for i, j in bonds))
    new_left = tuple(sorted(relabel[s] for s in left))
    new_right = tuple(sorted(relabel[s] for s in right))
    return (new_sites, new_bonds, new_left, new_right)


def _flip_config(sites, bonds, left, right):
    f = _TEMPLATE_ROW_FLIP
    return (
        frozenset(f[s] for s in sites),
        frozenset(_canonical_bond(f[i], f[j]) for i, j in bonds),
        frozenset(f[s] for s in left),
        frozenset(f[s] for s in right),
    )


def enumerate_small_geometries(
    n_sites: int, left_count: int, right_count: int
) -> list[LatticeSpec]:
    """All connected sub-lattices of the six-site triangular template with
    exactly ``n_sites`` sites, spanning at least two columns, carrying
    ``left_count`` reservoirs on the leftmost occupied column and
    ``right_count`` on the rightmost.

    Both the site subset and the bond subset vary.  Configurations are
    deduplicated up to the template's row-flip mirror and up to rigid
    repositioning (column shifts and row compaction), since neither changes
    the Hamiltonian or the dissipators.  Reservoir couplings follow the
    balanced convention gamma_L = 1 and gamma_R = left_count/right_count,
    keeping the total coupling equal on both sides.

    Returns an empty list when no placement fits (for example when
    ``left_count`` exceeds every candidate boundary column).
    """
    if not (2 <= n_sites <= 6):
        raise LatticeError("template enumeration supports 2..6 sites")
    if left_count < 1 or right_count < 1:
        raise LatticeError("reservoir counts must be at least 1")

    gamma_left = 1.0
    gamma_right = left_count * gamma_left / right_count

    seen: set = set()
    out: list[tuple] = []
    for subset in itertools.combinations(sorted(_TEMPLATE_SITES), n_sites):
        sset = frozenset(subset)
        cols_used = sorted({_TEMPLATE_SITES[s][0] for s in subset})
        if len(cols_used) < 2:
            continue
        cmin, cmax = cols_used[0], cols_used[-1]
        left_col = [s for s in subset if _TEMPLATE_SITES[s][0] == cmin]
        right_col = [s for s in subset if _TEMPLATE_SITES[s][0] == cmax]
        if len(left_col) < left_count or len(right_col) < right_count:
            continue
        induced = [b for b in _TEMPLATE_BONDS if b[0] in sset and b[1] in sset]
        for r in range(len(induced) + 1):
            for bsub in itertools.combinations(induced, r):
                bset = frozenset(bsub)
                if not _subgraph_connected(sset, bset):
                    continue
                for lsel in itertools.combinations(sorted(left_col), left_count):
                    for rsel in itertools.combinations(sorted(right_col), right_count):
                        lset, rset = frozenset(lsel), frozenset(rsel)
                        key = _normalized_form(sset, bset, lset, rset)
                        mkey = _normalized_form(*_flip_config(sset, bset, lset, rset))
                        canon = min(key, mkey)
                        if canon in seen:
                            continue
                        seen.add(canon)
                        out.append(canon)

    specs = []
    for new_sites, new_bonds, new_left, new_right in sorted(out):
        specs.append(LatticeSpec(
            n_sites=len(new_sites),
            sites=new_sites,
            bonds=frozenset(new_bonds),
            left_reservoir=tuple((s, gamma_left) for s in new_left),
            right_reservoir=tuple((s, gamma_right) for s in new_right),
        ))
    return specs
