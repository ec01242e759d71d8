"""Sparse many-body operators on the 2^N spin Hilbert space.

Builds the anisotropic exchange Hamiltonian, the reservoir jump operators
(per-site or collective on the right boundary), and observables such as
bond-current operators.  All operators are ``scipy.sparse`` CSR matrices in
the tensor-product basis fixed by the lattice's site ordering; basis state
``|b>`` has site k spin-up when bit ``N-k`` of ``b`` is set (site 1 is the
leftmost tensor factor).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.sparse as sp

from .lattice import FieldAssignment, LatticeSpec

__all__ = [
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "SIGMA_PLUS",
    "SIGMA_MINUS",
    "ModelParams",
    "DriveMode",
    "DriveDirection",
    "DriveSpec",
    "OperatorError",
    "embed_site_operator",
    "build_hamiltonian",
    "build_jump_operators",
    "current_observable",
    "total_sz",
]

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)   # (x + iy)/2
SIGMA_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)  # (x - iy)/2


class OperatorError(ValueError):
    """Invalid operator construction request."""


@dataclass(frozen=True)
class ModelParams:
    """Exchange couplings, anisotropy, field profile and drive polarization.

    ``f`` is the target boundary magnetization; its magnitude may not
    exceed 1 so the jump amplitudes sqrt(1 +- f) stay real.
    """

    delta: float
    field: FieldAssignment
    alpha: float = 1.0
    f: float = 1.0

    def __post_init__(self):
        if abs(self.f) > 1.0:
            raise OperatorError(f"|f| must be <= 1, got f={self.f}")


class DriveMode(Enum):
    SEPARATE = "separate"
    COLLECTIVE_UNIFORM = "collective_uniform"
    COLLECTIVE_PHASED = "collective_phased"


class DriveDirection(Enum):
    FORWARD = "forward"     # f_left = +f, f_right = -f
    REVERSED = "reversed"   # f_left = -f, f_right = +f


@dataclass(frozen=True)
class DriveSpec:
    mode: DriveMode = DriveMode.SEPARATE
    direction: DriveDirection = DriveDirection.FORWARD

    def reversed(self) -> "DriveSpec":
        flip = (DriveDirection.REVERSED if self.direction is DriveDirection.FORWARD
                else DriveDirection.FORWARD)
        return DriveSpec(self.mode, flip)


def embed_site_operator(n_sites: int, site: int, local: np.ndarray) -> sp.csr_matrix:
    """Embed a 2x2 operator acting on ``site`` into the full 2^N space,
    identity on every other tensor factor."""
    if not (1 <= site <= n_sites):
        raise OperatorError(f"site {site} outside 1..{n_sites}")
    local = np.asarray(local, dtype=complex)
    if local.shape != (2, 2):
        raise OperatorError(f"local operator must be 2x2, got {local.shape}")
    left = sp.identity(2 ** (site - 1), format="csr", dtype=complex)
    right = sp.identity(2 ** (n_sites - site), format="csr", dtype=complex)
    out = sp.kron(sp.kron(left, sp.csr_matrix(local), format="csr"), right, format="csr")
    out.eliminate_zeros()   # kron's block expansion stores explicit zeros
    return out


def _site_paulis(n_sites: int) -> list[dict[str, sp.csr_matrix]]:
    """Embedded x, y, z Paulis for every site, built once per call."""
    table = []
    for s in range(1, n_sites + 1):
        table.append({
            "x": embed_site_operator(n_sites, s, SIGMA_X),
            "y": embed_site_operator(n_sites, s, SIGMA_Y),
            "z": embed_site_operator(n_sites, s, SIGMA_Z),
        })
    return table


def total_sz(n_sites: int) -> sp.csr_matrix:
    """Total magnetization operator, sum of sigma^z over all sites."""
    d = 2 ** n_sites
    out = sp.csr_matrix((d, d), dtype=complex)
    for s in range(1, n_sites + 1):
        out = out + embed_site_operator(n_sites, s, SIGMA_Z)
    return out.tocsr()


def build_hamiltonian(spec: LatticeSpec, params: ModelParams) -> sp.csr_matrix:
    """Anisotropic exchange Hamiltonian on the lattice's bond graph.

    H = sum_<i,j> [alpha (x_i x_j + y_i y_j) + delta z_i z_j]
        + sum_i h_i z_i

    Hermitian and commuting with the total magnetization.
    """
    if len(params.field.values) != spec.n_sites:
        raise OperatorError(
            f"field has {len(params.field.values)} values for {spec.n_sites} sites"
        )
    n = spec.n_sites
    paulis = _site_paulis(n)
    d = 2 ** n
    h = sp.csr_matrix((d, d), dtype=complex)
    for i, j in sorted(spec.bonds):
        pi, pj = paulis[i - 1], paulis[j - 1]
        h = h + params.alpha * (pi["x"] @ pj["x"] + pi["y"] @ pj["y"])
        h = h + params.delta * (pi["z"] @ pj["z"])
    for s in range(1, n + 1):
        h = h + params.field.values[s - 1] * paulis[s - 1]["z"]
    h = h.tocsr()
    h.eliminate_zeros()
    return h


def _boundary_polarizations(params: ModelParams, drive: DriveSpec) -> tuple[float, float]:
    if drive.direction is DriveDirection.FORWARD:
        return params.f, -params.f
    return -params.f, params.f


def _site_jumps(n_sites: int, site: int, gamma: float, f_site: float):
    """Raising/lowering jumps sqrt(1 +- f) sigma^{+-} on one site.

    Amplitudes that vanish identically (|f| = 1) are dropped rather than
    carried as zero matrices.
    """
    out = []
    for sign, local in ((+1.0, SIGMA_PLUS), (-1.0, SIGMA_MINUS)):
        amp = math.sqrt(max(0.0, 1.0 + sign * f_site))
        if amp > 0.0:
            out.append(((amp * embed_site_operator(n_sites, site, local)).tocsr(), gamma))
    return out


def build_jump_operators(
    spec: LatticeSpec, params: ModelParams, drive: DriveSpec
) -> list[tuple[sp.csr_matrix, float]]:
    """Reservoir jump operators with their coupling rates.

    In ``SEPARATE`` mode every reservoir site j carries up to two jumps
    sqrt(1 +- f_j) sigma_j^{+-} with that site's gamma.  The collective
    modes keep the left side as-is and replace the right-side jumps by a
    single pair acting on the sum sum_j sigma_j^{+-} over the right column;
    ``COLLECTIVE_PHASED`` additionally multiplies every second right site
    (by row order) with a factor i.  Collective jumps use the per-site
    right coupling, which must be uniform.
    """
    f_left, f_right = _boundary_polarizations(params, drive)
    n = spec.n_sites
    jumps: list[tuple[sp.csr_matrix, float]] = []
    for site, gamma in spec.left_reservoir:
        jumps.extend(_site_jumps(n, site, gamma, f_left))

    if drive.mode is DriveMode.SEPARATE:
        for site, gamma in spec.right_reservoir:
            jumps.extend(_site_jumps(n, site, gamma, f_right))
        return jumps

    if len(spec.right_reservoir) < 2:
        raise OperatorError(
            "collective drive needs at least two right-reservoir sites, "
            f"got {len(spec.right_reservoir)}"
        )
    gammas = {g for _, g in spec.right_reservoir}
    if len(gammas) != 1:
        raise OperatorError("collective drive needs a uniform right coupling")
    gamma_r = gammas.pop()

    right_sites = sorted((s for s, _ in spec.right_reservoir), key=spec.row_of)
    d = 2 ** n
    for sign, local in ((+1.0, SIGMA_PLUS), (-1.0, SIGMA_MINUS)):
        amp = math.sqrt(max(0.0, 1.0 + sign * f_right))
        if amp == 0.0:
            continue
        op = sp.csr_matrix((d, d), dtype=complex)
        for pos, site in enumerate(right_sites):
            phase = 1.0j if (drive.mode is DriveMode.COLLECTIVE_PHASED and pos % 2 == 1) else 1.0
            op = op + phase * embed_site_operator(n, site, local)
        jumps.append(((amp * op).tocsr(), gamma_r))
    return jumps


def current_observable(spec: LatticeSpec, k: int, j: int, alpha: float) -> sp.csr_matrix:
    """Bond-current observable 2*alpha*(x_k y_j - y_k x_j) for the oriented
    current from site k to site j.  Antisymmetric under k <-> j."""
    if _canonical(k, j) not in spec.bonds:
        raise OperatorError(f"({k},{j}) is not a bond of the lattice")
    n = spec.n_sites
    xk = embed_site_operator(n, k, SIGMA_X)
    yk = embed_site_operator(n, k, SIGMA_Y)
    xj = embed_site_operator(n, j, SIGMA_X)
    yj = embed_site_operator(n, j, SIGMA_Y)
    return (2.0 * alpha * (xk @ yj - yk @ xj)).tocsr()


def _canonical(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)
