"""Independent dense reference implementations used as test oracles.

Everything here is plain numpy built from first principles: operators are
assembled with explicit ``np.kron`` chains and the Lindblad generator is
constructed column by column from its defining action on matrix units, not
from the Kronecker identities the production code uses.  Steady states are
extracted from a dense null space.  Keep this module free of spinrect
imports so the two routes stay independent.
"""

import numpy as np

SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SY = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SZ = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
SP = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
SM = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)
ID = np.eye(2, dtype=complex)


def kron_embed(n_sites, site, local):
    out = np.array([[1.0 + 0.0j]])
    for s in range(1, n_sites + 1):
        out = np.kron(out, local if s == site else ID)
    return out


def xxz_hamiltonian(n_sites, bonds, alpha, delta, fields):
    d = 2 ** n_sites
    h = np.zeros((d, d), dtype=complex)
    for i, j in bonds:
        h += alpha * (kron_embed(n_sites, i, SX) @ kron_embed(n_sites, j, SX)
                      + kron_embed(n_sites, i, SY) @ kron_embed(n_sites, j, SY))
        h += delta * (kron_embed(n_sites, i, SZ) @ kron_embed(n_sites, j, SZ))
    for s, hv in enumerate(fields, start=1):
        h += hv * kron_embed(n_sites, s, SZ)
    return h


def lindblad_action(h, jumps, rho):
    out = -1j * (h @ rho - rho @ h)
    for L, gamma in jumps:
        Ld = L.conj().T
        out += gamma * (L @ rho @ Ld - 0.5 * (Ld @ L @ rho + rho @ Ld @ L))
    return out


def lindblad_matrix(h, jumps):
    """Generator assembled column by column from its action on matrix
    units, with column-stacking vectorization."""
    d = h.shape[0]
    w = np.zeros((d * d, d * d), dtype=complex)
    for col in range(d * d):
        unit = np.zeros((d, d), dtype=complex)
        # column-stacking: vec index = row + d * column
        unit[col % d, col // d] = 1.0
        w[:, col] = lindblad_action(h, jumps, unit).ravel(order="F")
    return w


def dense_ness(w):
    """Trace-normalized null vector of a dense generator."""
    _, s, vh = np.linalg.svd(w)
    v = vh[-1].conj()
    d = int(round(np.sqrt(v.size)))
    rho = v.reshape((d, d), order="F")
    rho = rho / np.trace(rho)
    rho = 0.5 * (rho + rho.conj().T)
    return rho, s


def current_op(n_sites, k, j, alpha):
    return 2.0 * alpha * (
        kron_embed(n_sites, k, SX) @ kron_embed(n_sites, j, SY)
        - kron_embed(n_sites, k, SY) @ kron_embed(n_sites, j, SX)
    )


def boundary_jumps(n_sites, left, right, f):
    """Separate-mode jump list for polarizations f on the left and -f on
    the right; ``left``/``right`` are (site, gamma) pairs."""
    jumps = []
    for sites, fb in ((left, f), (right, -f)):
        for site, gamma in sites:
            for sign, local in ((+1.0, SP), (-1.0, SM)):
                amp = np.sqrt(max(0.0, 1.0 + sign * fb))
                if amp > 0.0:
                    jumps.append((amp * kron_embed(n_sites, site, local), gamma))
    return jumps
