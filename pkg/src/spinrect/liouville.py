"""Vectorized Lindblad generator.

The density matrix is column-stacked into a vector, vec(rho), so the master
equation becomes a linear ODE d|rho> = W|rho>.  W is available either as an
explicit sparse matrix on the 4^N-dimensional space or in matrix-free form,
which applies the commutator and dissipators directly to the devectorized
matrix without materializing W.

Column stacking means vec([[a, b], [c, d]]) = (a, c, b, d), i.e. Fortran
ravel order; all Kronecker-product orderings below derive from the identity
vec(A B C) = (C^T kron A) vec(B).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

__all__ = [
    "vectorize",
    "devectorize",
    "Liouvillian",
    "build_liouvillian",
    "apply_liouvillian",
]


def vectorize(m: np.ndarray) -> np.ndarray:
    """Column-stack a square matrix into a vector."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"vectorize expects a square matrix, got shape {m.shape}")
    return m.ravel(order="F")


def devectorize(v: np.ndarray) -> np.ndarray:
    """Inverse of :func:`vectorize`; the length must be a perfect square."""
    v = np.asarray(v)
    if v.ndim != 1:
        raise ValueError(f"devectorize expects a vector, got shape {v.shape}")
    d = math.isqrt(v.size)
    if d * d != v.size:
        raise ValueError(f"vector of length {v.size} is not a stacked square matrix")
    return v.reshape((d, d), order="F")


@dataclass(frozen=True)
class Liouvillian:
    """The generator W of the vectorized dynamics.

    ``kind`` is either ``"sparse"`` (explicit 4^N x 4^N matrix in
    ``matrix``) or ``"matrix-free"`` (Hamiltonian and jump list retained,
    W applied by reshaping).  Both representations produce the same action
    on any vector.
    """

    n: int                                  # Hilbert-space dimension 2^N
    kind: str
    matrix: sp.csr_matrix | None = None
    h: sp.csr_matrix | None = None
    jumps: tuple[tuple[sp.csr_matrix, float], ...] = ()
    # cached per-jump (L, gamma, L^dag, L^dag L) for the matrix-free apply
    _terms: tuple = field(default=(), repr=False, compare=False)

    @property
    def dim(self) -> int:
        return self.n * self.n


def _explicit_matrix(h: sp.csr_matrix, jumps) -> sp.csr_matrix:
    n = h.shape[0]
    eye = sp.identity(n, format="csr", dtype=complex)
    kron = lambda a, b: sp.kron(a, b, format="csr")
    w = -1j * (kron(eye, h) - kron(h.T, eye))
    for L, gamma in jumps:
        LdL = (L.getH() @ L).tocsr()
        w = w + gamma * (
            kron(L.conj(), L)
            - 0.5 * kron(eye, LdL)
            - 0.5 * kron(LdL.T, eye)
        )
    w = w.tocsr()
    w.eliminate_zeros()
    return w


def build_liouvillian(
    h: sp.spmatrix | np.ndarray,
    jumps,
    repr: str = "auto",
) -> Liouvillian:
    """Assemble W from a Hamiltonian and a list of ``(jump, gamma)`` pairs.

    vec(-i[H, rho])      = -i (1 kron H - H^T kron 1) |rho>
    vec(L rho L^dag)     = (L* kron L) |rho>
    vec({L^dag L, rho})  = (1 kron L^dag L + (L^dag L)^T kron 1) |rho>

    ``repr`` selects the representation: ``"sparse"``, ``"matrix-free"``,
    or ``"auto"``, which keeps the explicit matrix up to a 128-dimensional
    Hilbert space (16384-dimensional W) and goes matrix-free above that.
    """
    h = sp.csr_matrix(h, dtype=complex)
    n = h.shape[0]
    if h.shape != (n, n):
        raise ValueError(f"Hamiltonian must be square, got {h.shape}")
    normalized = []
    for L, gamma in jumps:
        L = sp.csr_matrix(L, dtype=complex)
        if L.shape != (n, n):
            raise ValueError(
                f"jump operator of shape {L.shape} does not match Hamiltonian dimension {n}"
            )
        if gamma < 0:
            raise ValueError(f"negative coupling rate {gamma}")
        normalized.append((L, float(gamma)))

    if repr == "auto":
        repr = "sparse" if n <= 128 else "matrix-free"
    if repr == "sparse":
        return Liouvillian(n=n, kind="sparse", matrix=_explicit_matrix(h, normalized),
                           h=h, jumps=tuple(normalized))
    if repr == "matrix-free":
        terms = tuple(
            (L, gamma, L.getH().tocsr(), (L.getH() @ L).tocsr())
            for L, gamma in normalized
        )
        return Liouvillian(n=n, kind="matrix-free", h=h, jumps=tuple(normalized),
                           _terms=terms)
    raise ValueError(f"unknown representation {repr!r}")


def apply_liouvillian(w: Liouvillian, s: np.ndarray) -> np.ndarray:
    """Return W|s>.

    The matrix-free path devectorizes, applies -i[H, rho] plus the
    dissipators, and re-vectorizes; the sparse path is a plain matvec.
    """
    s = np.asarray(s, dtype=complex)
    if s.shape != (w.dim,):
        raise ValueError(f"state has shape {s.shape}, expected ({w.dim},)")
    if w.kind == "sparse":
        return w.matrix @ s
    rho = devectorize(s)
    out = -1j * (w.h @ rho - rho @ w.h)
    for L, gamma, Ld, LdL in w._terms:
        out += gamma * ((L @ rho) @ Ld - 0.5 * (LdL @ rho + rho @ LdL))
    return vectorize(np.asarray(out))
