"""Steady-state solvers for the vectorized Lindblad dynamics.

Two routes to the fixed point W|rho> = 0:

* :func:`evolve_to_ness` propagates |rho(t)> = exp(W t)|rho(0)> with an
  adaptive Krylov approximation of the exponential action, checkpointing
  trace/Hermiticity corrections and stopping early once the stationarity
  residual is below tolerance.  Scales to the million-dimensional
  vectorized spaces of ten-site lattices.
* :func:`solve_ness_dense` extracts the null vector of W directly and is
  the small-system oracle (Hilbert dimension up to 64).

The propagator exploits a weak symmetry of the boundary-driven models:
every jump operator shifts the total magnetization of bra and ket by the
same amount, so the subspace of density matrices that are block-diagonal
in total magnetization is invariant.  When the initial state lies in that
subspace (the default maximally mixed state does), the dynamics runs in it
at a fraction of the full 4^N cost.  The detection is structural (inspects
the nonzero pattern of H and the jumps) and the returned state is always a
full-length vector whose residual is certified against the unreduced
generator.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .liouville import Liouvillian, apply_liouvillian, build_liouvillian, devectorize, vectorize

__all__ = [
    "PropagationOptions",
    "NessSolution",
    "SteadyStateError",
    "DegenerateSteadyStateError",
    "KrylovError",
    "evolve_to_ness",
    "solve_ness_dense",
    "stationarity_residual",
    "maximally_mixed",
    "rk4_propagate",
]


class SteadyStateError(RuntimeError):
    """Steady-state computation failed."""


class DegenerateSteadyStateError(SteadyStateError):
    """The null space of W is (numerically) more than one-dimensional."""

    def __init__(self, smallest: float, second: float):
        self.smallest = smallest
        self.second = second
        super().__init__(
            "steady state is not unique: two smallest singular values / "
            f"eigenvalue magnitudes are {smallest:.3e} and {second:.3e}"
        )


class KrylovError(SteadyStateError):
    """The Krylov propagation broke down."""


@dataclass(frozen=True)
class PropagationOptions:
    """Controls for :func:`evolve_to_ness`.

    ``t_final`` is in inverse-coupling units.  ``checkpoint_interval`` sets
    how often the state is re-Hermitized, trace-renormalized and tested for
    stationarity; ``max_step`` caps a single Krylov step (defaults to the
    checkpoint interval).  ``step_tol`` is the relative local error target
    per unit time for the adaptive step controller.
    """

    t_final: float = 1.0e3
    checkpoint_interval: float = 10.0
    stationarity_tol: float = 1.0e-8
    krylov_dim: int = 30
    max_step: float | None = None
    step_tol: float = 1.0e-7

    def __post_init__(self):
        if self.t_final <= 0:
            raise ValueError("t_final must be positive")
        if self.checkpoint_interval <= 0:
            raise ValueError("checkpoint_interval must be positive")
        if self.stationarity_tol <= 0 or self.step_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.krylov_dim < 2:
            raise ValueError("krylov_dim must be at least 2")
        if self.max_step is not None and self.max_step <= 0:
            raise ValueError("max_step must be positive")


@dataclass
class NessSolution:
    """A certified steady state.

    ``residual`` is the infinity norm of W|rho> for the returned state,
    always evaluated with the original (unreduced) generator.  ``converged``
    is False when the propagation hit ``t_final`` above tolerance; the
    state is still returned so callers can inspect it, but it must not be
    silently accepted.
    """

    state: np.ndarray
    residual: float
    wall_time: float
    method: str                       # "propagation" or "dense"
    converged: bool
    converged_at: float | None = None
    trace_drift: float = 0.0
    hermiticity_drift: float = 0.0
    steps: int = 0
    matvecs: int = 0


def maximally_mixed(n: int) -> np.ndarray:
    """vec of the maximally mixed density matrix on an n-dimensional space."""
    return vectorize(np.eye(n, dtype=complex) / n)


# ---------------------------------------------------------------------------
# propagation engines
# ---------------------------------------------------------------------------


def _popcounts(n: int) -> np.ndarray:
    idx = np.arange(n, dtype=np.int64)
    pop = np.zeros(n, dtype=np.int64)
    while idx.any():
        pop += idx & 1
        idx >>= 1
    return pop


def _uniform_shift(op: sp.spmatrix, pop: np.ndarray) -> int | None:
    """The common popcount shift of all nonzero entries, or None."""
    coo = op.tocoo()
    if coo.nnz == 0:
        return 0
    shifts = pop[coo.row] - pop[coo.col]
    s0 = int(shifts[0])
    return s0 if np.all(shifts == s0) else None


class _FullEngine:
    """Propagation state space = the raw 4^N vector."""

    def __init__(self, w: Liouvillian):
        self.w = w
        self.dim = w.dim
        self.n = w.n

    def apply(self, x: np.ndarray) -> np.ndarray:
        return apply_liouvillian(self.w, x)

    def to_state(self, rho0_vec: np.ndarray) -> np.ndarray:
        return np.array(rho0_vec, dtype=complex)

    def to_full(self, x: np.ndarray) -> np.ndarray:
        return x

    def correct(self, x: np.ndarray) -> tuple[float, float]:
        """Hermitize and renormalize in place; return pre-correction
        (trace drift, hermiticity drift)."""
        rho = devectorize(x)
        tr = np.trace(rho)
        herm = float(np.abs(rho - rho.conj().T).max()) / 2.0
        rho += rho.conj().T.copy()
        rho *= 0.5 / tr.real
        x[:] = vectorize(rho)
        return abs(tr - 1.0), herm


class _SectorEngine:
    """Propagation restricted to density matrices block-diagonal in total
    magnetization.

    State layout: the blocks rho^(m) (one per magnetization value m, size
    s_m x s_m) are flattened row-major and concatenated.  Within that
    subspace the generator action agrees entry-for-entry with the full one.
    """

    def __init__(self, w: Liouvillian, pop: np.ndarray, shifts: list[int]):
        n = w.n
        k = -1j * w.h
        for _, gamma, _, ldl in w._terms:
            k = k - 0.5 * gamma * ldl
        k = k.tocsr()

        values = sorted(set(pop.tolist()))
        self.sector_of = {m: i for i, m in enumerate(values)}
        self.indices = [np.nonzero(pop == m)[0] for m in values]
        self.sizes = [len(ix) for ix in self.indices]
        self.k_blocks = [k[np.ix_(ix, ix)].tocsr() for ix in self.indices]

        self.jump_blocks = []
        for (L, gamma), s0 in zip(w.jumps, shifts):
            blocks = []
            for i, m in enumerate(values):
                if m + s0 not in self.sector_of:
                    continue
                t = self.sector_of[m + s0]
                B = L[np.ix_(self.indices[t], self.indices[i])].tocsr()
                if B.nnz:
                    blocks.append((i, t, B, B.getH().tocsr()))
            self.jump_blocks.append((gamma, blocks))

        self.offsets = np.concatenate([[0], np.cumsum([s * s for s in self.sizes])])
        self.dim = int(self.offsets[-1])
        self.n = n
        # flat positions of each block inside the full F-ordered 4^N vector
        embeds = [
            np.add.outer(ix, n * ix).ravel() for ix in self.indices
        ]
        self.embed_indices = np.concatenate(embeds) if embeds else np.empty(0, dtype=int)

    def blocks(self, x: np.ndarray) -> list[np.ndarray]:
        return [
            x[self.offsets[i]:self.offsets[i + 1]].reshape(s, s)
            for i, s in enumerate(self.sizes)
        ]

    def apply(self, x: np.ndarray) -> np.ndarray:
        # On block-Hermitian states rho @ K^dag = (K @ rho)^dag, which all
        # Krylov vectors generated from one are; saves half the products.
        out = np.zeros_like(x)
        xb, ob = self.blocks(x), self.blocks(out)
        for i, kb in enumerate(self.k_blocks):
            if self.sizes[i] == 0:
                continue
            a = kb @ xb[i]
            ob[i][...] = a
            ob[i] += a.conj().T
        for gamma, blocks in self.jump_blocks:
            for i, t, B, Bd in blocks:
                ob[t] += gamma * ((B @ xb[i]) @ Bd)
        return out

    def to_state(self, rho0_vec: np.ndarray) -> np.ndarray:
        return np.array(rho0_vec[self.embed_indices])

    def to_full(self, x: np.ndarray) -> np.ndarray:
        full = np.zeros(self.n * self.n, dtype=complex)
        full[self.embed_indices] = x
        return full

    def supports(self, rho0_vec: np.ndarray) -> bool:
        off_block = rho0_vec.copy()
        off_block[self.embed_indices] = 0.0
        scale = max(1.0, float(np.abs(rho0_vec).max()))
        return float(np.abs(off_block).max()) <= 1e-12 * scale

    def correct(self, x: np.ndarray) -> tuple[float, float]:
        bl = self.blocks(x)
        tr = sum(np.trace(b) for b in bl if b.size)
        herm = max((float(np.abs(b - b.conj().T).max()) for b in bl if b.size), default=0.0) / 2.0
        for b in bl:
            if b.size:
                b += b.conj().T.copy()
                b *= 0.5 / tr.real
        return abs(tr - 1.0), herm


def _sector_engine_for(w: Liouvillian, rho0_vec: np.ndarray) -> _SectorEngine | None:
    """Build the reduced engine when the generator and the initial state
    allow it, else None."""
    if w.kind != "matrix-free":
        return None
    pop = _popcounts(w.n)
    if _uniform_shift(w.h, pop) != 0:
        return None
    shifts = []
    for L, _ in w.jumps:
        s0 = _uniform_shift(L, pop)
        if s0 is None:
            return None
        shifts.append(s0)
    eng = _SectorEngine(w, pop, shifts)
    if not eng.supports(rho0_vec):
        return None
    return eng


# ---------------------------------------------------------------------------
# adaptive Krylov exponential stepping
# ---------------------------------------------------------------------------


class _KrylovStepper:
    """Adaptive exp(tau W) v stepping with an Arnoldi basis of fixed size.

    Per-step local error is estimated from the last two components of the
    exponential of the (m+2)-dimensional augmented Hessenberg matrix; the
    step size adapts to keep the error-per-unit-time below ``tol`` relative
    to the state norm.
    """

    def __init__(self, apply, n: int, m: int, tol: float):
        self.apply = apply
        self.m = m
        self.tol = tol
        self.basis = np.empty((n, m + 1), dtype=complex, order="F")
        self.matvecs = 0
        self.rejections = 0

    def _arnoldi(self, v: np.ndarray, beta: float):
        m, V = self.m, self.basis
        H = np.zeros((m + 2, m + 2), dtype=complex)
        V[:, 0] = v
        V[:, 0] /= beta
        for j in range(m):
            p = self.apply(V[:, j])
            self.matvecs += 1
            c = (V[:, :j + 1].T @ p.conj()).conj()
            p -= V[:, :j + 1] @ c
            hj = np.linalg.norm(p)
            if hj < 0.707 * np.linalg.norm(c):
                c2 = (V[:, :j + 1].T @ p.conj()).conj()
                p -= V[:, :j + 1] @ c2
                c = c + c2
                hj = np.linalg.norm(p)
            H[:j + 1, j] = c
            H[j + 1, j] = hj
            if not np.isfinite(hj):
                raise KrylovError("non-finite entry in the Krylov recurrence")
            if hj < 1e-12 * beta:
                return H, j + 1          # happy breakdown: subspace exact
            V[:, j + 1] = p
            V[:, j + 1] /= hj
        return H, None

    def step(self, v: np.ndarray, tau: float, max_tau: float):
        """Advance by at most ``tau``; returns (w, tau_done, tau_next)."""
        m, V = self.m, self.basis
        beta = np.linalg.norm(v)
        if beta == 0.0:
            return v.copy(), tau, max_tau
        H, brk = self._arnoldi(v, beta)
        if brk is not None:
            F = sla.expm(tau * H[:brk, :brk])
            w = beta * (V[:, :brk] @ F[:brk, 0])
            return w, tau, max_tau
        avnorm = np.linalg.norm(self.apply(V[:, m]))
        self.matvecs += 1
        H[m + 1, m] = 1.0
        for attempt in range(40):
            F = sla.expm(tau * H)
            p1 = abs(beta * F[m, 0])
            p2 = abs(beta * F[m + 1, 0]) * avnorm
            if p1 > 10.0 * p2:
                err, xm = p2, 1.0 / m
            elif p1 > p2:
                err, xm = p1 * p2 / (p1 - p2), 1.0 / m
            else:
                err, xm = p1, 1.0 / (m - 1)
            budget = self.tol * beta * max(tau, 1e-3)
            if err <= 1.2 * budget or tau <= 1e-12:
                w = beta * (V[:, :m] @ F[:m, 0])
                grow = 0.9 * (budget / max(err, 1e-300)) ** xm
                tau_next = min(max_tau, tau * min(5.0, max(0.3, grow)))
                return w, tau, tau_next
            self.rejections += 1
            tau = tau * max(0.2, 0.9 * (budget / err) ** xm)
        raise KrylovError(f"step controller failed to find an acceptable step near tau={tau:.3e}")

    def initial_tau(self, v: np.ndarray, max_tau: float) -> float:
        """Step-size seed from a rough power-iteration norm estimate."""
        m = self.m
        w = self.apply(v)
        self.matvecs += 1
        anorm = np.linalg.norm(w) / max(np.linalg.norm(v), 1e-300)
        for _ in range(3):
            nw = np.linalg.norm(w)
            if nw == 0.0:
                break
            w /= nw
            w = self.apply(w)
            self.matvecs += 1
            anorm = max(anorm, np.linalg.norm(w))
        if anorm == 0.0:
            return max_tau
        fact = ((m + 1) / np.e) ** (m + 1) * np.sqrt(2 * np.pi * (m + 1))
        tau = (1.0 / anorm) * ((fact * self.tol) / (4.0 * anorm)) ** (1.0 / m)
        return min(max_tau, max(tau, 1e-6))


def _validate_density(rho: np.ndarray, n: int):
    tr = np.trace(rho)
    if abs(tr - 1.0) > 1e-8:
        raise ValueError(f"initial state has trace {tr:.6g}, expected 1")
    if np.abs(rho - rho.conj().T).max() > 1e-8:
        raise ValueError("initial state is not Hermitian")
    if n <= 2048:
        lo = float(sla.eigvalsh(rho, subset_by_index=[0, 0])[0])
        if lo < -1e-8:
            raise ValueError(f"initial state has a negative eigenvalue {lo:.3e}")


def evolve_to_ness(
    w: Liouvillian,
    rho0: np.ndarray | None = None,
    opts: PropagationOptions | None = None,
) -> NessSolution:
    """Propagate toward the steady state and certify stationarity.

    ``rho0`` may be a vectorized or square density matrix; by default the
    maximally mixed state is used (any valid initial state relaxes to the
    same fixed point).  At every checkpoint the state is re-Hermitized and
    trace-renormalized, and the propagation stops early once the infinity
    norm of W|rho> falls below ``opts.stationarity_tol``.  If the residual
    is still above tolerance at ``t_final`` the solution is returned with
    ``converged=False``.
    """
    opts = opts or PropagationOptions()
    t0 = time.perf_counter()

    if rho0 is None:
        rho0_vec = maximally_mixed(w.n)
    else:
        rho0 = np.asarray(rho0, dtype=complex)
        rho0_vec = vectorize(rho0) if rho0.ndim == 2 else rho0.copy()
        if rho0_vec.shape != (w.dim,):
            raise ValueError(f"initial state has size {rho0_vec.size}, expected {w.dim}")
        _validate_density(devectorize(rho0_vec), w.n)

    engine = _sector_engine_for(w, rho0_vec) or _FullEngine(w)
    x = engine.to_state(rho0_vec)

    max_tau = opts.max_step if opts.max_step is not None else opts.checkpoint_interval
    stepper = _KrylovStepper(engine.apply, x.size, opts.krylov_dim, opts.step_tol)
    tau = stepper.initial_tau(x, max_tau)

    t_now = 0.0
    steps = 0
    trace_drift = 0.0
    herm_drift = 0.0
    converged_at = None
    next_check = min(opts.checkpoint_interval, opts.t_final)
    while t_now < opts.t_final - 1e-12:
        chunk = min(tau, next_check - t_now, opts.t_final - t_now)
        try:
            x, done, tau = stepper.step(x, chunk, max_tau)
        except KrylovError as err:
            raise KrylovError(f"{err} (t = {t_now:.6g}, step {steps + 1})") from err
        t_now += done
        steps += 1
        if t_now >= next_check - 1e-9:
            dt_tr, dt_h = engine.correct(x)
            trace_drift = max(trace_drift, dt_tr)
            herm_drift = max(herm_drift, dt_h)
            resid = float(np.abs(engine.apply(x)).max())
            stepper.matvecs += 1
            if resid <= opts.stationarity_tol:
                converged_at = t_now
                break
            next_check = min(t_now + opts.checkpoint_interval, opts.t_final)

    dt_tr, dt_h = engine.correct(x)
    trace_drift = max(trace_drift, dt_tr)
    herm_drift = max(herm_drift, dt_h)
    state = engine.to_full(x)
    residual = float(np.abs(apply_liouvillian(w, state)).max())
    converged = residual <= opts.stationarity_tol
    return NessSolution(
        state=state,
        residual=residual,
        wall_time=time.perf_counter() - t0,
        method="propagation",
        converged=converged,
        converged_at=converged_at if converged else None,
        trace_drift=trace_drift,
        hermiticity_drift=herm_drift,
        steps=steps,
        matvecs=stepper.matvecs,
    )


# ---------------------------------------------------------------------------
# small-system oracle
# ---------------------------------------------------------------------------

_DENSE_LIMIT = 64          # Hilbert dimension; vectorized dimension 4096
_SVD_LIMIT = 256           # vectorized dimension up to which dense SVD is used


def _explicit(w: Liouvillian) -> sp.csr_matrix:
    if w.kind == "sparse":
        return w.matrix
    return build_liouvillian(w.h, list(w.jumps), repr="sparse").matrix


def _null_vector_svd(m: np.ndarray, degeneracy_tol: float) -> np.ndarray:
    _, s, vh = sla.svd(m)
    scale = s[0] if s[0] > 0 else 1.0
    if s[-2] <= degeneracy_tol * scale:
        raise DegenerateSteadyStateError(float(s[-1]), float(s[-2]))
    return vh[-1].conj()


def _null_vector_splu(m: sp.csr_matrix, check_unique: bool, degeneracy_tol: float) -> np.ndarray:
    dim = m.shape[0]
    n = int(np.sqrt(dim))
    diag = np.arange(n) * (n + 1)
    if check_unique:
        v0 = np.ones(dim) / np.sqrt(dim)
        vals = spla.eigs(m, k=2, sigma=1e-3, which="LM", v0=v0,
                         return_eigenvectors=False)
        mags = np.sort(np.abs(vals))
        if mags[1] <= degeneracy_tol * max(1.0, spla.norm(m, np.inf)):
            raise DegenerateSteadyStateError(float(mags[0]), float(mags[1]))
    # replace the first diagonal row of W by the trace functional; the
    # dropped equation is implied by trace preservation
    a = m.tolil()
    a[diag[0], :] = 0.0
    a[diag[0], diag] = 1.0
    b = np.zeros(dim, dtype=complex)
    b[diag[0]] = 1.0
    return spla.splu(a.tocsc()).solve(b)


def solve_ness_dense(
    w: Liouvillian,
    check_unique: bool = True,
    degeneracy_tol: float = 1e-9,
) -> NessSolution:
    """Null-space steady state for small systems (Hilbert dimension <= 64).

    Uses a dense SVD when the vectorized dimension is at most 1024 and a
    sparse LU solve with a trace-constraint row above that.  A numerically
    degenerate null space raises :class:`DegenerateSteadyStateError`
    reporting the two smallest singular values (or eigenvalue magnitudes).
    """
    t0 = time.perf_counter()
    if w.n > _DENSE_LIMIT:
        raise ValueError(
            f"dense oracle supports Hilbert dimension up to {_DENSE_LIMIT}, got {w.n}"
        )
    m = _explicit(w)
    if w.dim <= _SVD_LIMIT:
        v = _null_vector_svd(m.toarray(), degeneracy_tol)
    else:
        v = _null_vector_splu(m, check_unique, degeneracy_tol)

    rho = devectorize(v)
    tr = np.trace(rho)
    if abs(tr) < 1e-12:
        raise SteadyStateError("null vector has (numerically) zero trace")
    rho = rho / tr
    rho = 0.5 * (rho + rho.conj().T)
    state = vectorize(rho)
    residual = float(np.abs(m @ state).max())
    if residual > 1e-10:
        raise SteadyStateError(
            f"dense steady state residual {residual:.3e} exceeds 1e-10"
        )
    return NessSolution(
        state=state,
        residual=residual,
        wall_time=time.perf_counter() - t0,
        method="dense",
        converged=True,
        converged_at=None,
    )


def stationarity_residual(w: Liouvillian, s: np.ndarray) -> float:
    """Infinity norm of W|s>."""
    return float(np.abs(apply_liouvillian(w, s)).max())


def rk4_propagate(
    w: Liouvillian, rho0: np.ndarray, t_final: float, dt: float
) -> np.ndarray:
    """Fixed-step fourth-order Runge-Kutta propagation.

    Cross-validation tool for small systems; no checkpoint corrections are
    applied, so use steps well inside the stability region.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    v = vectorize(rho0) if rho0.ndim == 2 else rho0.copy()
    steps = int(round(t_final / dt))
    for _ in range(steps):
        k1 = apply_liouvillian(w, v)
        k2 = apply_liouvillian(w, v + 0.5 * dt * k1)
        k3 = apply_liouvillian(w, v + 0.5 * dt * k2)
        k4 = apply_liouvillian(w, v + dt * k3)
        v = v + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return v
