"""Bond currents, conservation checks and the rectification coefficient.

The current from site k to site j is the expectation of
2*alpha*(x_k y_j - y_k x_j).  At a steady state the net current out of
every undriven site vanishes and the summed current crossing each
inter-column cut is the same; that common value J is the transport
observable, and comparing J under drive reversal (f -> -f) yields the
rectification coefficient R = (J(f) + J(-f)) / (J(f) - J(-f)).
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .lattice import FieldAssignment, LatticeSpec
from .liouville import build_liouvillian, devectorize
from .operators import (
    DriveSpec,
    ModelParams,
    build_hamiltonian,
    build_jump_operators,
    current_observable,
)
from .steady import NessSolution, PropagationOptions, evolve_to_ness, solve_ness_dense

__all__ = [
    "MeasurementError",
    "NotConvergedError",
    "CurrentReport",
    "RectificationResult",
    "SweepRow",
    "expectation",
    "bond_currents",
    "column_current",
    "rectification_coefficient",
    "solve_steady_state",
    "sweep",
]


class MeasurementError(RuntimeError):
    """An expectation value came out non-real beyond tolerance."""


class NotConvergedError(RuntimeError):
    """A state failed a conservation check and was rejected."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


def expectation(s: np.ndarray, obs: sp.spmatrix, imag_tol: float = 1e-9) -> float:
    """tr(rho * obs) for the devectorized state; the imaginary part must be
    below ``imag_tol`` (a violation signals a broken state or operator)."""
    rho = devectorize(np.asarray(s, dtype=complex))
    val = complex(obs.T.multiply(rho).sum())
    if abs(val.imag) > imag_tol:
        raise MeasurementError(
            f"expectation value {val} has imaginary part above {imag_tol}"
        )
    return val.real


@dataclass(frozen=True)
class CurrentReport:
    """All bond currents of one state.

    ``bond_currents`` maps oriented bonds (low column to high column;
    vertical bonds low row to high row) to their current.  ``column_sums``
    holds the summed transport current crossing each inter-column cut.
    ``divergence`` maps every interior (undriven) site to its net outgoing
    current, which vanishes at a steady state.
    """

    bond_currents: dict[tuple[int, int], float]
    column_sums: tuple[float, ...]
    divergence: dict[int, float]


def bond_currents(s: np.ndarray, spec: LatticeSpec, alpha: float) -> CurrentReport:
    """Evaluate every bond-current observable on state ``s``."""
    currents: dict[tuple[int, int], float] = {}
    for k, j in spec.oriented_bonds():
        currents[(k, j)] = expectation(s, current_observable(spec, k, j, alpha))

    sums = []
    for c in range(spec.leftmost_column, spec.rightmost_column):
        sums.append(sum(currents[b] for b in spec.cut_bonds(c)))

    divergence: dict[int, float] = {}
    for site in spec.interior_sites:
        total = 0.0
        for (k, j), val in currents.items():
            if k == site:
                total += val
            elif j == site:
                total -= val
        divergence[site] = total
    return CurrentReport(
        bond_currents=currents, column_sums=tuple(sums), divergence=divergence
    )


def column_current(report: CurrentReport, tol: float = 1e-5) -> tuple[float, float]:
    """The common cut current J and the homogeneity residual.

    J is the mean of the per-cut sums; the residual is the largest pairwise
    deviation between cuts.  A residual above ``tol`` means the state is
    not stationary enough to define J and is rejected.
    """
    sums = report.column_sums
    if not sums:
        raise ValueError("lattice has no inter-column cut")
    j = float(np.mean(sums))
    residual = float(max(sums) - min(sums))
    if residual > tol:
        raise NotConvergedError(
            f"cut currents disagree by {residual:.3e} (tolerance {tol:.1e}); "
            "state rejected as non-stationary", residual
        )
    return j, residual


@dataclass(frozen=True)
class RectificationResult:
    """Forward/reverse currents and R = (J+ + J-)/(J+ - J-).

    ``degenerate`` flags the 0/0 case where the two currents coincide
    within tolerance (e.g. both vanish); ``r`` is None there.
    """

    j_forward: float
    j_reverse: float
    r: float | None
    degenerate: bool


def rectification_coefficient(
    j_fwd: float, j_rev: float, tol: float = 1e-9
) -> RectificationResult:
    """Rectification coefficient of a forward/reverse current pair.

    R = 0 means symmetric transport, |R| = 1 a perfect one-way insulator.
    When |J(f) - J(-f)| is below ``tol`` (relative to the current scale)
    the coefficient is undefined and the degenerate marker is returned
    instead of a number.
    """
    denom = j_fwd - j_rev
    scale = max(abs(j_fwd), abs(j_rev), tol)
    if abs(denom) <= tol * scale:
        return RectificationResult(j_fwd, j_rev, r=None, degenerate=True)
    return RectificationResult(j_fwd, j_rev, r=(j_fwd + j_rev) / denom, degenerate=False)


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    """One anisotropy point of a rectification sweep."""

    delta: float
    j_forward: float
    j_reverse: float
    r: float | None
    degenerate: bool
    homogeneity_residual: float
    stationarity_fwd: float
    stationarity_rev: float
    wall_time_s: float
    error: str | None = None


def solve_steady_state(
    spec: LatticeSpec,
    params: ModelParams,
    drive: DriveSpec,
    opts: PropagationOptions | None = None,
    method: str = "auto",
    check_unique: bool = True,
) -> NessSolution:
    """Build W for the model and solve for its steady state.

    ``method`` is ``"dense"``, ``"propagation"`` or ``"auto"`` (dense up to
    six sites, propagation above).  ``check_unique`` controls the dense
    oracle's null-space degeneracy probe; batch scans switch it off and
    rely on the residual and conservation checks instead.
    """
    h = build_hamiltonian(spec, params)
    jumps = build_jump_operators(spec, params, drive)
    w = build_liouvillian(h, jumps)
    if method == "auto":
        method = "dense" if w.n <= 64 else "propagation"
    if method == "dense":
        return solve_ness_dense(w, check_unique=check_unique)
    if method == "propagation":
        return evolve_to_ness(w, None, opts)
    raise ValueError(f"unknown method {method!r}")


def _evaluate_row(
    spec: LatticeSpec,
    field: FieldAssignment,
    drive: DriveSpec,
    delta: float,
    opts: PropagationOptions,
    alpha: float,
    f: float,
    method: str,
    homogeneity_tol: float,
    rect_tol: float,
) -> SweepRow:
    t0 = time.perf_counter()
    params = ModelParams(delta=delta, field=field, alpha=alpha, f=f)
    values = {}
    error = None
    try:
        for label, drv in (("fwd", drive), ("rev", drive.reversed())):
            sol = solve_steady_state(spec, params, drv, opts, method)
            if not sol.converged:
                raise NotConvergedError(
                    f"{label} solve stopped at residual {sol.residual:.3e} "
                    f"above tolerance", sol.residual,
                )
            report = bond_currents(sol.state, spec, alpha)
            j, homog = column_current(report, homogeneity_tol)
            values[label] = (j, homog, sol.residual)
    except (NotConvergedError, MeasurementError) as exc:
        error = str(exc)

    if error is not None:
        jf, hf, rf = values.get("fwd", (math.nan, math.nan, math.nan))
        return SweepRow(
            delta=delta, j_forward=jf, j_reverse=math.nan, r=None, degenerate=False,
            homogeneity_residual=hf, stationarity_fwd=rf, stationarity_rev=math.nan,
            wall_time_s=time.perf_counter() - t0, error=error,
        )

    (jf, hf, rf), (jr, hr, rr) = values["fwd"], values["rev"]
    rect = rectification_coefficient(jf, jr, rect_tol)
    return SweepRow(
        delta=delta, j_forward=jf, j_reverse=jr, r=rect.r, degenerate=rect.degenerate,
        homogeneity_residual=max(hf, hr), stationarity_fwd=rf, stationarity_rev=rr,
        wall_time_s=time.perf_counter() - t0,
    )


def sweep(
    spec: LatticeSpec,
    field: FieldAssignment,
    drive: DriveSpec,
    deltas,
    opts: PropagationOptions | None = None,
    *,
    alpha: float = 1.0,
    f: float = 1.0,
    method: str = "auto",
    workers: int = 1,
    homogeneity_tol: float = 1e-5,
    rect_tol: float = 1e-9,
) -> list[SweepRow]:
    """Rectification sweep over anisotropy values.

    Each row solves the steady state for the drive as given and with the
    polarization reversed, and reports J(f), J(-f) and R.  Rows are
    independent; with ``workers > 1`` they run in a process pool and are
    reassembled in input order, so the result does not depend on the
    worker count.  Per-row failures are recorded in the row's ``error``
    field rather than aborting the sweep.
    """
    opts = opts or PropagationOptions()
    deltas = [float(d) for d in deltas]
    args = [
        (spec, field, drive, d, opts, alpha, f, method, homogeneity_tol, rect_tol)
        for d in deltas
    ]
    if workers <= 1 or len(deltas) <= 1:
        return [_evaluate_row(*a) for a in args]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_evaluate_row, *a) for a in args]
        return [f.result() for f in futures]
