import numpy as np
import pytest
import scipy.sparse as sp

import oracles
from conftest import model, square4, two_site_chain

from spinrect import (
    DegenerateSteadyStateError,
    DriveDirection,
    DriveMode,
    DriveSpec,
    FieldKind,
    GeometryKind,
    ModelParams,
    PropagationOptions,
    apply_liouvillian,
    assign_field,
    build_geometry,
    build_hamiltonian,
    build_jump_operators,
    build_liouvillian,
    devectorize,
    evolve_to_ness,
    maximally_mixed,
    rk4_propagate,
    six_site_triangle,
    solve_ness_dense,
    solve_steady_state,
    stationarity_residual,
    vectorize,
)
from spinrect.operators import SIGMA_PLUS, SIGMA_Z
from spinrect.operators import embed_site_operator


def _pump_liouvillian(repr="sparse"):
    h = sp.csr_matrix((2, 2), dtype=complex)
    L = sp.csr_matrix(np.sqrt(2.0) * SIGMA_PLUS)
    return build_liouvillian(h, [(L, 1.0)], repr=repr)


def _model_liouvillian(spec, delta, drive=DriveSpec(), repr="auto", **model_kw):
    params = model(spec, delta=delta, **model_kw)
    h = build_hamiltonian(spec, params)
    jumps = build_jump_operators(spec, params, drive)
    return build_liouvillian(h, jumps, repr=repr)


def test_single_site_pump_dense():
    sol = solve_ness_dense(_pump_liouvillian())
    assert np.abs(sol.state - vectorize(np.diag([1.0, 0.0]))).max() < 1e-12
    assert sol.residual < 1e-12
    assert sol.method == "dense"


def test_single_site_pump_propagation():
    w = _pump_liouvillian()
    sol = evolve_to_ness(w, maximally_mixed(2),
                         PropagationOptions(stationarity_tol=1e-10, krylov_dim=3,
                                            checkpoint_interval=2.0))
    assert sol.converged
    assert np.abs(sol.state - vectorize(np.diag([1.0, 0.0]))).max() < 1e-10
    assert sol.residual < 1e-10
    assert sol.method == "propagation"


def test_two_site_cross_method(chain2):
    w = _model_liouvillian(chain2, delta=0.0, repr="sparse")
    dense = solve_ness_dense(w)
    prop = evolve_to_ness(w, None, PropagationOptions(stationarity_tol=1e-10))
    assert np.abs(dense.state - prop.state).max() < 1e-8
    assert prop.converged and prop.converged_at is not None
    assert prop.converged_at <= 1.0e3


def test_propagation_matches_independent_oracle(chain2):
    params = model(chain2, delta=0.5)
    h = build_hamiltonian(chain2, params)
    jumps = build_jump_operators(chain2, params, DriveSpec())
    w = build_liouvillian(h, jumps)
    prop = evolve_to_ness(w, None, PropagationOptions(stationarity_tol=1e-11))
    rho_ref, _ = oracles.dense_ness(oracles.lindblad_matrix(
        h.toarray(), [(L.toarray(), g) for L, g in jumps]
    ))
    assert np.abs(devectorize(prop.state) - rho_ref).max() < 1e-8


def test_initial_state_independence():
    spec = square4()
    w = _model_liouvillian(spec, delta=1.0)
    rng = np.random.default_rng(17)
    states = [None]  # default maximally mixed
    # pure all-up initial state
    pure = np.zeros((16, 16), dtype=complex)
    pure[0, 0] = 1.0
    states.append(vectorize(pure))
    for _ in range(3):
        a = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
        rho = a @ a.conj().T
        states.append(vectorize(rho / np.trace(rho)))
    opts = PropagationOptions(stationarity_tol=1e-10)
    solutions = [evolve_to_ness(w, s, opts).state for s in states]
    for s in solutions[1:]:
        assert np.abs(s - solutions[0]).max() < 1e-7


def test_positivity_of_steady_state(triangle6):
    w = _model_liouvillian(triangle6, delta=1.0)
    sol = solve_ness_dense(w)
    eigs = np.linalg.eigvalsh(devectorize(sol.state))
    assert eigs.min() >= -1e-10
    assert abs(eigs.sum() - 1.0) < 1e-10


def test_checkpoint_corrections_bound_drift(triangle6):
    w = _model_liouvillian(triangle6, delta=0.5)
    sol = evolve_to_ness(w, None, PropagationOptions(stationarity_tol=1e-9))
    assert sol.converged
    assert sol.trace_drift < 1e-8
    assert sol.hermiticity_drift < 1e-8
    rho = devectorize(sol.state)
    assert abs(np.trace(rho) - 1.0) < 1e-10
    assert np.abs(rho - rho.conj().T).max() < 1e-10


def test_sym9_cut_homogeneity_by_propagation():
    spec = build_geometry(GeometryKind.SYM9)
    params = ModelParams(delta=0.5, field=assign_field(spec, FieldKind.HOMOGENEOUS, 1.0))
    sol = solve_steady_state(spec, params, DriveSpec(), method="propagation",
                             opts=PropagationOptions(stationarity_tol=1e-9, krylov_dim=12))
    from spinrect import bond_currents
    report = bond_currents(sol.state, spec, params.alpha)
    sums = report.column_sums
    assert max(sums) - min(sums) < 1e-7


def test_stationarity_residual_values(chain2):
    w = _model_liouvillian(chain2, delta=0.0, repr="sparse")
    sol = solve_ness_dense(w)
    assert stationarity_residual(w, sol.state) < 1e-12
    assert stationarity_residual(w, maximally_mixed(4)) > 1e-3


def test_unconverged_flagged_not_silently_accepted(triangle6):
    w = _model_liouvillian(triangle6, delta=1.0)
    sol = evolve_to_ness(w, None, PropagationOptions(
        t_final=0.5, checkpoint_interval=0.5, stationarity_tol=1e-12))
    assert not sol.converged
    assert sol.converged_at is None
    assert sol.residual > 1e-12


def test_rejects_non_density_initial_states(chain2):
    w = _model_liouvillian(chain2, delta=0.0)
    bad_trace = vectorize(np.diag([2.0, 0.0, 0.0, 0.0]).astype(complex))
    with pytest.raises(ValueError, match="trace"):
        evolve_to_ness(w, bad_trace)
    nonherm = np.zeros((4, 4), dtype=complex)
    nonherm[0, 1] = 1.0
    nonherm[0, 0] = 1.0
    with pytest.raises(ValueError, match="Hermitian"):
        evolve_to_ness(w, vectorize(nonherm))
    negative = np.diag([1.5, -0.5, 0.0, 0.0]).astype(complex)
    with pytest.raises(ValueError, match="negative eigenvalue"):
        evolve_to_ness(w, vectorize(negative))


def test_degenerate_null_space_reported_small():
    # pure dephasing: every diagonal state is stationary
    h = sp.csr_matrix((2, 2), dtype=complex)
    L = sp.csr_matrix(SIGMA_Z)
    w = build_liouvillian(h, [(L, 1.0)], repr="sparse")
    with pytest.raises(DegenerateSteadyStateError) as err:
        solve_ness_dense(w)
    assert err.value.second < 1e-12


def test_degenerate_null_space_reported_sparse_path():
    # five dephasing sites: 1024-dimensional generator with a huge null space
    n = 5
    h = sp.csr_matrix((2 ** n, 2 ** n), dtype=complex)
    jumps = [(embed_site_operator(n, s, SIGMA_Z), 1.0) for s in range(1, n + 1)]
    w = build_liouvillian(h, jumps, repr="sparse")
    with pytest.raises(DegenerateSteadyStateError):
        solve_ness_dense(w)


def test_dense_oracle_size_guard():
    spec = build_geometry(GeometryKind.ASYM8)
    w = _model_liouvillian(spec, delta=0.0, repr="matrix-free")
    with pytest.raises(ValueError, match="dense oracle"):
        solve_ness_dense(w)


def test_rk4_cross_validation(chain2):
    w = _model_liouvillian(chain2, delta=0.3, repr="sparse")
    dense = solve_ness_dense(w)
    state = rk4_propagate(w, maximally_mixed(4), t_final=60.0, dt=0.02)
    rho = devectorize(state)
    rho = 0.5 * (rho + rho.conj().T)
    rho /= np.trace(rho).real
    assert np.abs(vectorize(rho) - dense.state).max() < 1e-6


def test_propagation_options_validation():
    with pytest.raises(ValueError):
        PropagationOptions(t_final=-1.0)
    with pytest.raises(ValueError):
        PropagationOptions(krylov_dim=1)
    with pytest.raises(ValueError):
        PropagationOptions(stationarity_tol=0.0)


def test_collective_drain_dark_states_detected(triangle6):
    """A collective drain leaves right-column superpositions undamped on
    the six-site triangle, so the stationary manifold is degenerate and
    the dense oracle must refuse to pick a state."""
    params = model(triangle6, delta=0.5)
    drive = DriveSpec(DriveMode.COLLECTIVE_UNIFORM, DriveDirection.FORWARD)
    with pytest.raises(DegenerateSteadyStateError):
        solve_steady_state(triangle6, params, drive, method="dense")


@pytest.mark.parametrize("mode", [DriveMode.SEPARATE, DriveMode.COLLECTIVE_UNIFORM,
                                  DriveMode.COLLECTIVE_PHASED])
def test_transient_agrees_across_engines(triangle6, mode):
    """Finite-time propagation must not depend on whether the reduced
    (magnetization-blocked) engine or the explicit-sparse one runs it."""
    params = model(triangle6, delta=0.5)
    from spinrect import build_hamiltonian, build_jump_operators
    h = build_hamiltonian(triangle6, params)
    jumps = build_jump_operators(triangle6, params, DriveSpec(mode, DriveDirection.FORWARD))
    opts = PropagationOptions(t_final=5.0, checkpoint_interval=5.0,
                              stationarity_tol=1e-16, krylov_dim=20, step_tol=1e-9)
    reduced = evolve_to_ness(build_liouvillian(h, jumps, repr="matrix-free"), None, opts)
    full = evolve_to_ness(build_liouvillian(h, jumps, repr="sparse"), None, opts)
    assert np.abs(reduced.state - full.state).max() < 1e-8


def test_sector_reduction_consistency(triangle6):
    """The reduced propagation must agree with a forced full-space one."""
    w = _model_liouvillian(triangle6, delta=0.5, repr="matrix-free")
    opts = PropagationOptions(stationarity_tol=1e-10)
    reduced = evolve_to_ness(w, None, opts)              # mixed state: reducible
    rng = np.random.default_rng(23)
    a = rng.standard_normal((64, 64)) + 1j * rng.standard_normal((64, 64))
    rho0 = a @ a.conj().T
    rho0 /= np.trace(rho0)
    full = evolve_to_ness(w, vectorize(rho0), opts)      # generic state: full space
    assert np.abs(reduced.state - full.state).max() < 1e-8
