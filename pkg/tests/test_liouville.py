import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import model, small_geometry_family, two_site_chain, vee3

from spinrect import (
    DriveSpec,
    apply_liouvillian,
    build_hamiltonian,
    build_jump_operators,
    build_liouvillian,
    devectorize,
    vectorize,
)
from spinrect.operators import SIGMA_PLUS


def test_vectorize_column_stacking():
    m = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert np.array_equal(vectorize(m), [1.0, 3.0, 2.0, 4.0])


def test_vectorize_identity():
    assert np.array_equal(vectorize(np.eye(2)), [1.0, 0.0, 0.0, 1.0])


@given(st.integers(min_value=1, max_value=8), st.integers(min_value=0, max_value=2**31 - 1))
@settings(max_examples=30, deadline=None)
def test_devectorize_roundtrip(d, seed):
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    assert np.array_equal(devectorize(vectorize(m)), m)


def test_devectorize_rejects_non_square_length():
    with pytest.raises(ValueError, match="not a stacked square"):
        devectorize(np.zeros(5))


def test_vectorize_rejects_non_square():
    with pytest.raises(ValueError):
        vectorize(np.zeros((2, 3)))


def test_vec_of_triple_product_identity():
    rng = np.random.default_rng(7)
    for d in (2, 3, 4, 8):
        for _ in range(10):
            a, b, c = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
                       for _ in range(3))
            left = vectorize(a @ b @ c)
            right = np.kron(c.T, a) @ vectorize(b)
            assert np.abs(left - right).max() < 1e-13 * max(1.0, np.abs(left).max())


def test_single_site_pump_generator():
    h = sp.csr_matrix((2, 2), dtype=complex)
    L = sp.csr_matrix(np.sqrt(2.0) * SIGMA_PLUS)
    w = build_liouvillian(h, [(L, 1.0)], repr="sparse")
    want = np.array([
        [0.0, 0.0, 0.0, 2.0],
        [0.0, -1.0, 0.0, 0.0],
        [0.0, 0.0, -1.0, 0.0],
        [0.0, 0.0, 0.0, -2.0],
    ])
    assert np.abs(w.matrix.toarray() - want).max() < 1e-15
    # unique steady state is the pumped-up projector
    assert np.abs(w.matrix @ vectorize(np.diag([1.0, 0.0]))).max() == 0.0


def test_zero_generator():
    h = sp.csr_matrix((4, 4), dtype=complex)
    w = build_liouvillian(h, [], repr="sparse")
    assert w.matrix.nnz == 0
    wf = build_liouvillian(h, [], repr="matrix-free")
    v = np.arange(16, dtype=complex)
    assert np.abs(apply_liouvillian(wf, v)).max() == 0.0


def _assemble(spec, delta):
    params = model(spec, delta=delta)
    h = build_hamiltonian(spec, params)
    jumps = build_jump_operators(spec, params, DriveSpec())
    return h, jumps


@pytest.mark.parametrize("name,spec", small_geometry_family()[:4])
def test_cross_representation_agreement(name, spec):
    h, jumps = _assemble(spec, delta=0.6)
    w_sparse = build_liouvillian(h, jumps, repr="sparse")
    w_free = build_liouvillian(h, jumps, repr="matrix-free")
    rng = np.random.default_rng(11)
    for _ in range(5):
        v = rng.standard_normal(w_sparse.dim) + 1j * rng.standard_normal(w_sparse.dim)
        a = apply_liouvillian(w_sparse, v)
        b = apply_liouvillian(w_free, v)
        assert np.abs(a - b).max() < 1e-12 * max(1.0, np.abs(a).max())


def test_matches_matrix_unit_oracle():
    spec = vee3()
    params = model(spec, delta=0.4)
    h = build_hamiltonian(spec, params)
    jumps = build_jump_operators(spec, params, DriveSpec())
    w = build_liouvillian(h, jumps, repr="sparse").matrix.toarray()
    want = oracles.lindblad_matrix(
        h.toarray(), [(L.toarray(), g) for L, g in jumps]
    )
    assert np.abs(w - want).max() < 1e-12


@pytest.mark.parametrize("name,spec", small_geometry_family()[:3])
def test_trace_preservation_random_states(name, spec):
    h, jumps = _assemble(spec, delta=1.2)
    w = build_liouvillian(h, jumps)
    rng = np.random.default_rng(3)
    n = w.n
    for _ in range(100):
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        rho = a + a.conj().T
        out = devectorize(apply_liouvillian(w, vectorize(rho)))
        assert abs(np.trace(out)) < 1e-12 * max(1.0, np.abs(out).max())


@pytest.mark.parametrize("name,spec", small_geometry_family()[:3])
def test_hermiticity_preservation(name, spec):
    h, jumps = _assemble(spec, delta=-0.5)
    w = build_liouvillian(h, jumps)
    rng = np.random.default_rng(5)
    n = w.n
    for _ in range(25):
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        rho = a + a.conj().T
        out = devectorize(apply_liouvillian(w, vectorize(rho)))
        assert np.abs(out - out.conj().T).max() < 1e-12 * max(1.0, np.abs(out).max())


@pytest.mark.parametrize("name,spec", small_geometry_family()[:2])
def test_spectrum_in_left_half_plane(name, spec):
    h, jumps = _assemble(spec, delta=0.9)
    w = build_liouvillian(h, jumps, repr="sparse")
    vals = np.linalg.eigvals(w.matrix.toarray())
    assert vals.real.max() <= 1e-10
    assert np.abs(vals).min() < 1e-12


def test_dimension_mismatch_raises():
    h = sp.csr_matrix(np.zeros((2, 2), dtype=complex))
    bad = sp.csr_matrix(np.zeros((4, 4), dtype=complex))
    with pytest.raises(ValueError, match="does not match"):
        build_liouvillian(h, [(bad, 1.0)])
    w = build_liouvillian(h, [])
    with pytest.raises(ValueError, match="expected"):
        apply_liouvillian(w, np.zeros(9, dtype=complex))
