import itertools
from math import comb

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st

from galosc import engine
from galosc.spectrum import spin_matrices
from galosc.symmetric import GAMMA_DIAG, SymmetricSpinBasis, build_symmetric_action, occupations


def tensor_oracle(two_s, op, diag):
    """Sum_i D..op_i..D on the full 4**two_s space, restricted to symmetric states."""
    D = np.diag(diag).astype(complex)
    full = np.zeros((4**two_s, 4**two_s), dtype=complex)
    for i in range(two_s):
        factors = [D] * two_s
        factors[i] = op
        term = factors[0]
        for f in factors[1:]:
            term = np.kron(term, f)
        full += term
    basis = SymmetricSpinBasis(two_s)
    vecs = np.zeros((4**two_s, basis.dim))
    for col, k in enumerate(basis.occupations):
        letters = [a for a in range(4) for _ in range(k[a])]
        for perm in set(itertools.permutations(letters)):
            idx = 0
            for a in perm:
                idx = 4 * idx + a
            vecs[idx, col] = 1.0
        vecs[:, col] /= np.linalg.norm(vecs[:, col])
    return vecs.T @ full @ vecs


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 3), st.integers(0, 2**32 - 1), st.booleans())
def test_lift_matches_tensor_product(two_s, seed, gamma):
    rng = np.random.default_rng(seed)
    op = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    diag = GAMMA_DIAG if gamma else (1, 1, 1, 1)
    lifted = SymmetricSpinBasis(two_s).lift(op, diag)
    assert np.max(np.abs(lifted - tensor_oracle(two_s, op, diag))) <= 1e-12


@pytest.mark.parametrize("two_s", range(1, 7))
def test_sector_sizes(two_s):
    basis = SymmetricSpinBasis(two_s)
    assert basis.dim == (two_s + 1) * (two_s + 2) * (two_s + 3) // 6
    assert len(basis.phi) == two_s + 1
    assert len(basis.chi) == 2 * two_s
    assert basis.dim == len(basis.phi) + len(basis.chi) + len(basis.rest)
    assert sum(basis.norm_weight(k) for k in basis.occupations) == 4**two_s


def test_occupation_order():
    assert occupations(2)[:3] == ((2, 0, 0, 0), (1, 1, 0, 0), (0, 2, 0, 0))
    assert occupations(2, letters=2) == ((2, 0), (1, 1), (0, 2))
    assert len(occupations(5, letters=3)) == comb(7, 2)


def test_single_index_lift_is_identity():
    op = np.arange(16).reshape(4, 4).astype(complex)
    assert np.array_equal(SymmetricSpinBasis(1).lift(op), op)


def test_gamma_average_sector_values():
    basis = SymmetricSpinBasis(2)
    gamma = np.diag([1.0, 1.0, 0.0, 0.0])
    # index average of Gamma: fraction of upper letters in each occupation
    avg = basis.lift(gamma) / 2
    assert np.allclose(avg, np.diag(np.diag(avg)))
    diag = np.real(np.diag(avg))
    assert np.allclose(diag[basis.phi], 1.0)
    assert np.allclose(diag[basis.chi], 0.5)
    assert np.allclose(diag[basis.rest], 0.0)
    # with Gamma spectators only the upper-only sector survives
    assert np.allclose(basis.lift(gamma, GAMMA_DIAG)[np.ix_(basis.chi, basis.chi)], 0.0)


def test_action_on_product_space():
    fock = sp.diags([1.0, 2.0, 3.0]).tocsr()
    op = np.diag([1.0, 0.0, 0.0, 0.0]).astype(complex)
    act = build_symmetric_action(2, [(op, fock)], average=False)
    basis = SymmetricSpinBasis(2)
    expected = sp.kron(basis.lift(op), fock)
    assert abs(act - expected).max() == 0
    with pytest.raises(ValueError):
        build_symmetric_action(2, [(op, fock), (op, sp.identity(4))])
    with pytest.raises(ValueError):
        build_symmetric_action(2, [])


@pytest.mark.parametrize("two_s", range(1, 7))
def test_spin_matrices(two_s):
    S = engine.build_spin_matrices(two_s)
    for a, b in zip(S, spin_matrices(two_s)):
        assert np.max(np.abs(a - b)) <= 1e-12
    s = two_s / 2
    casimir = sum(m @ m for m in S)
    assert np.max(np.abs(casimir - s * (s + 1) * np.eye(two_s + 1))) <= 1e-12
    eps = {(0, 1, 2), (1, 2, 0), (2, 0, 1)}
    for i, j, k in eps:
        assert np.max(np.abs(S[i] @ S[j] - S[j] @ S[i] - 1j * S[k])) <= 1e-12


def test_spin_half_matrices_are_half_pauli():
    S = engine.build_spin_matrices(1)
    pauli = [np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.diag([1, -1])]
    for a, b in zip(S, pauli):
        assert np.allclose(a, 0.5 * b, atol=1e-15)
    assert np.allclose(np.linalg.eigvalsh(engine.build_spin_matrices(2)[2]), [-1, 0, 1])
