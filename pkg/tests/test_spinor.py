from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.spatial.transform import Rotation

from galosc import spinor
from galosc.exact import I, FormalPolynomial, SymbolicMatrix
from galosc.spinor import (
    BilinearForm,
    BoostParameters,
    Symmetry,
    build_boost_matrix,
    build_generators,
    build_wave_operator,
    coupling_analysis,
    expand_index_lagrangian,
    expand_trace_lagrangian,
    parametrize_bispinor,
    reference_lagrangian,
)

GOLDEN = Path(__file__).parent / "golden"
P = FormalPolynomial.symbol
EPS = {(0, 1, 2): 1, (1, 2, 0): 1, (2, 0, 1): 1, (0, 2, 1): -1, (2, 1, 0): -1, (1, 0, 2): -1}
SIGMA = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]])


@pytest.fixture(scope="module")
def gens():
    return build_generators()


def test_gamma_is_projector(gens):
    gamma = gens["Gamma"]
    assert gamma @ gamma == gamma
    assert gens["A"] == gamma
    one = SymbolicMatrix.identity(4)
    assert (gamma @ (one - gens["rho3"])).is_zero()


def test_pauli_sets_commute(gens):
    for i in range(1, 4):
        for j in range(1, 4):
            s, r = gens[f"sigma{i}"], gens[f"rho{j}"]
            assert (s @ r - r @ s).is_zero()


@pytest.mark.parametrize("name", ["sigma", "rho"])
def test_pauli_multiplication_table(gens, name):
    one = SymbolicMatrix.identity(4)
    for i in range(3):
        for j in range(3):
            expected = one if i == j else SymbolicMatrix.zeros(4)
            for k in range(3):
                e = EPS.get((i, j, k), 0)
                if e:
                    expected = expected + gens[f"{name}{k + 1}"].scale(I * e)
            assert gens[f"{name}{i + 1}"] @ gens[f"{name}{j + 1}"] == expected


def test_mass_term_entries(gens):
    c = gens["C"]
    nonzero = {(i, j): c[i, j] for i in range(4) for j in range(4) if c[i, j]}
    assert set(nonzero) == {(2, 2), (3, 3)}
    assert all(v == P("M") * 2 for v in nonzero.values())


def test_wave_operator_entries():
    g0 = build_wave_operator(False)
    # B3 = rho1 sigma3 couples the upper spin-up letter to the lower spin-up letter
    assert g0[2, 0] == P("d3") * -I
    assert g0[0, 0] == P("dt") * I
    g = build_wave_operator(True)
    assert g[2, 0] == P("d3") * -I - P("M") * P("w") * P("r3") * I


def test_oscillator_terms_are_linear_in_r_and_mass():
    g = build_wave_operator(True)
    for i in range(4):
        for j in range(4):
            part = g[i, j].part_with("w")
            for exp in part.terms:
                named = dict(zip(("dt", "d1", "d2", "d3", "r1", "r2", "r3", "M", "w", "lam"), exp))
                assert named["r1"] + named["r2"] + named["r3"] == 1
                assert named["M"] == 1
                assert named["w"] == 1


def test_zero_frequency_recovers_free_operator():
    assert build_wave_operator(True).map(lambda p: p.substitute_zero("w")) == build_wave_operator(False)


# --- boosts ---------------------------------------------------------------------------


def test_boost_identity():
    assert np.allclose(build_boost_matrix(BoostParameters(np.zeros(3))), np.eye(4), atol=1e-15)


@given(
    st.lists(st.floats(-5, 5), min_size=3, max_size=3),
    st.lists(st.floats(-5, 5), min_size=3, max_size=3),
)
def test_pure_boosts_compose(v1, v2):
    d1 = build_boost_matrix(BoostParameters(v1))
    d2 = build_boost_matrix(BoostParameters(v2))
    d12 = build_boost_matrix(BoostParameters(np.add(v1, v2)))
    assert np.max(np.abs(d1 @ d2 - d12)) <= 1e-12


def test_upper_components_never_mix():
    rng = np.random.default_rng(7)
    for _ in range(20):
        R = Rotation.random(random_state=rng).as_matrix()
        delta = build_boost_matrix(BoostParameters(rng.normal(size=3), R))
        assert np.all(delta[:2, 2:] == 0)


@settings(max_examples=40)
@given(st.integers(0, 2**32 - 1))
def test_rotation_images(seed):
    rng = np.random.default_rng(seed)
    r1, r2 = (Rotation.random(random_state=rng).as_matrix() for _ in range(2))
    u1, u2 = spinor.su2_image(r1), spinor.su2_image(r2)
    assert np.real(np.trace(u1)) >= 0
    for j in range(3):
        lhs = u1 @ SIGMA[j] @ u1.conj().T
        assert np.max(np.abs(lhs - np.einsum("i,ikl->kl", r1[:, j], SIGMA))) <= 1e-12
    # projective group law
    u12 = spinor.su2_image(r1 @ r2)
    prod = u1 @ u2
    assert min(np.max(np.abs(prod - u12)), np.max(np.abs(prod + u12))) <= 1e-12
    d = build_boost_matrix(BoostParameters(np.zeros(3), r1)) @ build_boost_matrix(BoostParameters(np.zeros(3), r2))
    d12 = build_boost_matrix(BoostParameters(np.zeros(3), r1 @ r2))
    assert min(np.max(np.abs(d - d12)), np.max(np.abs(d + d12))) <= 1e-12


def test_boost_rejects_improper_rotation():
    with pytest.raises(ValueError):
        BoostParameters(np.zeros(3), np.diag([1.0, 1.0, -1.0]))
    with pytest.raises(ValueError):
        BoostParameters(np.zeros(3), np.diag([1.0, 2.0, 0.5]))


# --- bispinors and Lagrangians --------------------------------------------------------


@pytest.mark.parametrize("symmetry, sign", [("symmetric", 1), ("antisymmetric", -1)])
def test_bispinor_symmetry(symmetry, sign):
    for _, mat in parametrize_bispinor(symmetry, include_absent=True):
        assert mat.T == mat.scale(sign)


def test_symmetric_bispinor_has_seven_fields():
    psi = parametrize_bispinor(Symmetry.SYMMETRIC)
    assert len(psi.labels) == 7
    assert {lab.name for lab in psi.labels} == {"X1", "X2", "X3", "Y1", "Y2", "Y3", "Z"}
    assert psi.label("Z").kind == "constrained"


def test_bispinor_components_are_independent():
    psi = parametrize_bispinor("symmetric", include_absent=True)
    vecs = [m.to_complex().ravel() for _, m in psi]
    assert np.linalg.matrix_rank(np.array(vecs)) == 10


@pytest.mark.parametrize("symmetry", ["symmetric", "antisymmetric"])
@pytest.mark.parametrize("osc", [True, False])
def test_trace_expansion_matches_transcription(symmetry, osc):
    trace = expand_trace_lagrangian(symmetry, osc)
    assert trace == reference_lagrangian(symmetry, osc)
    assert expand_index_lagrangian(symmetry, osc) == trace


def test_spin1_coefficients():
    L = expand_trace_lagrangian("symmetric")
    two_m = P("M") * 2
    for k in (1, 2, 3):
        assert L.coefficient(f"Y{k}", f"Y{k}") == two_m
        assert L.coefficient(f"X{k}", f"X{k}") == P("dt") * I
    assert L.coefficient("Z", "Z") == two_m


def test_spin0_coefficients():
    L = expand_trace_lagrangian("antisymmetric")
    mw = P("M") * P("w")
    for k in (1, 2, 3):
        assert L.coefficient("C", f"A{k}").part_with("w") == -mw * P(f"r{k}")
        assert L.coefficient(f"A{k}", "C").part_with("w") == -mw * P(f"r{k}")
    free = expand_trace_lagrangian("antisymmetric", with_oscillator=False)
    assert free.coefficient("B", "B") == P("M") * 2
    assert [key for key in free.normal_form().terms if "B" in key[:2]] == [("B", "B", None)]


def test_lower_block_components_do_not_contribute():
    extended = expand_trace_lagrangian("symmetric", include_absent=True)
    assert not any(extended.involves(f"W{k}") for k in (1, 2, 3))
    assert extended == expand_trace_lagrangian("symmetric")


def test_integration_by_parts_normal_form():
    # (d1 u)^* r1 w  ==  -u^* w - u^* r1 d1 w
    form = BilinearForm().add("u", "w", P("r1"), star_deriv="d1")
    expected = BilinearForm().add("u", "w", -1).add("u", "w", -P("r1") * P("d1"))
    assert form == expected
    # time derivative carries no coefficient derivative
    form = BilinearForm().add("u", "w", P("r1"), star_deriv="dt")
    assert form == BilinearForm().add("u", "w", -P("r1") * P("dt"))
    with pytest.raises(ValueError):
        BilinearForm().add("u", "w", 1, star_deriv="x")


@pytest.mark.parametrize("symmetry, name", [("symmetric", "lagrangian_spin1"), ("antisymmetric", "lagrangian_spin0")])
def test_golden_term_tables(symmetry, name):
    golden = (GOLDEN / f"{name}.txt").read_text()
    assert expand_trace_lagrangian(symmetry).to_table() == golden


@pytest.mark.parametrize(
    "rank, total, retained", [(1, 4, 4), (2, 10, 7), (4, 35, 13)]
)
def test_coupling_examples(rank, total, retained):
    ca = coupling_analysis(rank)
    assert (ca.total, ca.n_retained) == (total, retained)
    assert ca.as_dict() == {"two_s": rank, "total": total, "retained": retained}


@pytest.mark.parametrize("rank", range(1, 9))
def test_coupling_sectors(rank):
    ca = coupling_analysis(rank)
    assert ca.total == (rank + 1) * (rank + 2) * (rank + 3) // 6
    assert ca.n_retained == 3 * rank + 1
    assert all(k[2] + k[3] <= 1 for k in ca.retained)
    assert all(k[2] + k[3] >= 2 for k in ca.decoupled)


@pytest.mark.parametrize("rank", [0, 9])
def test_coupling_rank_range(rank):
    with pytest.raises(ValueError):
        coupling_analysis(rank)
