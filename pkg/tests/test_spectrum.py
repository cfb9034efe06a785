import csv
import io
import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from galosc import spectrum
from galosc.spectrum import (
    allowed_two_j,
    closed_form_energy,
    enumerate_levels,
    lambda_energy,
    ls_bruteforce_eigenvalues,
    ls_closed_form_eigenvalues,
    spin_half_special,
)


@pytest.mark.parametrize(
    "args, expected",
    [((1, 2, 5, 1), 2), ((1, 2, 3, 1), 7), ((0, 1, 0, 2), 3), ((2, 3, 6, 0), 7)],
)
def test_closed_form_examples(args, expected):
    assert closed_form_energy(*args) == expected


@pytest.mark.parametrize("args", [(0, 1, 5, 1), (0, 0, 1, 2), (0, 2, 3, 0), (-1, 0, 1, 1)])
def test_closed_form_rejects_invalid_quantum_numbers(args):
    with pytest.raises(ValueError):
        closed_form_energy(*args)


def test_spin_half_examples():
    assert spin_half_special(3, 0, "plus") == 6
    assert spin_half_special(0, 1, "minus") == 3
    with pytest.raises(ValueError):
        spin_half_special(0, 0, "minus")
    with pytest.raises(ValueError):
        spin_half_special(0, 0, "up")


def test_spin_half_branches_agree_with_general_formula():
    for n in range(11):
        for l in range(11):
            assert spin_half_special(n, l, "plus") == closed_form_energy(n, l, 2 * l + 1, 1)
            if l:
                assert spin_half_special(n, l, "minus") == closed_form_energy(n, l, 2 * l - 1, 1)


def test_positivity_exhaustive():
    for two_s in range(13):
        for l in range(13):
            for two_j in allowed_two_j(l, two_s):
                for n in range(3):
                    assert closed_form_energy(n, l, two_j, two_s) >= 0


@given(st.integers(0, 20), st.integers(0, 20), st.integers(1, 20))
def test_stretched_state_has_pure_radial_energy(n, l, two_s):
    assert closed_form_energy(n, l, 2 * l + two_s, two_s) == 2 * n


@given(st.integers(0, 8), st.integers(0, 8), st.integers(1, 8), st.fractions(-3, 3, max_denominator=8))
def test_lambda_energy_is_affine(n, l, two_s, lam):
    for two_j in allowed_two_j(l, two_s):
        e0 = lambda_energy(n, l, two_j, two_s, 0)
        e1 = lambda_energy(n, l, two_j, two_s, 1)
        assert e0 == 2 * n + l
        assert e1 == closed_form_energy(n, l, two_j, two_s)
        assert lambda_energy(n, l, two_j, two_s, lam) == e0 + lam * (e1 - e0)


def test_lambda_examples():
    for two_j in (0, 2, 4):
        assert lambda_energy(0, 1, two_j, 2, 0) == 1
    assert lambda_energy(0, 1, 0, 2, Fraction(1, 2)) == 2
    assert lambda_energy(0, 1, 0, 2, "1/2") == 2
    assert lambda_energy(0, 1, 0, 2, 0.5) == 2


@pytest.mark.parametrize("l", range(5))
@pytest.mark.parametrize("two_s", range(7))
def test_spin_orbit_eigenvalues_match_bruteforce(l, two_s):
    brute = ls_bruteforce_eigenvalues(l, two_s)
    assert np.max(np.abs(brute - ls_closed_form_eigenvalues(l, two_s))) <= 1e-10


def test_spin_matrix_conventions():
    sx, sy, sz = spectrum.spin_matrices(2)
    assert np.allclose(np.diag(sz), [1, 0, -1])
    assert np.allclose(sx @ sy - sy @ sx, 1j * sz)


def test_enumerate_ground_level():
    table = enumerate_levels(2, 0, 0)
    assert [(r.n, r.l, r.two_j, r.multiplicity) for r in table.rows] == [(0, 0, 2, 3)]
    table = enumerate_levels(2, 0, 5)
    assert [(r.n, r.l, r.two_j) for r in table.rows] == [(0, l, 2 * l + 2) for l in range(6)]
    assert table.degeneracy(0, l=0) == 3
    assert table.degeneracy(0) == sum(2 * l + 3 for l in range(6))


def test_enumerate_spin_zero():
    table = enumerate_levels(0, 2, 6)
    got = [(r.n, r.l, r.energy_over_omega) for r in table.rows]
    assert got == [(0, 0, 0), (0, 1, 1), (1, 0, 2), (0, 2, 2)]


@pytest.mark.parametrize("two_s", range(1, 9))
def test_ground_degeneracy_of_s_wave(two_s):
    table = enumerate_levels(two_s, 0, 0)
    assert table.degeneracy(0, l=0) == two_s + 1


@pytest.mark.parametrize("two_s", [0, 1, 3])
def test_enumeration_is_exhaustive_and_sorted(two_s):
    e_max, l_max = Fraction(9, 2), 4
    table = enumerate_levels(two_s, e_max, l_max)
    keys = [(r.energy_over_omega, r.l, r.two_j, r.n) for r in table.rows]
    assert keys == sorted(keys)
    brute = {
        (n, l, tj)
        for n in range(10)
        for l in range(l_max + 1)
        for tj in allowed_two_j(l, two_s)
        if closed_form_energy(n, l, tj, two_s) <= e_max
    }
    assert {(r.n, r.l, r.two_j) for r in table.rows} == brute
    assert sum(table.aggregate.values()) == sum(r.multiplicity for r in table.rows)


def test_table_exports():
    table = enumerate_levels(1, 4, 2)
    rows = list(csv.reader(io.StringIO(table.to_csv())))
    assert tuple(rows[0]) == spectrum.CSV_COLUMNS
    assert len(rows) == len(table.rows) + 1
    doc = json.loads(table.to_json())
    assert doc["cutoffs"] == {"e_max": {"num": 4, "den": 1}, "l_max": 2, "n_max": 2}
    first = doc["rows"][0]
    assert first["energy"] == {"num": 0, "den": 1}
    assert table.to_csv() == enumerate_levels(1, 4, 2).to_csv()


def test_spin_half_low_lying_pattern():
    # plus branch gives the even ladder, minus branch starts at 2l + 1 = 3
    energies = set(enumerate_levels(1, 4, 6).aggregate)
    assert energies == {Fraction(k) for k in (0, 2, 3, 4)}


def test_enumerate_rejects_negative_cutoffs():
    with pytest.raises(ValueError):
        enumerate_levels(1, -1, 2)
