"""Closed-form spectrum of the spin-S Galilean oscillator.

Energies are returned in units of omega as exact ``Fraction`` values.
Spins are passed doubled (``two_j``, ``two_s``) to stay integral.
"""

from __future__ import annotations

import csv
import io
import json
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

CSV_COLUMNS = ("n", "l", "two_j", "two_s", "energy_num", "energy_den", "multiplicity")


def _check_quantum_numbers(n: int, l: int, two_j: int, two_s: int) -> None:
    if n < 0 or l < 0 or two_s < 0:
        raise ValueError("n, l and two_s must be nonnegative")
    if two_j < abs(2 * l - two_s) or two_j > 2 * l + two_s or (two_j - 2 * l - two_s) % 2:
        raise ValueError(f"j = {two_j}/2 not allowed for l = {l}, S = {two_s}/2")


def ls_eigenvalue(l: int, two_j: int, two_s: int) -> Fraction:
    """<L.S> = [j(j+1) - l(l+1) - S(S+1)] / 2 on a state of definite j."""
    j, s = Fraction(two_j, 2), Fraction(two_s, 2)
    return (j * (j + 1) - l * (l + 1) - s * (s + 1)) / 2


def closed_form_energy(n: int, l: int, two_j: int, two_s: int) -> Fraction:
    """E/omega = 2n + [(l+S)(l+S+1) - j(j+1)] / 2S, and 2n + l for spin 0."""
    _check_quantum_numbers(n, l, two_j, two_s)
    if two_s == 0:
        return Fraction(2 * n + l)
    j, s = Fraction(two_j, 2), Fraction(two_s, 2)
    return 2 * n + ((l + s) * (l + s + 1) - j * (j + 1)) / (2 * s)


def spin_half_special(n: int, l: int, j_branch: str) -> Fraction:
    """Two-branch spin-1/2 spectrum: 2n for j = l + 1/2, 2n + 2l + 1 for j = l - 1/2."""
    if j_branch == "plus":
        return Fraction(2 * n)
    if j_branch == "minus":
        if l < 1:
            raise ValueError("j = l - 1/2 requires l >= 1")
        return Fraction(2 * n + 2 * l + 1)
    raise ValueError(f"unknown branch {j_branch!r}")


def as_fraction(x) -> Fraction:
    """Exact rational from an int, Fraction, decimal string or float (binary value)."""
    return x if isinstance(x, Fraction) else Fraction(x)


def lambda_energy(n: int, l: int, two_j: int, two_s: int, lam=1) -> Fraction:
    """Spectrum with spin-orbit term scaled by ``lam``: 2n + l - (lam/S) <L.S>."""
    _check_quantum_numbers(n, l, two_j, two_s)
    lam = as_fraction(lam)
    if two_s == 0:
        return Fraction(2 * n + l)
    s = Fraction(two_s, 2)
    return 2 * n + l - lam * ls_eigenvalue(l, two_j, two_s) / s


def allowed_two_j(l: int, two_s: int) -> range:
    """Doubled j values from |l - S| to l + S."""
    return range(abs(2 * l - two_s), 2 * l + two_s + 1, 2)


@dataclass(frozen=True, order=True)
class SpectrumLevel:
    n: int
    l: int
    two_j: int
    two_s: int
    energy_over_omega: Fraction = field(compare=False)

    @property
    def j(self) -> Fraction:
        return Fraction(self.two_j, 2)

    @property
    def multiplicity(self) -> int:
        return self.two_j + 1

    def row(self) -> tuple:
        e = self.energy_over_omega
        return (self.n, self.l, self.two_j, self.two_s, e.numerator, e.denominator, self.multiplicity)


@dataclass
class LevelTable:
    two_s: int
    e_max: Fraction
    l_max: int
    n_max: int
    rows: list[SpectrumLevel]

    @property
    def aggregate(self) -> dict[Fraction, int]:
        agg: dict[Fraction, int] = defaultdict(int)
        for lvl in self.rows:
            agg[lvl.energy_over_omega] += lvl.multiplicity
        return dict(sorted(agg.items()))

    def degeneracy(self, energy=0, l: int | None = None) -> int:
        e = as_fraction(energy)
        return sum(
            lvl.multiplicity
            for lvl in self.rows
            if lvl.energy_over_omega == e and (l is None or lvl.l == l)
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for lvl in self.rows:
            writer.writerow(lvl.row())
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "cutoffs": {
                "e_max": {"num": self.e_max.numerator, "den": self.e_max.denominator},
                "l_max": self.l_max,
                "n_max": self.n_max,
            },
            "rows": [
                {
                    "n": lvl.n,
                    "l": lvl.l,
                    "two_j": lvl.two_j,
                    "two_s": lvl.two_s,
                    "energy": {
                        "num": lvl.energy_over_omega.numerator,
                        "den": lvl.energy_over_omega.denominator,
                    },
                    "multiplicity": lvl.multiplicity,
                }
                for lvl in self.rows
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def enumerate_levels(two_s: int, e_max, l_max: int, lam=1) -> LevelTable:
    """All (n, l <= l_max, j) with E/omega <= e_max, sorted by (E, l, j, n)."""
    e_max = as_fraction(e_max)
    if e_max < 0 or l_max < 0 or two_s < 0:
        raise ValueError("cutoffs must be nonnegative")
    n_max = int(e_max // 2)
    rows = []
    for l in range(l_max + 1):
        for two_j in allowed_two_j(l, two_s):
            for n in range(n_max + 1):
                e = lambda_energy(n, l, two_j, two_s, lam)
                if e <= e_max:
                    rows.append(SpectrumLevel(n, l, two_j, two_s, e))
    rows.sort(key=lambda v: (v.energy_over_omega, v.l, v.two_j, v.n))
    return LevelTable(two_s, e_max, l_max, n_max, rows)


def shell_levels(big_n: int, two_s: int, lam=1) -> list[SpectrumLevel]:
    """Levels in the oscillator shell with 2n + l = big_n."""
    out = []
    for l in range(big_n % 2, big_n + 1, 2):
        for two_j in allowed_two_j(l, two_s):
            n = (big_n - l) // 2
            out.append(SpectrumLevel(n, l, two_j, two_s, lambda_energy(n, l, two_j, two_s, lam)))
    return out


def spin_matrices(two_j: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Irreducible spin-j matrices in the basis m = j, j-1, ..., -j."""
    j = two_j / 2
    m = j - np.arange(two_j + 1)
    jz = np.diag(m).astype(complex)
    # <m+1|J+|m> above the diagonal
    jp = np.diag(np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1)), 1).astype(complex)
    jm = jp.conj().T
    return ((jp + jm) / 2, (jp - jm) / 2j, jz)


def ls_bruteforce_eigenvalues(l: int, two_s: int) -> np.ndarray:
    """Eigenvalues of L.S on the (2l+1)(2S+1) product space, by diagonalization."""
    lmat = spin_matrices(2 * l)
    smat = spin_matrices(two_s)
    ls = sum(np.kron(a, b) for a, b in zip(lmat, smat))
    return np.linalg.eigvalsh(ls)


def ls_closed_form_eigenvalues(l: int, two_s: int) -> np.ndarray:
    vals = []
    for two_j in allowed_two_j(l, two_s):
        vals += [float(ls_eigenvalue(l, two_j, two_s))] * (two_j + 1)
    return np.sort(np.array(vals))
