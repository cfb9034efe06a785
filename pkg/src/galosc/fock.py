"""Truncated 3D harmonic-oscillator space in the Cartesian occupation basis."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

PAULI = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex)
LEVI_CIVITA = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    LEVI_CIVITA[_i, _j, _k] = 1.0
    LEVI_CIVITA[_i, _k, _j] = -1.0


class FockBasis:
    """States (n1, n2, n3) with n1 + n2 + n3 <= n_max, graded then descending lex."""

    def __init__(self, n_max: int):
        if not 0 <= n_max <= 40:
            raise ValueError("n_max must be in 0..40")
        self.n_max = n_max
        states = []
        for total in range(n_max + 1):
            for n1 in range(total, -1, -1):
                for n2 in range(total - n1, -1, -1):
                    states.append((n1, n2, total - n1 - n2))
        self.states = states
        self.index = {s: i for i, s in enumerate(states)}
        self.quanta = np.array([sum(s) for s in states])

    @property
    def dim(self) -> int:
        return len(self.states)

    def __len__(self):
        return self.dim

    def shell(self, n: int) -> np.ndarray:
        """Indices of the states with exactly ``n`` quanta."""
        return np.flatnonzero(self.quanta == n)

    def annihilator(self, k: int) -> sp.csr_matrix:
        rows, cols, vals = [], [], []
        for col, s in enumerate(self.states):
            if s[k]:
                t = list(s)
                t[k] -= 1
                rows.append(self.index[tuple(t)])
                cols.append(col)
                vals.append(np.sqrt(s[k]))
        return sp.csr_matrix((vals, (rows, cols)), shape=(self.dim, self.dim), dtype=complex)


def build_basis(n_max: int) -> FockBasis:
    return FockBasis(n_max)


@dataclass(frozen=True)
class InteriorProjector:
    """Projector onto states with at most ``n_max - margin`` quanta."""

    basis: FockBasis
    margin: int = 2

    @cached_property
    def mask(self) -> np.ndarray:
        return self.basis.quanta <= self.basis.n_max - self.margin

    @cached_property
    def matrix(self) -> sp.csr_matrix:
        return sp.diags(self.mask.astype(complex), format="csr")

    def indices(self, spin_dim: int = 1) -> np.ndarray:
        """Interior indices in (spin) x (Fock) with spin as the slow index."""
        inner = np.flatnonzero(self.mask)
        return (np.arange(spin_dim)[:, None] * self.basis.dim + inner[None, :]).ravel()

    def compress(self, op, spin_dim: int = 1):
        idx = self.indices(spin_dim)
        return op[idx][:, idx]


@dataclass(frozen=True)
class Kinematics:
    """Position, momentum, angular momentum and number operators.

    ``r`` and ``p`` come from truncated ladders; ``L`` and ``N`` are
    built as normal-ordered number-conserving products, so they are exact
    on the whole truncated space.
    """

    basis: FockBasis
    mass: float
    omega: float
    r: tuple[sp.csr_matrix, ...]
    p: tuple[sp.csr_matrix, ...]
    L: tuple[sp.csr_matrix, ...]
    N: sp.csr_matrix

    @cached_property
    def identity(self) -> sp.csr_matrix:
        return sp.identity(self.basis.dim, dtype=complex, format="csr")

    @cached_property
    def oscillator(self) -> sp.csr_matrix:
        """p^2/2M + M w^2 r^2 / 2 from the truncated r, p."""
        m, w = self.mass, self.omega
        return sum(pk @ pk for pk in self.p) / (2 * m) + 0.5 * m * w**2 * sum(rk @ rk for rk in self.r)

    def shifted(self, sign: int) -> tuple[sp.csr_matrix, ...]:
        """Components of p + sign * i M w r."""
        return tuple(pk + sign * 1j * self.mass * self.omega * rk for pk, rk in zip(self.p, self.r))


def build_kinematics(basis: FockBasis, M: float = 1.0, omega: float = 1.0) -> Kinematics:
    if M <= 0 or omega <= 0:
        raise ValueError("M and omega must be positive")
    a = [basis.annihilator(k) for k in range(3)]
    ad = [ak.conj().T.tocsr() for ak in a]
    r = tuple(((ak + adk) / np.sqrt(2 * M * omega)).tocsr() for ak, adk in zip(a, ad))
    p = tuple((1j * np.sqrt(M * omega / 2) * (adk - ak)).tocsr() for ak, adk in zip(a, ad))
    L = []
    for k in range(3):
        lk = sp.csr_matrix((basis.dim, basis.dim), dtype=complex)
        for i in range(3):
            for j in range(3):
                if LEVI_CIVITA[k, i, j]:
                    lk = lk + (-1j * LEVI_CIVITA[k, i, j]) * (ad[i] @ a[j])
        L.append(lk.tocsr())
    N = sp.diags(basis.quanta.astype(complex), format="csr")
    return Kinematics(basis, float(M), float(omega), r, p, tuple(L), N)


def commutator(a, b):
    return a @ b - b @ a


def max_abs(op) -> float:
    if sp.issparse(op):
        return float(np.max(np.abs(op.data))) if op.nnz else 0.0
    op = np.asarray(op)
    return float(np.max(np.abs(op))) if op.size else 0.0


def oscillator_identity_check(basis: FockBasis, M: float = 1.0, omega: float = 1.0) -> float:
    """Defect of sigma.(p + iMwr) sigma.(p - iMwr) = p^2 + M^2w^2r^2 - 3Mw - 2Mw L.sigma.

    Both sides are (2 x dim) matrices; the max-norm of the difference is
    taken on the interior (margin 2).
    """
    if basis.n_max < 3:
        raise ValueError("n_max must be >= 3")
    kin = build_kinematics(basis, M, omega)
    plus, minus = kin.shifted(+1), kin.shifted(-1)
    sig_plus = sum(sp.kron(PAULI[k], plus[k]) for k in range(3))
    sig_minus = sum(sp.kron(PAULI[k], minus[k]) for k in range(3))
    lhs = sig_plus @ sig_minus
    scalar = 2 * M * kin.oscillator - 3 * M * omega * kin.identity
    rhs = sp.kron(np.eye(2), scalar) - 2 * M * omega * sum(sp.kron(PAULI[k], kin.L[k]) for k in range(3))
    proj = InteriorProjector(basis, 2)
    return max_abs(proj.compress((lhs - rhs).tocsr(), spin_dim=2))


def dump_coordinates(op: sp.spmatrix) -> str:
    """Coordinate-triplet text dump ``row col re im``, row-major."""
    coo = sp.coo_matrix(op)
    order = np.lexsort((coo.col, coo.row))
    return "".join(
        f"{coo.row[i]} {coo.col[i]} {coo.data[i].real:.17g} {coo.data[i].imag:.17g}\n" for i in order
    )
