"""Totally symmetric rank-2S spinors over four letters, by occupation number."""

from __future__ import annotations

from functools import lru_cache
from math import comb
from typing import Sequence

import numpy as np
import scipy.sparse as sp

GAMMA_DIAG = (1.0, 1.0, 0.0, 0.0)
IDENTITY_DIAG = (1.0, 1.0, 1.0, 1.0)


@lru_cache(maxsize=None)
def occupations(two_s: int, letters: int = 4) -> tuple[tuple[int, ...], ...]:
    """Occupation tuples with sum ``two_s``.

    Ordered by number of lower letters (k3 + k4), then descending lex, so
    the upper-only sector comes first with S3 = S, S-1, ..., -S.
    """
    if two_s < 0:
        raise ValueError("two_s must be nonnegative")

    def rec(n, slots):
        if slots == 1:
            yield (n,)
            return
        for first in range(n, -1, -1):
            for tail in rec(n - first, slots - 1):
                yield (first,) + tail

    states = list(rec(two_s, letters))
    if letters == 4:
        states.sort(key=lambda k: (k[2] + k[3], tuple(-x for x in k)))
    return tuple(states)


class SymmetricSpinBasis:
    """Orthonormal occupation basis of the symmetric rank-``two_s`` space."""

    def __init__(self, two_s: int):
        if two_s < 1:
            raise ValueError("two_s must be >= 1")
        self.two_s = two_s
        self.occupations = occupations(two_s)
        self.index = {k: i for i, k in enumerate(self.occupations)}
        lower = [k[2] + k[3] for k in self.occupations]
        self.phi = np.array([i for i, n in enumerate(lower) if n == 0])
        self.chi = np.array([i for i, n in enumerate(lower) if n == 1])
        self.rest = np.array([i for i, n in enumerate(lower) if n >= 2], dtype=int)

    @property
    def dim(self) -> int:
        return len(self.occupations)

    def norm_weight(self, k: Sequence[int]) -> int:
        """Number of index strings represented by the occupation ``k``."""
        n, w = self.two_s, 1
        for x in k:
            w *= comb(n, x)
            n -= x
        return w

    def lift(self, op: np.ndarray, spectator_diag: Sequence[float] = IDENTITY_DIAG) -> np.ndarray:
        """Sum over indices of ``op`` on one index and ``diag(spectator)`` on the others.

        Acting on one index and resymmetrizing is ``b_a^+ W b_b`` in
        occupation language, with ``W`` the spectator product on the
        remaining ``two_s - 1`` letters.
        """
        op = np.asarray(op)
        if op.shape != (4, 4):
            raise ValueError("one-index operator must be 4x4")
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for col, k in enumerate(self.occupations):
            for b in range(4):
                if not k[b]:
                    continue
                rest = list(k)
                rest[b] -= 1
                w = np.sqrt(k[b]) * np.prod([spectator_diag[c] ** n for c, n in enumerate(rest)])
                if w == 0:
                    continue
                for a in range(4):
                    if op[a, b] == 0:
                        continue
                    target = list(rest)
                    target[a] += 1
                    out[self.index[tuple(target)], col] += op[a, b] * w * np.sqrt(target[a])
        return out


def build_symmetric_action(
    two_s: int,
    one_index_op: Sequence[tuple[np.ndarray, sp.spmatrix]],
    spectator_diag: Sequence[float] = IDENTITY_DIAG,
    average: bool = True,
) -> sp.csr_matrix:
    """Lift a spinor-valued Fock operator onto (symmetric spin space) (x) Fock.

    ``one_index_op`` is a sum of products ``spin_matrix (x) fock_operator``
    with 4x4 spin matrices.  The result is ``sum_i D..op_i..D`` restricted to
    the symmetric subspace, divided by ``two_s`` when ``average`` is set.
    Spin is the slow index of the product space.
    """
    basis = SymmetricSpinBasis(two_s)
    terms = list(one_index_op)
    if not terms:
        raise ValueError("empty operator")
    fock_dim = terms[0][1].shape[0]
    total = sp.csr_matrix((basis.dim * fock_dim, basis.dim * fock_dim), dtype=complex)
    for spin, fock in terms:
        if fock.shape != (fock_dim, fock_dim):
            raise ValueError("Fock operators must share one basis")
        lifted = basis.lift(spin, spectator_diag)
        if average:
            lifted = lifted / two_s
        total = total + sp.kron(sp.csr_matrix(lifted), fock, format="csr")
    total.eliminate_zeros()
    return total
