"""Exact 4x4 Galilean spinor algebra.

The spinor space is the tensor product rho (x) sigma: index ``a = 2*u + s``
with ``u`` the upper/lower block (rho) and ``s`` the Pauli-spin index
(sigma).  Letters 0, 1 are the upper components, 2, 3 the lower ones.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import numpy as np
from scipy.spatial.transform import Rotation

from .exact import DERIVATIVES, I, FormalPolynomial, SymbolicMatrix
from .symmetric import occupations

P = FormalPolynomial.symbol
_PAULI = (
    ((0, 1), (1, 0)),
    ((0, -I), (I, 0)),
    ((1, 0), (0, -1)),
)
_EPS = {(0, 1, 2): 1, (1, 2, 0): 1, (2, 0, 1): 1, (0, 2, 1): -1, (2, 1, 0): -1, (1, 0, 2): -1}


def pauli(k: int) -> SymbolicMatrix:
    return SymbolicMatrix(_PAULI[k])


def build_generators() -> dict[str, SymbolicMatrix]:
    """Pauli sets, Gamma and the Galilean generators A, B_k, C (exact)."""
    one2 = SymbolicMatrix.identity(2)
    gens: dict[str, SymbolicMatrix] = {}
    for k in range(3):
        gens[f"rho{k + 1}"] = pauli(k).kron(one2)
        gens[f"sigma{k + 1}"] = one2.kron(pauli(k))
    one = SymbolicMatrix.identity(4)
    gamma = (one + gens["rho3"]).scale(Fraction(1, 2))
    gens["Gamma"] = gamma
    gens["A"] = gamma
    for k in range(3):
        gens[f"B{k + 1}"] = gens["rho1"] @ gens[f"sigma{k + 1}"]
    gens["C"] = (one - gens["rho3"]).scale(P("M"))
    return gens


def build_wave_operator(with_oscillator: bool = True) -> SymbolicMatrix:
    """G = A i dt + B_k (1/i) d_k + C, optionally with p -> p - i M w r rho3.

    The derivative symbols act on whatever G is applied to.
    """
    g = build_generators()
    op = g["A"].scale(I * P("dt")) + g["C"]
    for k in range(3):
        bk = g[f"B{k + 1}"]
        op = op + bk.scale(-I * P(f"d{k + 1}"))
        if with_oscillator:
            op = op + (bk @ g["rho3"]).scale(-I * P("M") * P("w") * P(f"r{k + 1}"))
    return op


# --- Galilean boost ------------------------------------------------------------------

_SIGMA_NP = np.array(
    [[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex
)


@dataclass(frozen=True)
class BoostParameters:
    v: np.ndarray
    R: np.ndarray = field(default_factory=lambda: np.eye(3))

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float).reshape(3)
        R = np.asarray(self.R, dtype=float).reshape(3, 3)
        if np.max(np.abs(R.T @ R - np.eye(3))) > 1e-12:
            raise ValueError("R is not orthogonal")
        if abs(np.linalg.det(R) - 1.0) > 1e-12:
            raise ValueError("R is not a proper rotation (det != +1)")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "R", R)


def su2_image(R: np.ndarray) -> np.ndarray:
    """SU(2) preimage of a rotation, branch with nonnegative trace.

    Satisfies ``U sigma_j U^+ = sum_i R_ij sigma_i``.
    """
    x, y, z, w = Rotation.from_matrix(R).as_quat()
    if w < 0:
        x, y, z, w = -x, -y, -z, -w
    return w * np.eye(2) - 1j * (x * _SIGMA_NP[0] + y * _SIGMA_NP[1] + z * _SIGMA_NP[2])


def build_boost_matrix(bp: BoostParameters) -> np.ndarray:
    d = su2_image(bp.R)
    sv = np.einsum("k,kij->ij", bp.v, _SIGMA_NP)
    out = np.zeros((4, 4), dtype=complex)
    out[:2, :2] = d
    out[2:, 2:] = d
    out[2:, :2] = -0.5 * sv @ d
    return out


# --- bispinor parametrizations -------------------------------------------------------


class Symmetry(str, enum.Enum):
    SYMMETRIC = "symmetric"
    ANTISYMMETRIC = "antisymmetric"


@dataclass(frozen=True)
class FieldComponentLabel:
    name: str
    kind: str  # dynamical | constrained | absent


@dataclass(frozen=True)
class Bispinor:
    """psi = sum over fields f of f * components[f], each scaled by 1/sqrt(2)."""

    symmetry: Symmetry
    components: dict[FieldComponentLabel, SymbolicMatrix]

    @property
    def labels(self) -> list[FieldComponentLabel]:
        return list(self.components)

    def label(self, name: str) -> FieldComponentLabel:
        for lab in self.components:
            if lab.name == name:
                return lab
        raise KeyError(name)

    def __iter__(self) -> Iterator[tuple[FieldComponentLabel, SymbolicMatrix]]:
        return iter(self.components.items())


def parametrize_bispinor(symmetry: Symmetry | str, include_absent: bool = False) -> Bispinor:
    """Field-component expansion of the rank-2 bispinor.

    With ``include_absent`` the symmetric case also carries the three
    lower-block components ``W_k = (1 - rho3)/2 sigma_k sigma2``.
    """
    symmetry = Symmetry(symmetry)
    g = build_generators()
    s2 = g["sigma2"]
    one = SymbolicMatrix.identity(4)
    comps: dict[FieldComponentLabel, SymbolicMatrix] = {}

    def put(name, kind, mat):
        comps[FieldComponentLabel(name, kind)] = SymbolicMatrix((mat @ s2).entries, inv_sqrt2=1)

    if symmetry is Symmetry.SYMMETRIC:
        for k in range(3):
            put(f"X{k + 1}", "dynamical", g[f"sigma{k + 1}"] @ g["Gamma"])
        for k in range(3):
            put(f"Y{k + 1}", "constrained", g[f"sigma{k + 1}"] @ g["rho1"])
        put("Z", "constrained", g["rho2"])
        if include_absent:
            lower = (one - g["rho3"]).scale(Fraction(1, 2))
            for k in range(3):
                put(f"W{k + 1}", "absent", lower @ g[f"sigma{k + 1}"])
    else:
        for k in range(3):
            put(f"A{k + 1}", "constrained", g[f"sigma{k + 1}"] @ g["rho2"])
        put("B", "absent", g["rho1"])
        put("C", "dynamical", g["Gamma"])
    return Bispinor(symmetry, comps)


# --- bilinear Lagrangians ------------------------------------------------------------


def _d_dr(poly: FormalPolynomial, k: int) -> FormalPolynomial:
    """Formal derivative of a polynomial coefficient with respect to r_k."""
    idx = 4 + k
    out = {}
    for exp, c in poly.terms.items():
        if exp[idx]:
            e = list(exp)
            e[idx] -= 1
            out[tuple(e)] = c * exp[idx]
    return FormalPolynomial(out)


class BilinearForm:
    """Sum of ``coeff * star^* field`` terms.

    Derivative symbols in ``coeff`` act on the unstarred field.  A term may
    instead carry one derivative on the starred field (``star_deriv``);
    :meth:`normal_form` integrates those by parts.
    """

    def __init__(self):
        self._terms: dict[tuple[str, str, str | None], FormalPolynomial] = {}

    def add(self, star: str, fld: str, coeff, star_deriv: str | None = None) -> "BilinearForm":
        if star_deriv is not None and star_deriv not in DERIVATIVES:
            raise ValueError(f"unknown derivative {star_deriv!r}")
        key = (star, fld, star_deriv)
        total = self._terms.get(key, FormalPolynomial()) + FormalPolynomial.coerce(coeff)
        if total.is_zero():
            self._terms.pop(key, None)
        else:
            self._terms[key] = total
        return self

    @property
    def terms(self) -> dict[tuple[str, str, str | None], FormalPolynomial]:
        return dict(self._terms)

    def normal_form(self) -> "BilinearForm":
        """Move every derivative off starred fields, dropping surface terms.

        (d u)^* c w  ->  -u^* (d c) w - u^* c (d w)
        """
        out = BilinearForm()
        for (star, fld, sd), c in self._terms.items():
            if sd is None:
                out.add(star, fld, c)
                continue
            if c.degree(DERIVATIVES) > 0:
                raise ValueError("integration by parts limited to first-order terms")
            out.add(star, fld, -c * P(sd))
            if sd != "dt":
                out.add(star, fld, -_d_dr(c, int(sd[1]) - 1))
        return out

    def coefficient(self, star: str, fld: str) -> FormalPolynomial:
        return self.normal_form()._terms.get((star, fld, None), FormalPolynomial())

    def fields(self) -> set[str]:
        return {s for s, _, _ in self._terms} | {f for _, f, _ in self._terms}

    def involves(self, name: str) -> bool:
        return any(name in (s, f) for s, f, _ in self._terms)

    def map(self, fn) -> "BilinearForm":
        out = BilinearForm()
        for (s, f, sd), c in self._terms.items():
            out.add(s, f, fn(c), sd)
        return out

    def substitute_zero(self, symbol: str) -> "BilinearForm":
        return self.map(lambda c: c.substitute_zero(symbol))

    def __add__(self, other: "BilinearForm") -> "BilinearForm":
        out = BilinearForm()
        for src in (self, other):
            for (s, f, sd), c in src._terms.items():
                out.add(s, f, c, sd)
        return out

    def __neg__(self):
        return self.map(lambda c: -c)

    def __sub__(self, other):
        return self + (-other)

    def is_zero(self) -> bool:
        return not self.normal_form()._terms

    def __eq__(self, other):
        if not isinstance(other, BilinearForm):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def to_table(self) -> str:
        """Plain-text term table ``star<TAB>field<TAB>coefficient`` in normal form."""
        nf = self.normal_form()
        lines = [f"{s}*\t{f}\t{c}" for (s, f, _), c in sorted(nf._terms.items(), key=lambda t: t[0][:2])]
        return "\n".join(lines) + "\n"


def _trace_sign(symmetry: Symmetry) -> int:
    return 1 if symmetry is Symmetry.SYMMETRIC else -1


def expand_trace_lagrangian(
    symmetry: Symmetry | str, with_oscillator: bool = True, include_absent: bool = False
) -> BilinearForm:
    """Expand +-Tr G psi Gamma psi^* into field bilinears.

    The sign is + for the symmetric (spin 1) and - for the antisymmetric
    (spin 0) bispinor.
    """
    psi = parametrize_bispinor(symmetry, include_absent)
    G = build_wave_operator(with_oscillator)
    gamma = build_generators()["Gamma"]
    sign = _trace_sign(psi.symmetry)
    out = BilinearForm()
    for f, mf in psi:
        left = G @ mf @ gamma
        for g, mg in psi:
            c = (left @ mg.conjugate()).trace()
            if c:
                out.add(g.name, f.name, c * sign)
    return out


def expand_index_lagrangian(
    symmetry: Symmetry | str, with_oscillator: bool = True, include_absent: bool = False
) -> BilinearForm:
    """Expand 1/2 psi*_ab [G_aa' Gamma_bb' + Gamma_aa' G_bb'] psi_a'b' index by index."""
    psi = parametrize_bispinor(symmetry, include_absent)
    G = build_wave_operator(with_oscillator)
    gamma = build_generators()["Gamma"]
    out = BilinearForm()
    half = Fraction(1, 2)
    for f, mf in psi:
        for g, mg in psi:
            acc = FormalPolynomial()
            for a in range(4):
                for b in range(4):
                    star = mg[a, b].conjugate()
                    if not star:
                        continue
                    for a2 in range(4):
                        for b2 in range(4):
                            val = mf[a2, b2]
                            if not val:
                                continue
                            k = G[a, a2] * gamma[b, b2] + gamma[a, a2] * G[b, b2]
                            if k:
                                acc = acc + star * k * val
            # the two 1/sqrt(2) factors give 1/2
            acc = acc * half * half
            if acc:
                out.add(g.name, f.name, acc)
    return out


def reference_lagrangian(symmetry: Symmetry | str, with_oscillator: bool = True) -> BilinearForm:
    """Hand transcription of the expanded spin-1 and spin-0 Lagrangians."""
    symmetry = Symmetry(symmetry)
    dt = P("dt")
    d = [P(f"d{k + 1}") for k in range(3)]
    r = [P(f"r{k + 1}") for k in range(3)]
    two_m = P("M") * 2
    mw = P("M") * P("w") if with_oscillator else FormalPolynomial()
    L = BilinearForm()
    if symmetry is Symmetry.SYMMETRIC:
        X = [f"X{k + 1}" for k in range(3)]
        Y = [f"Y{k + 1}" for k in range(3)]
        for k in range(3):
            L.add(X[k], X[k], I * dt)
            L.add(X[k], "Z", d[k])
            L.add("Z", X[k], -d[k])
            L.add(Y[k], Y[k], two_m)
            L.add(X[k], "Z", -mw * r[k])
            L.add("Z", X[k], -mw * r[k])
        L.add("Z", "Z", two_m)
        for (i, j, k), e in _EPS.items():
            # X*.curl Y + Y*.curl X
            L.add(X[i], Y[k], d[j] * e)
            L.add(Y[i], X[k], d[j] * e)
            # Mw[-X*.(r x Y) + Y*.(r x X)]
            L.add(X[i], Y[k], -mw * r[j] * e)
            L.add(Y[i], X[k], mw * r[j] * e)
    else:
        A = [f"A{k + 1}" for k in range(3)]
        L.add("C", "C", I * dt)
        L.add("B", "B", two_m)
        for k in range(3):
            L.add(A[k], A[k], two_m)
            L.add(A[k], "C", -d[k])
            L.add("C", A[k], d[k])
            L.add("C", A[k], -mw * r[k])
            L.add(A[k], "C", -mw * r[k])
    return L


# --- coupling analysis ---------------------------------------------------------------


@dataclass(frozen=True)
class CouplingAnalysis:
    two_s: int
    total: int
    retained: tuple[tuple[int, ...], ...]
    decoupled: tuple[tuple[int, ...], ...]

    @property
    def n_retained(self) -> int:
        return len(self.retained)

    def as_dict(self) -> dict:
        return {"two_s": self.two_s, "total": self.total, "retained": self.n_retained}


def symmetric_lift_exact(two_s: int, op: SymbolicMatrix, spectator_diag) -> dict:
    """Sum_i (D x .. x op_i x .. x D) on symmetric rank-``two_s`` tensors, exact.

    Works in the unnormalized monomial basis x^k, where one index acting
    is ``x_a d/dx_b`` and carries integer weights; returns a sparse dict
    ``{(row_occ, col_occ): FormalPolynomial}``.  ``spectator_diag`` is the
    diagonal of D.
    """
    out: dict[tuple[tuple[int, ...], tuple[int, ...]], FormalPolynomial] = {}
    for k in occupations(two_s):
        for b in range(4):
            if not k[b]:
                continue
            rest = list(k)
            rest[b] -= 1
            weight = Fraction(k[b])
            for c, n in enumerate(rest):
                if n:
                    weight *= Fraction(spectator_diag[c]) ** n
            if not weight:
                continue
            for a in range(4):
                entry = op[a, b]
                if not entry:
                    continue
                target = list(rest)
                target[a] += 1
                key = (tuple(target), k)
                total = out.get(key, FormalPolynomial()) + entry * weight
                if total.is_zero():
                    out.pop(key, None)
                else:
                    out[key] = total
    return out


def coupling_analysis(rank_2s: int) -> CouplingAnalysis:
    """Classify symmetric rank-2S components by whether they enter the field equations.

    Uses the exact zero pattern of the symmetrized wave operator with
    Gamma on all spectator indices.
    """
    if not 1 <= rank_2s <= 8:
        raise ValueError("rank_2S must be in 1..8")
    G = build_wave_operator(True)
    gamma_diag = (1, 1, 0, 0)
    lifted = symmetric_lift_exact(rank_2s, G, gamma_diag)
    touched = {row for row, _ in lifted} | {col for _, col in lifted}
    basis = occupations(rank_2s)
    retained = tuple(k for k in basis if k in touched)
    decoupled = tuple(k for k in basis if k not in touched)
    return CouplingAnalysis(rank_2s, len(basis), retained, decoupled)
