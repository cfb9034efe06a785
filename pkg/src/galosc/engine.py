"""Rank-2S multispinor wave equation: assembly and constraint elimination.

The field lives on (symmetric spin space) x (truncated Fock space), spin
index slow.  Components with all letters upper (phi) carry the time
derivative; components with one lower letter (chi) are fixed by an
algebraic constraint whose diagonal block is 2M.  Eliminating them gives
an effective Hamiltonian on phi, diagonalized shell by shell and compared
with the closed-form spectrum.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.sparse as sp

from . import spectrum
from .fock import PAULI, FockBasis, InteriorProjector, Kinematics, build_kinematics, max_abs
from .symmetric import GAMMA_DIAG, SymmetricSpinBasis, build_symmetric_action

_TAU = PAULI
_I2 = np.eye(2)
RHO = np.array([np.kron(t, _I2) for t in _TAU])
SIGMA = np.array([np.kron(_I2, t) for t in _TAU])
GAMMA = 0.5 * (np.eye(4) + RHO[2])

# Deterministic, incommensurate weights for simultaneous diagonalization.
_L2_WEIGHT = 1e-3 * np.sqrt(2.0)
_J2_WEIGHT = 1e-4 * np.sqrt(3.0)


class ReductionError(RuntimeError):
    """The constraint block is not 2M times the identity."""


def wave_operator_terms(kin: Kinematics) -> list[tuple[np.ndarray, sp.csr_matrix]]:
    """Spatial part of G as a sum of (4x4 spin matrix, Fock operator) products.

    G - A i dt = sum_k B_k (p_k - i M w r_k rho3) + M (1 - rho3).
    """
    m, w = kin.mass, kin.omega
    terms = []
    for k in range(3):
        bk = RHO[0] @ SIGMA[k]
        terms.append((bk, kin.p[k]))
        terms.append((bk @ RHO[2], -1j * m * w * kin.r[k]))
    terms.append((m * (np.eye(4) - RHO[2]), kin.identity))
    return terms


@dataclass
class SectorBlocks:
    """Unaveraged symmetric lift of the wave operator, split by sector."""

    basis: SymmetricSpinBasis
    fock_dim: int
    K: sp.csr_matrix
    time: np.ndarray  # lift of A on spin space

    def _idx(self, spin_idx: np.ndarray) -> np.ndarray:
        return (spin_idx[:, None] * self.fock_dim + np.arange(self.fock_dim)[None, :]).ravel()

    @property
    def phi(self) -> np.ndarray:
        return self._idx(self.basis.phi)

    @property
    def chi(self) -> np.ndarray:
        return self._idx(self.basis.chi)

    @property
    def rest(self) -> np.ndarray:
        return self._idx(self.basis.rest)

    def block(self, rows: np.ndarray, cols: np.ndarray) -> sp.csr_matrix:
        return self.K[rows][:, cols]

    @property
    def K_phichi(self):
        return self.block(self.phi, self.chi)

    @property
    def K_chiphi(self):
        return self.block(self.chi, self.phi)

    @property
    def K_chichi(self):
        return self.block(self.chi, self.chi)


def build_sector_blocks(two_s: int, kin: Kinematics) -> SectorBlocks:
    basis = SymmetricSpinBasis(two_s)
    K = build_symmetric_action(two_s, wave_operator_terms(kin), GAMMA_DIAG, average=False)
    time = basis.lift(GAMMA, GAMMA_DIAG).real
    return SectorBlocks(basis, kin.basis.dim, K, time)


def build_spin_matrices(two_s: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Total spin on the upper-letter sector: sum over indices of sigma_k / 2."""
    basis = SymmetricSpinBasis(two_s)
    phi = basis.phi
    return tuple(basis.lift(0.5 * SIGMA[k])[np.ix_(phi, phi)] for k in range(3))


def constraint_eliminate(
    K: sp.csr_matrix, dyn: np.ndarray, con: np.ndarray, mass: float, time_coef: float
) -> sp.csr_matrix:
    """H = K_dc K_cd / (2M t) for  t i dt x + K_dc y = 0,  K_cd x + 2M y = 0."""
    K = K.tocsr()
    kcc = K[con][:, con]
    defect = max_abs(kcc - 2 * mass * sp.identity(len(con), format="csr"))
    if defect > 1e-12:
        raise ReductionError(f"constraint block deviates from 2M*1 by {defect:.3e}")
    if max_abs(K[dyn][:, dyn]) > 1e-12:
        raise ReductionError("dynamical block carries a non-derivative term")
    return (K[dyn][:, con] @ K[con][:, dyn] / (2 * mass * time_coef)).tocsr()


# --- reports ------------------------------------------------------------------------


@dataclass(frozen=True)
class LevelMatch:
    N: int
    n: int
    l: int
    two_j: int
    count: int
    energy: float  # numerical, units of omega
    closed_form: Fraction  # units of omega
    deviation: float

    @property
    def multiplicity(self) -> int:
        return self.two_j + 1

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "n": self.n,
            "l": self.l,
            "two_j": self.two_j,
            "count": self.count,
            "energy": self.energy,
            "closed_form": {"num": self.closed_form.numerator, "den": self.closed_form.denominator},
            "deviation": self.deviation,
        }


@dataclass
class ReductionReport:
    two_s: int
    lam: float
    n_max: int
    M: float
    omega: float
    component_count: int
    hermiticity_defect: float
    levels: list[LevelMatch] = field(default_factory=list)
    sectors: dict[tuple[int, int], list[float]] = field(default_factory=dict)
    multiset_deviation: float = 0.0
    lowest_eigenvalue: float = float("nan")

    @property
    def max_deviation(self) -> float:
        return max([self.multiset_deviation] + [lvl.deviation for lvl in self.levels])

    @property
    def labels_complete(self) -> bool:
        return all(lvl.count == lvl.multiplicity for lvl in self.levels)

    def passed(self, tol: float = 1e-9) -> bool:
        return self.max_deviation <= tol and self.hermiticity_defect <= 1e-10 and self.labels_complete

    def level(self, n: int, l: int, two_j: int) -> LevelMatch:
        for lvl in self.levels:
            if (lvl.n, lvl.l, lvl.two_j) == (n, l, two_j):
                return lvl
        raise KeyError((n, l, two_j))

    def to_dict(self) -> dict:
        return {
            "two_s": self.two_s,
            "lambda": self.lam,
            "n_max": self.n_max,
            "M": self.M,
            "omega": self.omega,
            "component_count": self.component_count,
            "hermiticity_defect": self.hermiticity_defect,
            "max_deviation": self.max_deviation,
            "lowest_eigenvalue": self.lowest_eigenvalue,
            "match": self.passed(),
            "sectors": [
                {"N": N, "two_j": tj, "eigenvalues": vals} for (N, tj), vals in sorted(self.sectors.items())
            ],
            "levels": [lvl.to_dict() for lvl in self.levels],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _shell_indices(fock: FockBasis, spin_dim: int, N: int) -> np.ndarray:
    inner = fock.shell(N)
    return (np.arange(spin_dim)[:, None] * fock.dim + inner[None, :]).ravel()


def _quantum_number(casimir: float) -> int:
    """Doubled j from j(j+1)."""
    return int(round(-1 + np.sqrt(1 + 4 * max(casimir, 0.0))))


def analyze_effective_hamiltonian(
    H: sp.csr_matrix,
    kin: Kinematics,
    spin: tuple[np.ndarray, ...] | None,
    two_s: int,
    lam,
    component_count: int,
) -> ReductionReport:
    """Diagonalize each interior oscillator shell and match against the closed form."""
    fock = kin.basis
    omega = kin.omega
    spin_dim = 1 if spin is None else spin[0].shape[0]
    proj = InteriorProjector(fock, 2)
    Hint = proj.compress(H, spin_dim)
    herm = max_abs(Hint - Hint.conj().T)

    eye = sp.identity(spin_dim, format="csr")
    L = [sp.kron(eye, lk, format="csr") for lk in kin.L]
    J = L if spin is None else [lk + sp.kron(sk, kin.identity, format="csr") for lk, sk in zip(L, spin)]
    L2 = sum(lk @ lk for lk in L)
    J2 = sum(jk @ jk for jk in J)

    report = ReductionReport(
        two_s, float(lam), fock.n_max, kin.mass, omega, component_count, herm
    )
    lowest = np.inf
    for N in range(fock.n_max - 1):
        idx = _shell_indices(fock, spin_dim, N)
        h = H[idx][:, idx].toarray() / omega
        h = 0.5 * (h + h.conj().T)
        evals = np.linalg.eigvalsh(h)
        lowest = min(lowest, evals[0] * omega)
        expected = sorted(
            float(lvl.energy_over_omega)
            for lvl in spectrum.shell_levels(N, two_s, lam)
            for _ in range(lvl.multiplicity)
        )
        if len(expected) != len(evals):
            raise RuntimeError(f"shell {N}: {len(evals)} eigenvalues, expected {len(expected)}")
        report.multiset_deviation = max(report.multiset_deviation, float(np.max(np.abs(evals - expected))))

        l2 = L2[idx][:, idx].toarray()
        j2 = J2[idx][:, idx].toarray()
        _, vecs = np.linalg.eigh(h + _L2_WEIGHT * l2 + _J2_WEIGHT * j2)
        groups: dict[tuple[int, int], list[float]] = defaultdict(list)
        for v in vecs.T:
            e = float(np.real(v.conj() @ h @ v))
            l = _quantum_number(float(np.real(v.conj() @ l2 @ v))) // 2
            tj = _quantum_number(float(np.real(v.conj() @ j2 @ v)))
            groups[(l, tj)].append(e)
        for (l, tj), es in sorted(groups.items()):
            n = (N - l) // 2
            closed = spectrum.lambda_energy(n, l, tj, two_s, lam)
            dev = float(np.max(np.abs(np.array(es) - float(closed))))
            report.levels.append(LevelMatch(N, n, l, tj, len(es), float(np.mean(es)), closed, dev))
            report.sectors.setdefault((N, tj), []).extend(sorted(es))
    for key in report.sectors:
        report.sectors[key] = sorted(report.sectors[key])
    report.lowest_eigenvalue = float(lowest)
    return report


# --- public engine entry points ------------------------------------------------------


def _check_engine_args(two_s: int, n_max: int) -> None:
    if two_s < 1:
        raise ValueError("two_s must be >= 1")
    if n_max < 4:
        raise ValueError("n_max must be >= 4")


def minimal_effective_hamiltonian(two_s: int, kin: Kinematics) -> sp.csr_matrix:
    blocks = build_sector_blocks(two_s, kin)
    phi_t = blocks.time[np.ix_(blocks.basis.phi, blocks.basis.phi)]
    if np.max(np.abs(phi_t - two_s * np.eye(len(blocks.basis.phi)))) > 1e-12:
        raise ReductionError("time-derivative block is not 2S on the upper sector")
    return constraint_eliminate(blocks.K, blocks.phi, blocks.chi, kin.mass, two_s)


def assemble_and_reduce(two_s: int, n_max: int = 8, M: float = 1.0, omega: float = 1.0) -> ReductionReport:
    """Minimal (6S+1)-component theory reduced to phi and checked against the closed form."""
    _check_engine_args(two_s, n_max)
    kin = build_kinematics(FockBasis(n_max), M, omega)
    H = minimal_effective_hamiltonian(two_s, kin)
    basis = SymmetricSpinBasis(two_s)
    components = len(basis.phi) + len(basis.chi)
    return analyze_effective_hamiltonian(H, kin, build_spin_matrices(two_s), two_s, 1, components)


def nonminimal_system(two_s: int, lam, kin: Kinematics) -> tuple[sp.csr_matrix, int, int]:
    """Block operator on (phi, psi^1..3, chi) x Fock from the lambda-theory field equations.

    Returns the operator, the phi block size and the spinor component count.
    """
    blocks = build_sector_blocks(two_s, kin)
    F = kin.basis.dim
    d = len(blocks.basis.phi)
    eye_d = sp.identity(d, format="csr")
    plus, minus = kin.shifted(+1), kin.shifted(-1)
    lam = float(lam)
    n_chi = len(blocks.chi)
    zero = None
    two_m = 2 * kin.mass

    grid = [[zero] * 5 for _ in range(5)]
    for k in range(3):
        grid[0][1 + k] = (1 - lam) * sp.kron(eye_d, plus[k], format="csr")
        grid[1 + k][0] = sp.kron(eye_d, minus[k], format="csr")
        grid[1 + k][1 + k] = two_m * sp.identity(d * F, format="csr")
    grid[0][4] = (lam / two_s) * blocks.K_phichi
    grid[4][0] = blocks.K_chiphi
    grid[4][4] = blocks.K_chichi
    grid[0][0] = sp.csr_matrix((d * F, d * F), dtype=complex)
    K = sp.bmat(grid, format="csr")
    components = 4 * d + n_chi // F
    return K, d * F, components


def assemble_nonminimal(
    two_s: int, lam, n_max: int = 8, M: float = 1.0, omega: float = 1.0
) -> ReductionReport:
    """(12S+4)-component theory: eliminate psi^k and chi, match the lambda-scaled spectrum."""
    _check_engine_args(two_s, n_max)
    kin = build_kinematics(FockBasis(n_max), M, omega)
    H, components = nonminimal_effective_hamiltonian(two_s, lam, kin)
    return analyze_effective_hamiltonian(H, kin, build_spin_matrices(two_s), two_s, lam, components)


def nonminimal_effective_hamiltonian(two_s: int, lam, kin: Kinematics) -> tuple[sp.csr_matrix, int]:
    K, n_phi, components = nonminimal_system(two_s, lam, kin)
    dyn = np.arange(n_phi)
    con = np.arange(n_phi, K.shape[0])
    return constraint_eliminate(K, dyn, con, kin.mass, 1.0), components


def scalar_effective_hamiltonian(kin: Kinematics) -> sp.csr_matrix:
    """Spin-0 theory: C dynamical, A_k constrained.

    i dt C + i (p + iMwr).A = 0,  2M A - i (p - iMwr) C = 0.
    """
    F = kin.basis.dim
    plus, minus = kin.shifted(+1), kin.shifted(-1)
    grid = [[None] * 4 for _ in range(4)]
    grid[0][0] = sp.csr_matrix((F, F), dtype=complex)
    for k in range(3):
        grid[0][1 + k] = 1j * plus[k]
        grid[1 + k][0] = -1j * minus[k]
        grid[1 + k][1 + k] = 2 * kin.mass * kin.identity
    K = sp.bmat(grid, format="csr")
    return constraint_eliminate(K, np.arange(F), np.arange(F, 4 * F), kin.mass, 1.0)


def assemble_scalar(n_max: int = 8, M: float = 1.0, omega: float = 1.0) -> ReductionReport:
    if n_max < 4:
        raise ValueError("n_max must be >= 4")
    kin = build_kinematics(FockBasis(n_max), M, omega)
    H = scalar_effective_hamiltonian(kin)
    return analyze_effective_hamiltonian(H, kin, None, 0, 1, 4)


def target_hamiltonian(two_s: int, kin: Kinematics, lam=1.0) -> sp.csr_matrix:
    """p^2/2M + M w^2 r^2/2 - 3w/2 - (w lam / S) S.L on phi (x) Fock."""
    spin = build_spin_matrices(two_s)
    d = spin[0].shape[0]
    s = two_s / 2
    h0 = kin.oscillator - 1.5 * kin.omega * kin.identity
    out = sp.kron(np.eye(d), h0, format="csr")
    for k in range(3):
        out = out - (kin.omega * float(lam) / s) * sp.kron(spin[k], kin.L[k], format="csr")
    return out.tocsr()


def effective_hamiltonian_identity(
    two_s: int, n_max: int = 6, M: float = 1.0, omega: float = 1.0, lam=None
) -> float:
    """Interior max-norm defect of H_eff against the spin-orbit oscillator form.

    ``lam=None`` uses the minimal theory (coefficient 1/S).
    """
    _check_engine_args(two_s, n_max)
    kin = build_kinematics(FockBasis(n_max), M, omega)
    if lam is None:
        H = minimal_effective_hamiltonian(two_s, kin)
        lam = 1.0
    else:
        H, _ = nonminimal_effective_hamiltonian(two_s, lam, kin)
    target = target_hamiltonian(two_s, kin, lam)
    proj = InteriorProjector(kin.basis, 2)
    return max_abs(proj.compress((H - target).tocsr(), two_s + 1))


def spin_orbit_coefficient(
    two_s: int, M: float = 1.0, omega: float = 1.0, lam=None, n_max: int = 4
) -> float:
    """Coefficient c in H_eff = w N - c L.S, fitted on the N = 1 shell.

    Least-squares projection of (H_eff - w) onto -L.S within the shell.
    """
    _check_engine_args(two_s, n_max)
    kin = build_kinematics(FockBasis(n_max), M, omega)
    if lam is None:
        H = minimal_effective_hamiltonian(two_s, kin)
    else:
        H, _ = nonminimal_effective_hamiltonian(two_s, lam, kin)
    spin = build_spin_matrices(two_s)
    d = spin[0].shape[0]
    ls = sum(sp.kron(spin[k], kin.L[k], format="csr") for k in range(3))
    idx = _shell_indices(kin.basis, d, 1)
    x = H[idx][:, idx].toarray() - omega * np.eye(len(idx))
    y = ls[idx][:, idx].toarray()
    return float(-np.real(np.vdot(y, x)) / np.real(np.vdot(y, y)))


def shell_eigenvalues(H: sp.csr_matrix, fock: FockBasis, spin_dim: int, N: int) -> np.ndarray:
    idx = _shell_indices(fock, spin_dim, N)
    h = H[idx][:, idx].toarray()
    return np.linalg.eigvalsh(0.5 * (h + h.conj().T))
