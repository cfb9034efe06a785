"""Finite-difference radial solver, used as an independent spectrum check.

For a channel (l, j, S) the reduced radial function u(r) = r R(r) obeys

    -u''/2M + [l(l+1)/(2M r^2) + M w^2 r^2/2 - 3w/2 - (w lam/S) <L.S>] u = E u

with u(0) = u(r_max) = 0, discretized by the 3-point stencil.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal

from . import spectrum

MIN_POINTS = 200


@dataclass(frozen=True)
class RadialGrid:
    r_max: float = 12.0
    points: int = 2000

    def __post_init__(self):
        if self.r_max <= 0 or self.points < 1:
            raise ValueError("r_max and points must be positive")

    @property
    def h(self) -> float:
        return self.r_max / (self.points + 1)

    @property
    def nodes(self) -> np.ndarray:
        return self.h * np.arange(1, self.points + 1)

    @classmethod
    def reference(cls, M: float = 1.0, omega: float = 1.0, points: int = 2000) -> "RadialGrid":
        return cls(12.0 / np.sqrt(M * omega), points)


@dataclass(frozen=True)
class RadialChannel:
    l: int
    two_j: int
    two_s: int
    lam: float = 1.0
    M: float = 1.0
    omega: float = 1.0

    def __post_init__(self):
        if self.two_j not in spectrum.allowed_two_j(self.l, self.two_s):
            raise ValueError(f"j = {self.two_j}/2 not allowed for l = {self.l}, S = {self.two_s}/2")

    @property
    def spin_orbit_shift(self) -> float:
        if self.two_s == 0:
            return 0.0
        ls = float(spectrum.ls_eigenvalue(self.l, self.two_j, self.two_s))
        return -self.omega * self.lam * ls / (self.two_s / 2)

    def closed_form(self, n: int) -> float:
        """Exact level n of the channel, in energy units."""
        lam = spectrum.as_fraction(self.lam)
        return self.omega * float(spectrum.lambda_energy(n, self.l, self.two_j, self.two_s, lam))


def solve_channel(channel: RadialChannel, grid: RadialGrid, k_lowest: int = 3) -> np.ndarray:
    """Lowest ``k_lowest`` eigenvalues of the discretized radial operator, ascending."""
    if grid.points < MIN_POINTS:
        raise ValueError(f"grid too coarse: need at least {MIN_POINTS} points")
    if k_lowest < 1 or k_lowest > grid.points // 10:
        raise ValueError("k_lowest must be in 1..points/10")
    m, w, l = channel.M, channel.omega, channel.l
    r, h = grid.nodes, grid.h
    potential = l * (l + 1) / (2 * m * r**2) + 0.5 * m * w**2 * r**2 - 1.5 * w + channel.spin_orbit_shift
    diag = 1.0 / (m * h**2) + potential
    off = np.full(grid.points - 1, -0.5 / (m * h**2))
    return eigh_tridiagonal(diag, off, eigvals_only=True, select="i", select_range=(0, k_lowest - 1))


def channel_deviations(channel: RadialChannel, grid: RadialGrid, k_lowest: int = 3) -> np.ndarray:
    vals = solve_channel(channel, grid, k_lowest)
    exact = np.array([channel.closed_form(n) for n in range(k_lowest)])
    return vals - exact


@dataclass(frozen=True)
class ConvergenceScan:
    h: np.ndarray
    deviation: np.ndarray

    @property
    def order(self) -> float:
        """Slope of log|deviation| against log h."""
        return float(np.polyfit(np.log(self.h), np.log(np.abs(self.deviation)), 1)[0])


def convergence_scan(channel: RadialChannel, grids: Sequence[RadialGrid], k_lowest: int = 3) -> ConvergenceScan:
    """Max deviation over the lowest ``k_lowest`` levels for each grid."""
    if len(grids) < 3:
        raise ValueError("need at least three grids")
    hs = np.array([g.h for g in grids])
    if np.any(np.diff(hs) >= 0):
        raise ValueError("grids must have decreasing spacing")
    devs = np.array([np.max(np.abs(channel_deviations(channel, g, k_lowest))) for g in grids])
    return ConvergenceScan(hs, devs)


def channel_table_csv(channel: RadialChannel, grid: RadialGrid, k_lowest: int = 3) -> str:
    """LevelTable CSV columns plus a deviation column."""
    vals = solve_channel(channel, grid, k_lowest)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(spectrum.CSV_COLUMNS + ("deviation",))
    lam = spectrum.as_fraction(channel.lam)
    for n, v in enumerate(vals):
        e = spectrum.lambda_energy(n, channel.l, channel.two_j, channel.two_s, lam)
        writer.writerow(
            (n, channel.l, channel.two_j, channel.two_s, e.numerator, e.denominator, channel.two_j + 1,
             repr(float(v / channel.omega - float(e))))
        )
    return buf.getvalue()
