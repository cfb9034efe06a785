"""Command-line entry point: spectrum tables, verification and cross-checks.

Exit codes: 0 success, 1 a verification check failed, 2 usage/config error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from . import __version__, engine, radial, spectrum, spinor
from .fock import FockBasis, build_kinematics, oscillator_identity_check

ENGINE_TOL = 1e-9
RADIAL_TOL = 1e-4
IDENTITY_TOL = 1e-10
RADIAL_LEVELS = 3


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    two_s: int = 1
    lam: Fraction = Fraction(1)
    M: float = 1.0
    omega: float = 1.0
    n_max: int = 8
    e_max: Fraction = Fraction(4)
    l_max: int = 6
    r_max: float | None = None
    points: int = 2000
    fmt: str = "table"
    out: str | None = None

    def validate(self) -> "RunConfig":
        if self.two_s < 0:
            raise ConfigError("--two-s must be nonnegative")
        if self.M <= 0 or self.omega <= 0:
            raise ConfigError("--mass and --omega must be positive")
        if self.e_max < 0 or self.l_max < 0:
            raise ConfigError("--e-max and --l-max must be nonnegative")
        if self.command in ("verify", "crosscheck"):
            if not 4 <= self.n_max <= 40:
                raise ConfigError("--n-max must be in 4..40")
            if self.two_s > 8:
                raise ConfigError("--two-s must be at most 8 for engine runs")
        if self.command == "crosscheck" and self.points < radial.MIN_POINTS:
            raise ConfigError(f"--points must be at least {radial.MIN_POINTS}")
        if self.two_s == 0 and self.lam != 1:
            raise ConfigError("--lambda has no meaning for spin 0")
        return self

    def meta(self) -> dict:
        return {
            "two_s": self.two_s,
            "lambda": _rational(self.lam),
            "M": self.M,
            "omega": self.omega,
            "n_max": self.n_max,
            "tool_version": __version__,
        }


def _rational(x: Fraction) -> dict:
    return {"num": x.numerator, "den": x.denominator}


def _document(cfg: RunConfig, rows: list, checks: list) -> str:
    return json.dumps({"meta": cfg.meta(), "rows": rows, "checks": checks}, indent=2) + "\n"


# --- spectrum ------------------------------------------------------------------------


def cmd_spectrum(cfg: RunConfig) -> tuple[str, int]:
    try:
        table = spectrum.enumerate_levels(cfg.two_s, cfg.e_max, cfg.l_max, cfg.lam)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.fmt == "csv":
        return table.to_csv(), 0
    if cfg.fmt == "json":
        doc = table.to_dict()
        return _document(cfg, doc["rows"], []), 0
    lines = [f"{'E/w':>10} {'n':>3} {'l':>3} {'j':>5} {'mult':>5}"]
    for lvl in table.rows:
        j = f"{lvl.two_j}/2" if lvl.two_j % 2 else str(lvl.two_j // 2)
        lines.append(
            f"{float(lvl.energy_over_omega):>10.6f} {lvl.n:>3} {lvl.l:>3} {j:>5} {lvl.multiplicity:>5}"
        )
    lines.append(
        f"# cutoffs e_max={cfg.e_max} l_max={cfg.l_max}; "
        f"E=0 multiplicity: l=0 sector {table.degeneracy(0, l=0)}, total {table.degeneracy(0)}"
    )
    return "\n".join(lines) + "\n", 0


# --- verify --------------------------------------------------------------------------


def _check(name: str, passed: bool, defect: float, **details) -> dict:
    out = {"name": name, "status": "pass" if passed else "fail", "defect": defect}
    if details:
        out["details"] = details
    return out


def _lagrangian_checks() -> list[dict]:
    checks = []
    for sym, label in (("symmetric", "spin1"), ("antisymmetric", "spin0")):
        diffs = 0
        for osc in (True, False):
            trace = spinor.expand_trace_lagrangian(sym, osc)
            diff = trace - spinor.reference_lagrangian(sym, osc)
            diffs += len(diff.normal_form().terms)
            diff = spinor.expand_index_lagrangian(sym, osc) - trace
            diffs += len(diff.normal_form().terms)
        checks.append(_check(f"lagrangian_{label}", diffs == 0, float(diffs)))
    extended = spinor.expand_trace_lagrangian("symmetric", True, include_absent=True)
    hits = sum(extended.involves(f"W{k}") for k in (1, 2, 3))
    checks.append(_check("lower_block_components_absent", hits == 0, float(hits)))
    return checks


def run_checks(cfg: RunConfig) -> list[dict]:
    checks = _lagrangian_checks()
    two_s, n_max, M, w = cfg.two_s, cfg.n_max, cfg.M, cfg.omega
    defect = oscillator_identity_check(FockBasis(n_max), M, w)
    checks.append(_check("oscillator_identity", defect <= IDENTITY_TOL, defect))
    if two_s == 0:
        report = engine.assemble_scalar(n_max, M, w)
        checks.append(
            _check("engine_closed_form", report.passed(ENGINE_TOL), report.max_deviation,
                   component_count=report.component_count)
        )
        return checks

    ca = spinor.coupling_analysis(two_s)
    total = (two_s + 1) * (two_s + 2) * (two_s + 3) // 6
    checks.append(
        _check("coupling_analysis", ca.total == total and ca.n_retained == 3 * two_s + 1, 0.0,
               total=ca.total, retained=ca.n_retained)
    )
    lam = None if cfg.lam == 1 else float(cfg.lam)
    defect = engine.effective_hamiltonian_identity(two_s, n_max, M, w, lam)
    checks.append(_check("effective_hamiltonian_identity", defect <= IDENTITY_TOL, defect))

    s = two_s / 2
    coeff = engine.spin_orbit_coefficient(two_s, M, w, lam)
    expected = float(cfg.lam) * w / s
    checks.append(
        _check("spin_orbit_coefficient", abs(coeff - expected) <= ENGINE_TOL, abs(coeff - expected),
               coefficient=coeff, coefficient_times_S_over_omega=coeff * s / w,
               expected_over_omega=float(cfg.lam) / s)
    )
    if lam is None:
        report = engine.assemble_and_reduce(two_s, n_max, M, w)
    else:
        report = engine.assemble_nonminimal(two_s, lam, n_max, M, w)
    checks.append(
        _check("engine_closed_form", report.passed(ENGINE_TOL), report.max_deviation,
               lowest_eigenvalue=report.lowest_eigenvalue, hermiticity_defect=report.hermiticity_defect)
    )
    _, _, components = engine.nonminimal_system(two_s, cfg.lam, build_kinematics(FockBasis(0), M, w))
    checks.append(
        _check("nonminimal_component_count", components == 6 * two_s + 4, 0.0, components=components)
    )
    return checks


def cmd_verify(cfg: RunConfig) -> tuple[str, int]:
    checks = run_checks(cfg)
    status = 0 if all(c["status"] == "pass" for c in checks) else 1
    if cfg.fmt == "json":
        return _document(cfg, [], checks), status
    if cfg.fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("name", "status", "defect"))
        for c in checks:
            writer.writerow((c["name"], c["status"], repr(c["defect"])))
        return buf.getvalue(), status
    lines = [f"{c['status'].upper():4}  {c['name']:<32} defect={c['defect']:.3e}" for c in checks]
    return "\n".join(lines) + "\n", status


# --- crosscheck ----------------------------------------------------------------------


def crosscheck_rows(cfg: RunConfig) -> list[dict]:
    two_s = cfg.two_s
    if two_s == 0:
        report = engine.assemble_scalar(cfg.n_max, cfg.M, cfg.omega)
    elif cfg.lam == 1:
        report = engine.assemble_and_reduce(two_s, cfg.n_max, cfg.M, cfg.omega)
    else:
        report = engine.assemble_nonminimal(two_s, float(cfg.lam), cfg.n_max, cfg.M, cfg.omega)
    r_max = cfg.r_max if cfg.r_max is not None else radial.RadialGrid.reference(cfg.M, cfg.omega).r_max
    grid = radial.RadialGrid(r_max, cfg.points)
    radial_cache: dict[tuple[int, int], list[float]] = {}
    rows = []
    for lvl in sorted(report.levels, key=lambda v: (v.l, v.two_j, v.n)):
        value = None
        if lvl.n < RADIAL_LEVELS:
            key = (lvl.l, lvl.two_j)
            if key not in radial_cache:
                ch = radial.RadialChannel(lvl.l, lvl.two_j, two_s, float(cfg.lam), cfg.M, cfg.omega)
                radial_cache[key] = list(radial.solve_channel(ch, grid, RADIAL_LEVELS) / cfg.omega)
            value = float(radial_cache[key][lvl.n])
        closed = float(lvl.closed_form)
        rows.append(
            {
                "n": lvl.n,
                "l": lvl.l,
                "two_j": lvl.two_j,
                "two_s": two_s,
                "energy": _rational(lvl.closed_form),
                "multiplicity": lvl.multiplicity,
                "engine": lvl.energy,
                "radial": value,
                "engine_deviation": lvl.deviation,
                "radial_deviation": None if value is None else abs(value - closed),
            }
        )
    return rows


def cmd_crosscheck(cfg: RunConfig) -> tuple[str, int]:
    rows = crosscheck_rows(cfg)
    engine_dev = max(r["engine_deviation"] for r in rows)
    radial_dev = max(r["radial_deviation"] for r in rows if r["radial_deviation"] is not None)
    status = 0 if engine_dev <= ENGINE_TOL and radial_dev <= RADIAL_TOL else 1
    if cfg.fmt == "json":
        checks = [
            _check("engine_vs_closed_form", engine_dev <= ENGINE_TOL, engine_dev),
            _check("radial_vs_closed_form", radial_dev <= RADIAL_TOL, radial_dev),
        ]
        return _document(cfg, rows, checks), status
    if cfg.fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(spectrum.CSV_COLUMNS + ("source", "value", "deviation"))
        for r in rows:
            base = (r["n"], r["l"], r["two_j"], r["two_s"], r["energy"]["num"], r["energy"]["den"], r["multiplicity"])
            writer.writerow(base + ("engine", repr(r["engine"]), repr(r["engine_deviation"])))
            if r["radial"] is not None:
                writer.writerow(base + ("radial", repr(r["radial"]), repr(r["radial_deviation"])))
        return buf.getvalue(), status
    spin = cfg.two_s > 0
    head = f"{'n':>3} {'l':>3} " + (f"{'j':>5} " if spin else "") + f"{'closed':>10} {'engine':>14} {'radial':>12}"
    lines = [head]
    for r in rows:
        j = ""
        if spin:
            j = f"{r['two_j']}/2" if r["two_j"] % 2 else str(r["two_j"] // 2)
            j = f"{j:>5} "
        rad = f"{r['radial']:>12.6f}" if r["radial"] is not None else f"{'-':>12}"
        closed = Fraction(r["energy"]["num"], r["energy"]["den"])
        lines.append(f"{r['n']:>3} {r['l']:>3} {j}{float(closed):>10.4f} {r['engine']:>14.10f} {rad}")
    lines.append(f"# max engine deviation {engine_dev:.3e}, max radial deviation {radial_dev:.3e}")
    return "\n".join(lines) + "\n", status


# --- argument parsing -----------------------------------------------------------------

COMMANDS: dict[str, Callable[[RunConfig], tuple[str, int]]] = {
    "spectrum": cmd_spectrum,
    "verify": cmd_verify,
    "crosscheck": cmd_crosscheck,
}
DEFAULT_FORMAT = {"spectrum": "table", "verify": "json", "crosscheck": "table"}


def _fraction_arg(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="galosc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--two-s", type=int, default=1, help="twice the spin S")
        p.add_argument("--lambda", dest="lam", type=_fraction_arg, default=Fraction(1),
                       help="spin-orbit scale of the non-minimal theory")
        p.add_argument("--mass", type=float, default=1.0)
        p.add_argument("--omega", type=float, default=1.0)
        p.add_argument("--n-max", type=int, default=8, help="Fock total-quanta cutoff")
        p.add_argument("--e-max", type=_fraction_arg, default=Fraction(4), help="energy cutoff in units of omega")
        p.add_argument("--l-max", type=int, default=6)
        p.add_argument("--r-max", type=float, default=None, help="radial box (default 12/sqrt(M omega))")
        p.add_argument("--points", type=int, default=2000, help="radial interior grid points")
        p.add_argument("--format", dest="fmt", choices=("table", "csv", "json"), default=None)
        p.add_argument("--out", default=None, help="write output to this path instead of stdout")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(
            command=args.command,
            two_s=args.two_s,
            lam=args.lam,
            M=args.mass,
            omega=args.omega,
            n_max=args.n_max,
            e_max=args.e_max,
            l_max=args.l_max,
            r_max=args.r_max,
            points=args.points,
            fmt=args.fmt or DEFAULT_FORMAT[args.command],
            out=args.out,
        ).validate()
        text, status = COMMANDS[cfg.command](cfg)
    except ValueError as exc:  # includes ConfigError
        print(f"galosc: error: {exc}", file=sys.stderr)
        return 2
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
