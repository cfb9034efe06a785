"""Exact scalars, polynomials and small matrices for the spinor algebra.

Scalars are Gaussian rationals (``Fraction`` real and imaginary parts).
Polynomials are commutative in the kinematic symbols listed in
:data:`SYMBOLS`; derivative symbols only ever occur to first degree in the
identities checked here, so no operator ordering is lost.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence

SYMBOLS: tuple[str, ...] = ("dt", "d1", "d2", "d3", "r1", "r2", "r3", "M", "w", "lam")
DERIVATIVES: tuple[str, ...] = ("dt", "d1", "d2", "d3")
_INDEX = {name: k for k, name in enumerate(SYMBOLS)}
_ZERO_EXP = (0,) * len(SYMBOLS)


def _fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


@dataclass(frozen=True)
class GaussianRational:
    """Element of Q(i), kept in canonical (lowest-terms) form."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", _fraction(self.re))
        object.__setattr__(self, "im", _fraction(self.im))

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, complex):
            if x.real != int(x.real) or x.imag != int(x.imag):
                raise TypeError(f"only integer complex literals are exact: {x!r}")
            return cls(int(x.real), int(x.imag))
        return cls(_fraction(x))

    @property
    def re_num(self) -> int:
        return self.re.numerator

    @property
    def re_den(self) -> int:
        return self.re.denominator

    @property
    def im_num(self) -> int:
        return self.im.numerator

    @property
    def im_den(self) -> int:
        return self.im.denominator

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __add__(self, other):
        if isinstance(other, FormalPolynomial):
            return NotImplemented
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        if isinstance(other, FormalPolynomial):
            return NotImplemented
        return self + (-GaussianRational.coerce(other))

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, FormalPolynomial):
            return NotImplemented
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = GaussianRational.coerce(other)
        norm = o.re * o.re + o.im * o.im
        if norm == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return self * GaussianRational(o.re / norm, -o.im / norm)

    def __eq__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __str__(self) -> str:
        if not self.im:
            return str(self.re)
        if not self.re:
            return {1: "i", -1: "-i"}.get(self.im, f"{self.im}i")
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{abs(self.im)}i)"

    __repr__ = __str__


ZERO = GaussianRational()
ONE = GaussianRational(1)
I = GaussianRational(0, 1)


def _exponent(powers: Mapping[str, int]) -> tuple[int, ...]:
    exp = [0] * len(SYMBOLS)
    for name, k in powers.items():
        exp[_INDEX[name]] += k
    return tuple(exp)


class FormalPolynomial:
    """Polynomial over Q(i) in the commuting symbols :data:`SYMBOLS`.

    Treated as immutable; zero coefficients are never stored.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[tuple[int, ...], object] | None = None):
        clean: dict[tuple[int, ...], GaussianRational] = {}
        for exp, c in (terms or {}).items():
            c = GaussianRational.coerce(c)
            if c:
                clean[tuple(exp)] = c
        self._terms = clean

    @classmethod
    def constant(cls, c) -> "FormalPolynomial":
        return cls({_ZERO_EXP: c})

    @classmethod
    def symbol(cls, name: str, power: int = 1) -> "FormalPolynomial":
        return cls({_exponent({name: power}): ONE})

    @classmethod
    def monomial(cls, coeff, **powers: int) -> "FormalPolynomial":
        return cls({_exponent(powers): coeff})

    @property
    def terms(self) -> dict[tuple[int, ...], GaussianRational]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    @staticmethod
    def coerce(x) -> "FormalPolynomial":
        if isinstance(x, FormalPolynomial):
            return x
        return FormalPolynomial.constant(x)

    def __add__(self, other):
        o = FormalPolynomial.coerce(other)
        out = dict(self._terms)
        for exp, c in o._terms.items():
            out[exp] = out.get(exp, ZERO) + c
        return FormalPolynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return FormalPolynomial({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-FormalPolynomial.coerce(other))

    def __rsub__(self, other):
        return FormalPolynomial.coerce(other) - self

    def __mul__(self, other):
        o = FormalPolynomial.coerce(other)
        out: dict[tuple[int, ...], GaussianRational] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in o._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, ZERO) + c1 * c2
        return FormalPolynomial(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        try:
            o = FormalPolynomial.coerce(other)
        except TypeError:
            return NotImplemented
        return self._terms == o._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def conjugate(self) -> "FormalPolynomial":
        """Complex-conjugate the coefficients; all symbols are real."""
        return FormalPolynomial({e: c.conjugate() for e, c in self._terms.items()})

    def coefficient(self, **powers: int) -> GaussianRational:
        return self._terms.get(_exponent(powers), ZERO)

    def degree(self, names: Iterable[str]) -> int:
        """Maximum total degree in the given symbols (-1 for the zero polynomial)."""
        idx = [_INDEX[n] for n in names]
        return max((sum(e[i] for i in idx) for e in self._terms), default=-1)

    def substitute_zero(self, name: str) -> "FormalPolynomial":
        k = _INDEX[name]
        return FormalPolynomial({e: c for e, c in self._terms.items() if e[k] == 0})

    def part_with(self, name: str, power: int = 1) -> "FormalPolynomial":
        """Terms carrying exactly ``name**power``."""
        k = _INDEX[name]
        return FormalPolynomial({e: c for e, c in self._terms.items() if e[k] == power})

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        out = ""
        for exp in sorted(self._terms, reverse=True):
            mono = "*".join(
                name if p == 1 else f"{name}^{p}" for name, p in zip(SYMBOLS, exp) if p
            )
            c = self._terms[exp]
            negative = not c.im and c.re < 0
            mag = -c if negative else c
            if not mono:
                term = str(mag)
            elif mag == 1:
                term = mono
            else:
                term = f"{mag}*{mono}"
            if out:
                out += " - " if negative else " + "
            elif negative:
                out = "-"
            out += term
        return out

    __repr__ = __str__


def _poly_grid(rows) -> tuple[tuple[FormalPolynomial, ...], ...]:
    return tuple(tuple(FormalPolynomial.coerce(x) for x in row) for row in rows)


class SymbolicMatrix:
    """Square matrix of :class:`FormalPolynomial` entries.

    ``inv_sqrt2`` records an overall factor ``2**(-inv_sqrt2/2)`` kept out
    of the entries so the scalar field stays rational.
    """

    __slots__ = ("dim", "entries", "inv_sqrt2")

    def __init__(self, rows: Sequence[Sequence[object]], inv_sqrt2: int = 0):
        self.entries = _poly_grid(rows)
        self.dim = len(self.entries)
        if any(len(row) != self.dim for row in self.entries):
            raise ValueError("SymbolicMatrix must be square")
        self.inv_sqrt2 = inv_sqrt2

    @classmethod
    def identity(cls, dim: int) -> "SymbolicMatrix":
        return cls([[1 if i == j else 0 for j in range(dim)] for i in range(dim)])

    @classmethod
    def zeros(cls, dim: int) -> "SymbolicMatrix":
        return cls([[0] * dim for _ in range(dim)])

    def __getitem__(self, ij) -> FormalPolynomial:
        i, j = ij
        return self.entries[i][j]

    def _check(self, other: "SymbolicMatrix"):
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch {self.dim} vs {other.dim}")

    def __add__(self, other: "SymbolicMatrix") -> "SymbolicMatrix":
        self._check(other)
        if self.inv_sqrt2 != other.inv_sqrt2:
            raise ValueError("cannot add matrices with different sqrt(2) scale")
        return SymbolicMatrix(
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)],
            self.inv_sqrt2,
        )

    def __neg__(self):
        return SymbolicMatrix([[-a for a in row] for row in self.entries], self.inv_sqrt2)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "SymbolicMatrix":
        c = FormalPolynomial.coerce(c)
        return SymbolicMatrix([[c * a for a in row] for row in self.entries], self.inv_sqrt2)

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def __matmul__(self, other: "SymbolicMatrix") -> "SymbolicMatrix":
        self._check(other)
        n = self.dim
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = FormalPolynomial()
                for k in range(n):
                    a, b = self.entries[i][k], other.entries[k][j]
                    if a and b:
                        acc = acc + a * b
                row.append(acc)
            rows.append(row)
        return SymbolicMatrix(rows, self.inv_sqrt2 + other.inv_sqrt2)

    def kron(self, other: "SymbolicMatrix") -> "SymbolicMatrix":
        n, m = self.dim, other.dim
        rows = [
            [self.entries[i // m][j // m] * other.entries[i % m][j % m] for j in range(n * m)]
            for i in range(n * m)
        ]
        return SymbolicMatrix(rows, self.inv_sqrt2 + other.inv_sqrt2)

    def transpose(self) -> "SymbolicMatrix":
        return SymbolicMatrix([list(col) for col in zip(*self.entries)], self.inv_sqrt2)

    @property
    def T(self) -> "SymbolicMatrix":
        return self.transpose()

    def conjugate(self) -> "SymbolicMatrix":
        return SymbolicMatrix([[a.conjugate() for a in row] for row in self.entries], self.inv_sqrt2)

    def trace(self) -> FormalPolynomial:
        """Trace with the sqrt(2) scale folded in; the scale power must be even."""
        if self.inv_sqrt2 % 2:
            raise ValueError("odd power of 1/sqrt(2) is not rational")
        acc = FormalPolynomial()
        for i in range(self.dim):
            acc = acc + self.entries[i][i]
        return acc * Fraction(1, 2 ** (self.inv_sqrt2 // 2))

    def is_zero(self) -> bool:
        return all(a.is_zero() for row in self.entries for a in row)

    def __eq__(self, other):
        if not isinstance(other, SymbolicMatrix):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.inv_sqrt2 == other.inv_sqrt2
            and self.entries == other.entries
        )

    __hash__ = None

    def map(self, fn) -> "SymbolicMatrix":
        return SymbolicMatrix([[fn(a) for a in row] for row in self.entries], self.inv_sqrt2)

    def to_complex(self, **values: float):
        """Evaluate numerically (numpy array) with the given symbol values."""
        import numpy as np

        out = np.zeros((self.dim, self.dim), dtype=complex)
        for i, row in enumerate(self.entries):
            for j, a in enumerate(row):
                total = 0j
                for exp, c in a.terms.items():
                    term = complex(c)
                    for name, p in zip(SYMBOLS, exp):
                        if p:
                            term *= values[name] ** p
                    total += term
                out[i, j] = total
        return out * 2 ** (-self.inv_sqrt2 / 2)

    def __str__(self) -> str:
        scale = f"2^(-{self.inv_sqrt2}/2) * " if self.inv_sqrt2 else ""
        return scale + "\n".join("[" + ", ".join(str(a) for a in row) + "]" for row in self.entries)

    __repr__ = __str__
