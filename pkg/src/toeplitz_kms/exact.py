"""Exact scalars, antisymmetric matrices and the cocycle sigma_Theta.

Matrix entries are rationals plus rational multiples of named irrational
symbols.  Each symbol carries a numeric binding that is only used when a
phase has to be turned into a complex number.  It is assumed (and cannot
be checked) that 1 and the bound symbol values are linearly independent
over the rationals.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping, Sequence

IntVector = Sequence[int]


def _to_fraction(value) -> Fraction:
    if isinstance(value, float):
        raise TypeError(f"refusing to convert float {value!r} to an exact rational")
    return Fraction(value)


@dataclass(frozen=True)
class ExactScalar:
    """A real number ``rational + sum(coeff * symbol)`` in canonical form."""

    rational: Fraction = Fraction(0)
    symbols: tuple[tuple[str, Fraction], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "rational", _to_fraction(self.rational))
        merged: dict[str, Fraction] = {}
        items = self.symbols.items() if isinstance(self.symbols, Mapping) else self.symbols
        for name, coeff in items:
            merged[name] = merged.get(name, Fraction(0)) + _to_fraction(coeff)
        object.__setattr__(
            self, "symbols", tuple(sorted((k, v) for k, v in merged.items() if v != 0))
        )

    @classmethod
    def parse(cls, rational: str | int | Fraction = 0, symbols: Mapping[str, str] | None = None):
        return cls(Fraction(rational), {k: Fraction(v) for k, v in (symbols or {}).items()})

    def __add__(self, other: ExactScalar | int | Fraction) -> ExactScalar:
        if not isinstance(other, ExactScalar):
            other = ExactScalar(other)
        return ExactScalar(self.rational + other.rational, self.symbols + other.symbols)

    __radd__ = __add__

    def __neg__(self) -> ExactScalar:
        return ExactScalar(-self.rational, tuple((k, -v) for k, v in self.symbols))

    def __sub__(self, other) -> ExactScalar:
        if not isinstance(other, ExactScalar):
            other = ExactScalar(other)
        return self + (-other)

    def __rsub__(self, other) -> ExactScalar:
        return (-self) + other

    def __mul__(self, other: int | Fraction) -> ExactScalar:
        if isinstance(other, ExactScalar):
            if other.symbols and self.symbols:
                raise TypeError("product of two symbolic scalars is not representable")
            if other.symbols:
                return other * self.rational
            other = other.rational
        c = _to_fraction(other)
        return ExactScalar(self.rational * c, tuple((k, v * c) for k, v in self.symbols))

    __rmul__ = __mul__

    @property
    def is_rational(self) -> bool:
        return not self.symbols

    def is_integer(self) -> bool:
        return not self.symbols and self.rational.denominator == 1

    def evaluate(self, bindings: Mapping[str, float]) -> float:
        total = float(self.rational)
        for name, coeff in self.symbols:
            if name not in bindings:
                raise KeyError(f"no numeric binding for symbol {name!r}")
            total += float(coeff) * bindings[name]
        return total

    def __str__(self) -> str:
        parts = [str(self.rational)] if self.rational or not self.symbols else []
        parts += [f"{v}*{k}" for k, v in self.symbols]
        return " + ".join(parts)


ZERO = ExactScalar()


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def _bilinear(form: tuple[tuple[int, ...], ...], x: IntVector, y: IntVector) -> int:
    total = 0
    for xi, row in zip(x, form):
        if xi:
            total += xi * sum(r * yj for r, yj in zip(row, y) if yj)
    return total


def phase_from_exponent(num: int, sym_nums: Sequence[int], denom: int,
                        sym_values: Sequence[float], scale: int = 1) -> complex:
    """Return ``exp(-pi*i*scale*t)`` for ``t = (num + sum(sym_nums*values))/denom``.

    The rational part is reduced modulo the period before any rounding.
    """
    period = 2 * denom
    r = (scale * num) % period
    t = r / denom
    for a, v in zip(sym_nums, sym_values):
        if a:
            t += scale * a * v / denom
    t = math.fmod(t, 2.0)
    return complex(math.cos(math.pi * t), -math.sin(math.pi * t))


@dataclass(frozen=True)
class ThetaMatrix:
    """Exact antisymmetric n x n matrix with numeric bindings for its symbols."""

    entries: tuple[tuple[ExactScalar, ...], ...]
    bindings: tuple[tuple[str, float], ...] = ()
    # integer forms: pairing(x, y) = (x^T N0 y + sum_s (x^T Ns y) * s) / denom
    denom: int = field(init=False, repr=False, compare=False)
    symbol_names: tuple[str, ...] = field(init=False, repr=False, compare=False)
    symbol_values: tuple[float, ...] = field(init=False, repr=False, compare=False)
    _rational_form: tuple = field(init=False, repr=False, compare=False)
    _symbol_forms: tuple = field(init=False, repr=False, compare=False)
    _hash: int = field(init=False, repr=False, compare=False)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, ThetaMatrix):
            return NotImplemented
        return self.entries == other.entries and self.bindings == other.bindings

    def __post_init__(self):
        entries = tuple(tuple(e if isinstance(e, ExactScalar) else ExactScalar(e) for e in row)
                        for row in self.entries)
        object.__setattr__(self, "entries", entries)
        n = len(entries)
        if any(len(row) != n for row in entries):
            raise ValueError("theta must be square")
        for i in range(n):
            for j in range(n):
                if entries[i][j] + entries[j][i] != ZERO:
                    raise ValueError(f"theta is not antisymmetric at ({i}, {j})")
        bindings = self.bindings.items() if isinstance(self.bindings, Mapping) else self.bindings
        bindings = tuple(sorted((str(k), float(v)) for k, v in bindings))
        object.__setattr__(self, "bindings", bindings)
        bound = dict(bindings)
        names = sorted({name for row in entries for e in row for name, _ in e.symbols})
        missing = [s for s in names if s not in bound]
        if missing:
            raise ValueError(f"symbols without numeric binding: {missing}")
        denom = 1
        for row in entries:
            for e in row:
                denom = _lcm(denom, e.rational.denominator)
                for _, c in e.symbols:
                    denom = _lcm(denom, c.denominator)
        rational_form = tuple(tuple(int(e.rational * denom) for e in row) for row in entries)
        symbol_forms = tuple(
            tuple(tuple(int(dict(e.symbols).get(s, 0) * denom) for e in row) for row in entries)
            for s in names
        )
        object.__setattr__(self, "denom", denom)
        object.__setattr__(self, "symbol_names", tuple(names))
        object.__setattr__(self, "symbol_values", tuple(bound[s] for s in names))
        object.__setattr__(self, "_rational_form", rational_form)
        object.__setattr__(self, "_symbol_forms", symbol_forms)
        object.__setattr__(self, "_hash", hash((entries, bindings)))

    @classmethod
    def from_upper(cls, n: int, upper: Mapping[tuple[int, int], ExactScalar | int | Fraction],
                   bindings: Mapping[str, float] | None = None) -> ThetaMatrix:
        """Build from entries with ``i < j`` (0-based); the rest is filled by antisymmetry."""
        grid = [[ZERO] * n for _ in range(n)]
        for (i, j), value in upper.items():
            if not (0 <= i < j < n):
                raise ValueError(f"entry ({i}, {j}) is not strictly upper triangular")
            value = value if isinstance(value, ExactScalar) else ExactScalar(value)
            grid[i][j] = value
            grid[j][i] = -value
        return cls(tuple(tuple(r) for r in grid), tuple((bindings or {}).items()))

    @classmethod
    def zero(cls, n: int) -> ThetaMatrix:
        return cls.from_upper(n, {})

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def is_rational(self) -> bool:
        return not self.symbol_names

    def binding_map(self) -> dict[str, float]:
        return dict(self.bindings)

    def _check(self, *vectors: IntVector) -> None:
        for v in vectors:
            if len(v) != self.n:
                raise ValueError(f"expected a vector of length {self.n}, got {len(v)}")

    def exponent(self, x: IntVector, y: IntVector) -> tuple[int, tuple[int, ...]]:
        """Integer numerators of ``<x, Theta y>`` over ``self.denom``."""
        self._check(x, y)
        return self.exponent_unchecked(x, y)

    def exponent_unchecked(self, x: IntVector, y: IntVector) -> tuple[int, tuple[int, ...]]:
        return (_bilinear(self._rational_form, x, y),
                tuple(_bilinear(f, x, y) for f in self._symbol_forms))

    def pairing(self, x: IntVector, y: IntVector) -> ExactScalar:
        num, sym = self.exponent(x, y)
        return ExactScalar(Fraction(num, self.denom),
                           tuple((s, Fraction(a, self.denom)) for s, a in zip(self.symbol_names, sym)))

    def phase(self, num: int, sym: Sequence[int], scale: int = 1) -> complex:
        """``exp(-pi*i*scale*t)`` where ``t`` has numerators ``(num, sym)``."""
        return phase_from_exponent(num, sym, self.denom, self.symbol_values, scale)

    def sigma(self, x: IntVector, y: IntVector) -> complex:
        num, sym = self.exponent(x, y)
        return self.phase(num, sym)

    def restrict(self, indices: Iterable[int]) -> ThetaMatrix:
        idx = list(indices)
        if len(set(idx)) != len(idx):
            raise ValueError("repeated index")
        if any(not (0 <= i < self.n) for i in idx):
            raise ValueError("index out of range")
        entries = tuple(tuple(self.entries[i][j] for j in idx) for i in idx)
        return ThetaMatrix(entries, self.bindings)

    def permuted(self, perm: Sequence[int]) -> ThetaMatrix:
        """Matrix in new coordinates where new coordinate ``i`` is old coordinate ``perm[i]``."""
        if sorted(perm) != list(range(self.n)):
            raise ValueError("not a permutation")
        return self.restrict(perm)

    def numeric(self) -> list[list[float]]:
        b = self.binding_map()
        return [[e.evaluate(b) for e in row] for row in self.entries]


def pairing(theta: ThetaMatrix, x: IntVector, y: IntVector) -> ExactScalar:
    """Exact value of ``<x, Theta y>``."""
    return theta.pairing(x, y)


def cocycle_eval(theta: ThetaMatrix, x: IntVector, y: IntVector) -> complex:
    """sigma_Theta(x, y) = exp(-pi i <x, Theta y>), one cos/sin per call."""
    return theta.sigma(x, y)


def is_integer(s: ExactScalar) -> bool:
    return s.is_integer()


def restrict_block(theta: ThetaMatrix, indices: Iterable[int]) -> ThetaMatrix:
    """Principal submatrix on the given (0-based) indices."""
    return theta.restrict(indices)


def gcd_all(values: Iterable[int]) -> int:
    return reduce(math.gcd, values, 0)


def unit_vector(n: int, i: int) -> tuple[int, ...]:
    return tuple(1 if j == i else 0 for j in range(n))


def unit_phase(t: float) -> complex:
    """exp(2 pi i t)."""
    return cmath.exp(2j * math.pi * t)
