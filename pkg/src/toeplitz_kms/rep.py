"""Left-regular twisted representation on finitely supported vectors of l^2(N^n).

Used as an independent check on the Wick reduction: generators act one at a
time, with no normal-ordering involved.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from .exact import ThetaMatrix
from .wick import PRUNE_TOL, ToeplitzElement

Vec = tuple[int, ...]


class FockVector:
    """Finite combination of basis vectors delta_m, m in N^n."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Vec, complex] | None = None):
        clean: dict[Vec, complex] = {}
        for m, c in (terms or {}).items():
            m = tuple(int(v) for v in m)
            if min(m, default=0) < 0:
                raise ValueError(f"basis index {m} has negative coordinates")
            clean[m] = clean.get(m, 0) + complex(c)
        self.terms = {m: c for m, c in clean.items() if abs(c) >= PRUNE_TOL}

    @classmethod
    def basis(cls, m: Sequence[int]) -> FockVector:
        return cls({tuple(m): 1})

    def __add__(self, other: FockVector) -> FockVector:
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return FockVector(out)

    def __mul__(self, c: complex) -> FockVector:
        return FockVector({m: v * c for m, v in self.terms.items()})

    __rmul__ = __mul__

    def amplitude(self, m: Sequence[int]) -> complex:
        return self.terms.get(tuple(m), 0j)

    def distance(self, other: FockVector) -> float:
        keys = set(self.terms) | set(other.terms)
        return max((abs(self.terms.get(k, 0) - other.terms.get(k, 0)) for k in keys), default=0.0)

    def __repr__(self) -> str:
        return f"FockVector({dict(sorted(self.terms.items()))})"


def apply_creation(p: Sequence[int], v: FockVector, theta: ThetaMatrix) -> FockVector:
    """delta_m -> sigma(p, m) delta_{p+m}."""
    p = tuple(p)
    out = {}
    for m, c in v.terms.items():
        out[tuple(a + b for a, b in zip(p, m))] = c * theta.sigma(p, m)
    return FockVector(out)


def apply_annihilation(p: Sequence[int], v: FockVector, theta: ThetaMatrix) -> FockVector:
    """delta_m -> conj(sigma(p, m - p)) delta_{m-p} when p <= m, else 0."""
    p = tuple(p)
    out = {}
    for m, c in v.terms.items():
        rest = tuple(b - a for a, b in zip(p, m))
        if min(rest, default=0) < 0:
            continue
        out[rest] = c * theta.sigma(p, rest).conjugate()
    return FockVector(out)


def apply_element(x: ToeplitzElement, v: FockVector, theta: ThetaMatrix | None = None) -> FockVector:
    """Each monomial L_p L_q^* acts as annihilation by q followed by creation by p."""
    theta = x.theta if theta is None else theta
    out = FockVector()
    for (p, q), c in x.sorted_terms():
        out = out + apply_creation(p, apply_annihilation(q, v, theta), theta) * c
    return out


def apply_word(word: Iterable[tuple[str, Sequence[int]]], v: FockVector,
               theta: ThetaMatrix) -> FockVector:
    """Apply a product of generators ``("L", p)`` / ``("L*", p)``; the rightmost acts first."""
    for kind, p in reversed(list(word)):
        if kind == "L":
            v = apply_creation(p, v, theta)
        elif kind == "L*":
            v = apply_annihilation(p, v, theta)
        else:
            raise ValueError(f"unknown generator kind {kind!r}")
    return v


def vacuum_value(x: ToeplitzElement, theta: ThetaMatrix | None = None) -> complex:
    """<delta_0, X delta_0>."""
    n = x.n
    return apply_element(x, FockVector.basis((0,) * n), theta).amplitude((0,) * n)
