"""Wick-ordered monomials L_p L_q^* and the twisted group algebra of Z^n.

A :class:`ToeplitzElement` is a finite combination ``sum c_{p,q} L_p L_q^*``
with ``p, q`` in N^n; products are reduced back to this normal form with the
Nica covariance rule.  A :class:`TorusElement` is ``sum c_b v_b`` with
``v_a v_b = sigma(a, b) v_{a+b}``.
"""

from __future__ import annotations

import cmath
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .exact import ThetaMatrix, unit_vector

PRUNE_TOL = 1e-14

Vec = tuple[int, ...]
Key = tuple[Vec, Vec]


def _vadd(a: Sequence[int], b: Sequence[int]) -> Vec:
    return tuple(x + y for x, y in zip(a, b))


def _vsub(a: Sequence[int], b: Sequence[int]) -> Vec:
    return tuple(x - y for x, y in zip(a, b))


def _pruned(terms: Mapping, tol: float = PRUNE_TOL) -> dict:
    return {k: v for k, v in terms.items() if abs(v) >= tol}


def mono_mul(a: tuple[complex, Vec, Vec], b: tuple[complex, Vec, Vec],
             theta: ThetaMatrix) -> tuple[complex, Vec, Vec]:
    """Product of ``lam L_p L_q^*`` and ``mu L_c L_d^*`` in normal form.

    With ``c2 = (q v c) - q`` and ``q2 = (q v c) - c`` the result is
    ``lam mu sigma(p - q, c2) sigma(c - d, q2) L_{p+c2} L_{d+q2}^*``.
    """
    lam, p, q = a
    mu, c, d = b
    c2 = tuple(y - x if y > x else 0 for x, y in zip(q, c))
    q2 = tuple(x - y if x > y else 0 for x, y in zip(q, c))
    exp_ = theta.exponent_unchecked
    n1, s1 = exp_(tuple(x - y for x, y in zip(p, q)), c2)
    n2, s2 = exp_(tuple(x - y for x, y in zip(c, d)), q2)
    if s1:
        s1 = tuple(x + y for x, y in zip(s1, s2))
    phase = theta.phase(n1 + n2, s1)
    return (lam * mu * phase, tuple(x + y for x, y in zip(p, c2)),
            tuple(x + y for x, y in zip(d, q2)))


class ToeplitzElement:
    """Finite linear combination of Wick-ordered monomials over a fixed Theta."""

    __slots__ = ("theta", "terms")

    def __init__(self, theta: ThetaMatrix, terms: Mapping[Key, complex] | None = None):
        n = theta.n
        clean = {}
        for (p, q), c in (terms or {}).items():
            p, q = tuple(int(v) for v in p), tuple(int(v) for v in q)
            if len(p) != n or len(q) != n:
                raise ValueError(f"key ({p}, {q}) does not have length {n}")
            if min(p + q, default=0) < 0:
                raise ValueError(f"key ({p}, {q}) has negative coordinates")
            clean[(p, q)] = clean.get((p, q), 0) + complex(c)
        self.theta = theta
        self.terms = _pruned(clean)

    # constructors
    @classmethod
    def identity(cls, theta: ThetaMatrix) -> ToeplitzElement:
        z = (0,) * theta.n
        return cls(theta, {(z, z): 1})

    @classmethod
    def monomial(cls, theta: ThetaMatrix, p: Sequence[int], q: Sequence[int] | None = None,
                 coeff: complex = 1) -> ToeplitzElement:
        q = (0,) * theta.n if q is None else q
        return cls(theta, {(tuple(p), tuple(q)): coeff})

    @classmethod
    def isometry(cls, theta: ThetaMatrix, p: Sequence[int]) -> ToeplitzElement:
        return cls.monomial(theta, p)

    @property
    def n(self) -> int:
        return self.theta.n

    @classmethod
    def _trusted(cls, theta: ThetaMatrix, terms: dict) -> ToeplitzElement:
        """Skip key validation for terms produced by the algebra itself."""
        obj = cls.__new__(cls)
        obj.theta = theta
        obj.terms = _pruned(terms)
        return obj

    def _same(self, other: ToeplitzElement) -> None:
        if other.theta is not self.theta and other.theta != self.theta:
            raise ValueError("elements live over different Theta matrices")

    def __add__(self, other: ToeplitzElement) -> ToeplitzElement:
        self._same(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return ToeplitzElement(self.theta, out)

    def __neg__(self) -> ToeplitzElement:
        return ToeplitzElement(self.theta, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: ToeplitzElement) -> ToeplitzElement:
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, ToeplitzElement):
            return mul(self, other)
        return ToeplitzElement(self.theta, {k: v * other for k, v in self.terms.items()})

    def __rmul__(self, other) -> ToeplitzElement:
        return ToeplitzElement(self.theta, {k: other * v for k, v in self.terms.items()})

    def adjoint(self) -> ToeplitzElement:
        return ToeplitzElement(self.theta, {(q, p): v.conjugate() for (p, q), v in self.terms.items()})

    def norm1(self) -> float:
        return sum(abs(v) for v in self.terms.values())

    def sup_norm(self) -> float:
        return max((abs(v) for v in self.terms.values()), default=0.0)

    def coefficient(self, p: Sequence[int], q: Sequence[int]) -> complex:
        return self.terms.get((tuple(p), tuple(q)), 0j)

    def sorted_terms(self) -> list[tuple[Key, complex]]:
        return sorted(self.terms.items())

    def distance(self, other: ToeplitzElement) -> float:
        """Largest coefficient difference in normal form."""
        keys = set(self.terms) | set(other.terms)
        return max((abs(self.terms.get(k, 0) - other.terms.get(k, 0)) for k in keys), default=0.0)

    def __repr__(self) -> str:
        body = " + ".join(f"({v:.6g})L{p}L{q}*" for (p, q), v in self.sorted_terms())
        return f"ToeplitzElement({body or '0'})"

    def to_json(self) -> list[dict]:
        return [{"p": list(p), "q": list(q), "re": v.real, "im": v.imag}
                for (p, q), v in self.sorted_terms()]

    @classmethod
    def from_json(cls, theta: ThetaMatrix, items: Iterable[Mapping]) -> ToeplitzElement:
        terms: dict[Key, complex] = {}
        for item in items:
            key = (tuple(item["p"]), tuple(item["q"]))
            terms[key] = terms.get(key, 0) + complex(item.get("re", 0.0), item.get("im", 0.0))
        return cls(theta, terms)


def mul(x: ToeplitzElement, y: ToeplitzElement) -> ToeplitzElement:
    x._same(y)
    theta = x.theta
    out: dict[Key, complex] = {}
    for (p, q), a in x.terms.items():
        for (c, d), b in y.terms.items():
            coeff, key_p, key_q = mono_mul((a, p, q), (b, c, d), theta)
            key = (key_p, key_q)
            out[key] = out.get(key, 0) + coeff
    return ToeplitzElement._trusted(theta, out)


def add(x: ToeplitzElement, y: ToeplitzElement) -> ToeplitzElement:
    return x + y


def scale(x: ToeplitzElement, c: complex) -> ToeplitzElement:
    return x * c


def adjoint(x: ToeplitzElement) -> ToeplitzElement:
    return x.adjoint()


def range_projection(theta: ThetaMatrix, p: Sequence[int]) -> ToeplitzElement:
    return ToeplitzElement.monomial(theta, p, p)


def defect_projection(k: int, theta: ThetaMatrix) -> ToeplitzElement:
    """Q = prod_{j<k} (1 - L_{e_j} L_{e_j}^*), multiplied out in normal form."""
    if not 0 <= k <= theta.n:
        raise ValueError(f"k={k} outside [0, {theta.n}]")
    one = ToeplitzElement.identity(theta)
    q = one
    for j in range(k):
        q = q * (one - range_projection(theta, unit_vector(theta.n, j)))
    return q


def gauge_expectation_k(x: ToeplitzElement, k: int) -> ToeplitzElement:
    """Keep the terms whose keys agree on the first k coordinates."""
    return ToeplitzElement(x.theta, {(p, q): v for (p, q), v in x.terms.items() if p[:k] == q[:k]})


@dataclass(frozen=True)
class DynamicsSpec:
    """Direction ``r`` of the dynamics, positive coordinates first.

    ``perm[i]`` is the input coordinate that became coordinate ``i``;
    ``exact`` is None when ``r`` was supplied as floats.
    """

    r: tuple[float, ...]
    k: int
    exact: tuple[Fraction, ...] | None = None
    perm: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.perm:
            object.__setattr__(self, "perm", tuple(range(len(self.r))))
        if any(v < 0 for v in self.r):
            raise ValueError("r must have nonnegative coordinates")
        if any(v <= 0 for v in self.r[:self.k]) or any(v != 0 for v in self.r[self.k:]):
            raise ValueError("r must be (positive..., 0...) with k positive coordinates")

    @classmethod
    def from_vector(cls, values: Sequence) -> DynamicsSpec:
        """Accepts ints, Fractions or strings (exact) or floats (inexact) and sorts positives first."""
        exact = not any(isinstance(v, float) for v in values)
        vals = [Fraction(v) if exact else float(v) for v in values]
        if any(v < 0 for v in vals):
            raise ValueError("r must have nonnegative coordinates")
        perm = tuple([i for i, v in enumerate(vals) if v > 0] + [i for i, v in enumerate(vals) if v == 0])
        ordered = [vals[i] for i in perm]
        k = sum(1 for v in ordered if v > 0)
        return cls(tuple(float(v) for v in ordered), k,
                   tuple(ordered) if exact else None, perm)

    @property
    def n(self) -> int:
        return len(self.r)

    @property
    def d(self) -> int:
        return self.n - self.k

    def energy(self, p: Sequence[int]) -> float:
        return sum(a * b for a, b in zip(p, self.r))


def apply_dynamics(x: ToeplitzElement, r: DynamicsSpec | Sequence[float], t: complex) -> ToeplitzElement:
    """alpha_t(L_p L_q^*) = exp(i <p - q, r> t) L_p L_q^*, for complex t."""
    rv = r.r if isinstance(r, DynamicsSpec) else tuple(r)
    out = {}
    for (p, q), v in x.terms.items():
        e = sum((a - b) * c for a, b, c in zip(p, q, rv))
        out[(p, q)] = v * cmath.exp(1j * e * t) if e else v
    return ToeplitzElement(x.theta, out)


def rho_automorphism(x: ToeplitzElement, p: Sequence[int]) -> ToeplitzElement:
    """rho_p for p in N^k: scales L_a L_b^* by sigma(p, a)^2 conj(sigma(p, b)^2)."""
    theta = x.theta
    k = len(p)
    full_p = tuple(p) + (0,) * (theta.n - k)
    out = {}
    for (a, b), v in x.terms.items():
        if any(a[:k]) or any(b[:k]):
            raise ValueError(f"term L{a}L{b}* is not supported on the last {theta.n - k} coordinates")
        num, sym = theta.exponent(full_p, _vsub(a, b))
        out[(a, b)] = v * theta.phase(num, sym, scale=2)
    return ToeplitzElement(theta, out)


class TorusElement:
    """Finite combination ``sum c_b v_b`` in the twisted group algebra of Z^n."""

    __slots__ = ("theta", "terms")

    def __init__(self, theta: ThetaMatrix, terms: Mapping[Vec, complex] | None = None):
        clean: dict[Vec, complex] = {}
        for b, c in (terms or {}).items():
            b = tuple(int(v) for v in b)
            if len(b) != theta.n:
                raise ValueError(f"key {b} does not have length {theta.n}")
            clean[b] = clean.get(b, 0) + complex(c)
        self.theta = theta
        self.terms = _pruned(clean)

    @classmethod
    def unitary(cls, theta: ThetaMatrix, b: Sequence[int], coeff: complex = 1) -> TorusElement:
        return cls(theta, {tuple(b): coeff})

    @classmethod
    def identity(cls, theta: ThetaMatrix) -> TorusElement:
        return cls.unitary(theta, (0,) * theta.n)

    def __add__(self, other: TorusElement) -> TorusElement:
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return TorusElement(self.theta, out)

    def __sub__(self, other: TorusElement) -> TorusElement:
        return self + TorusElement(other.theta, {k: -v for k, v in other.terms.items()})

    def __mul__(self, other):
        if isinstance(other, TorusElement):
            return torus_mul(self, other)
        return TorusElement(self.theta, {k: v * other for k, v in self.terms.items()})

    __rmul__ = __mul__

    def adjoint(self) -> TorusElement:
        return torus_adjoint(self)

    def coefficient(self, b: Sequence[int]) -> complex:
        return self.terms.get(tuple(b), 0j)

    def sorted_terms(self) -> list[tuple[Vec, complex]]:
        return sorted(self.terms.items())

    def distance(self, other: TorusElement) -> float:
        keys = set(self.terms) | set(other.terms)
        return max((abs(self.terms.get(k, 0) - other.terms.get(k, 0)) for k in keys), default=0.0)

    def __repr__(self) -> str:
        body = " + ".join(f"({v:.6g})v{b}" for b, v in self.sorted_terms())
        return f"TorusElement({body or '0'})"

    def to_json(self) -> list[dict]:
        return [{"b": list(b), "re": v.real, "im": v.imag} for b, v in self.sorted_terms()]

    @classmethod
    def from_json(cls, theta: ThetaMatrix, items: Iterable[Mapping]) -> TorusElement:
        terms: dict[Vec, complex] = {}
        for item in items:
            b = tuple(item["b"])
            terms[b] = terms.get(b, 0) + complex(item.get("re", 0.0), item.get("im", 0.0))
        return cls(theta, terms)


def torus_mul(x: TorusElement, y: TorusElement) -> TorusElement:
    if x.theta != y.theta:
        raise ValueError("elements live over different Theta matrices")
    theta = x.theta
    out: dict[Vec, complex] = {}
    for a, u in x.terms.items():
        for b, w in y.terms.items():
            key = _vadd(a, b)
            out[key] = out.get(key, 0) + u * w * theta.sigma(a, b)
    return TorusElement(theta, out)


def torus_adjoint(x: TorusElement) -> TorusElement:
    """(c v_b)^* = conj(c) v_{-b}."""
    return TorusElement(x.theta, {tuple(-v for v in b): c.conjugate() for b, c in x.terms.items()})


def quotient_pi(x: ToeplitzElement) -> TorusElement:
    """Image in the noncommutative torus: L_p L_q^* -> exp(pi i <p, Theta q>) v_{p-q}."""
    theta = x.theta
    out: dict[Vec, complex] = {}
    for (p, q), v in x.terms.items():
        b = _vsub(p, q)
        out[b] = out.get(b, 0) + v * theta.sigma(p, q).conjugate()
    return TorusElement(theta, out)


_Q_CACHE: dict[tuple[ThetaMatrix, int], ToeplitzElement] = {}


def _cached_q(k: int, theta: ThetaMatrix) -> ToeplitzElement:
    key = (theta, k)
    if key not in _Q_CACHE:
        _Q_CACHE[key] = defect_projection(k, theta)
    return _Q_CACHE[key]


def compress_corner(x: ToeplitzElement, k: int) -> ToeplitzElement:
    """Q X Q."""
    q = _cached_q(k, x.theta)
    return q * x * q


def corner_part(x: ToeplitzElement, k: int) -> ToeplitzElement:
    """Terms of Q X Q with no first-k component in either key.

    Equal to filtering ``compress_corner(x, k)``; products whose key would
    leave the corner are skipped before their phase is evaluated.
    """
    theta = x.theta
    left = _cached_q(k, theta) * x
    out: dict[Key, complex] = {}
    for (p, q), a in left.terms.items():
        if any(p[:k]):
            continue
        for (c, d), b in _cached_q(k, theta).terms.items():
            # first-k part of the product keys is p + (q v c - q) and d + (q v c - c)
            if any(cj > qj for qj, cj in zip(q[:k], c[:k])) or any(
                    dj or qj > cj for qj, cj, dj in zip(q[:k], c[:k], d[:k])):
                continue
            coeff, kp, kq = mono_mul((a, p, q), (b, c, d), theta)
            out[(kp, kq)] = out.get((kp, kq), 0) + coeff
    return ToeplitzElement._trusted(theta, out)


def word_element(theta: ThetaMatrix, word: Iterable[tuple[str, Sequence[int]]]) -> ToeplitzElement:
    """Wick-reduce a product of generators given as ``("L", p)`` or ``("L*", p)``."""
    out = ToeplitzElement.identity(theta)
    zero = (0,) * theta.n
    for kind, p in word:
        if kind == "L":
            g = ToeplitzElement.monomial(theta, p, zero)
        elif kind == "L*":
            g = ToeplitzElement.monomial(theta, zero, p)
        else:
            raise ValueError(f"unknown generator kind {kind!r}")
        out = out * g
    return out


def permute_element(x: ToeplitzElement, perm: Sequence[int], theta: ThetaMatrix) -> ToeplitzElement:
    """Re-express ``x`` in permuted coordinates (new coordinate i = old perm[i])."""
    return ToeplitzElement(theta, {(tuple(p[i] for i in perm), tuple(q[i] for i in perm)): v
                                   for (p, q), v in x.terms.items()})


def defect_projection_by_subsets(k: int, theta: ThetaMatrix) -> ToeplitzElement:
    """Q as the signed sum over subsets J of {1..k} of L_{e_J} L_{e_J}^*."""
    terms = {}
    for size in range(k + 1):
        for subset in itertools.combinations(range(k), size):
            e = tuple(1 if i in subset else 0 for i in range(theta.n))
            terms[(e, e)] = (-1) ** size
    return ToeplitzElement(theta, terms)
