"""Equilibrium states of the Toeplitz noncommutative torus under the dynamics
alpha^r: closed-form KMS_beta states, the reconstruction series used as their
oracle, traces coming from the centre, ground states, the beta -> 0+ limit
and the alpha-invariant traces.

Conventions: n = k + d, the first k coordinates carry positive r, and a key
P in N^n splits as P = p + x with p on the first k and x on the last d
coordinates.  Traces on the d-block are parametrised by a probability
measure on T^m, m the rank of the degeneracy group H of Theta_d.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .exact import ThetaMatrix, unit_phase, unit_vector
from .lattice import AdaptedBasis, h_membership, invariant_lattice
from .wick import (DynamicsSpec, ToeplitzElement, TorusElement, apply_dynamics,
                   compress_corner, corner_part, quotient_pi, torus_mul)


@dataclass(frozen=True)
class Measure:
    """Finite atomic probability measure on T^m; angles are in [0, 1)."""

    atoms: tuple[tuple[float, tuple[float, ...]], ...]

    def __post_init__(self):
        atoms = tuple((float(w), tuple(float(a) for a in ang)) for w, ang in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        if not atoms:
            raise ValueError("measure needs at least one atom")
        if any(w <= 0 for w, _ in atoms):
            raise ValueError("atom weights must be positive")
        if abs(sum(w for w, _ in atoms) - 1.0) > 1e-12:
            raise ValueError("atom weights must sum to 1")
        dims = {len(ang) for _, ang in atoms}
        if len(dims) != 1:
            raise ValueError("atoms have different dimensions")
        if any(not 0.0 <= a < 1.0 for _, ang in atoms for a in ang):
            raise ValueError("angles must lie in [0, 1)")

    @classmethod
    def point(cls, angles: Sequence[float] = ()) -> Measure:
        return cls(((1.0, tuple(angles)),))

    @property
    def dim(self) -> int:
        return len(self.atoms[0][1])

    def character(self, c: Sequence[int]) -> complex:
        """Integral of z^c."""
        if len(c) != self.dim:
            raise ValueError(f"exponent of length {len(c)} for a measure on T^{self.dim}")
        total = 0j
        for w, ang in self.atoms:
            total += w * unit_phase(math.fsum(a * ci for a, ci in zip(ang, c)) % 1.0)
        return total

    def to_json(self) -> list[dict]:
        return [{"weight": w, "angles": list(a)} for w, a in self.atoms]


@dataclass(frozen=True)
class StateSpec:
    beta: float
    dynamics: DynamicsSpec
    measure: Measure
    basis: AdaptedBasis

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        if self.measure.dim != self.basis.m:
            raise ValueError(f"measure lives on T^{self.measure.dim}, basis has m={self.basis.m}")
        if self.basis.d != self.dynamics.d:
            raise ValueError("basis dimension differs from the number of zero coordinates of r")


@dataclass(frozen=True)
class EvalReport:
    value: complex
    method: str
    tail_bound: float | None = None

    def __post_init__(self):
        if (self.method == "series") != (self.tail_bound is not None):
            raise ValueError("a tail bound is reported exactly for series evaluations")


def partition_Z(beta: float, r: Sequence[float]) -> float:
    """prod_j 1 / (1 - exp(-beta r_j)) over the positive coordinates of r."""
    if not beta > 0:
        raise ValueError("no KMS_beta states for beta <= 0")
    z = 1.0
    for rj in r:
        if rj > 0:
            z /= -math.expm1(-beta * rj)
    return z


@lru_cache(maxsize=1024)
def _split(theta: ThetaMatrix, k: int) -> ThetaMatrix:
    return theta.restrict(range(k, theta.n))


def euler_factor(j: int, p_j: int, beta: float, r: Sequence[float], theta: ThetaMatrix,
                 w: Sequence[int]) -> complex:
    """e^{-beta r_j p_j}(1 - e^{-beta r_j}) / (1 - e^{-beta r_j} e^{2 pi i <Theta w, e_j>}), j 0-based."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    decay = -beta * r[j]
    head = math.exp(decay * p_j)
    s = theta.pairing(unit_vector(theta.n, j), tuple(w))
    if s.is_integer():
        return complex(head)
    num, sym = theta.exponent(unit_vector(theta.n, j), tuple(w))
    rot = theta.phase(num, sym, scale=-2)
    a = math.exp(decay)
    return head * -math.expm1(decay) / (1 - a * rot)


@lru_cache(maxsize=65536)
def _center_phase(theta_d: ThetaMatrix, basis: AdaptedBasis, w: tuple[int, ...]):
    """(c, conj(mu)) where prod_i v_{c_i a_i p_i} = mu v_w, or None if w is not in the lattice."""
    c = h_membership(w, basis)
    if c is None:
        return None
    prod = TorusElement.identity(theta_d)
    for ci, g in zip(c, basis.generators()):
        prod = torus_mul(prod, TorusElement.unitary(theta_d, tuple(ci * v for v in g)))
    mu = prod.coefficient(w)
    return c, mu.conjugate()


def lambda_sign(x: Sequence[int], y: Sequence[int], basis: AdaptedBasis, theta_d: ThetaMatrix) -> complex:
    """Sign relating tau(L_x L_y^*) to z^c, from products in the torus algebra."""
    w = tuple(a - b for a, b in zip(x, y))
    found = _center_phase(theta_d, basis, w)
    if found is None:
        raise ValueError(f"{w} is not in the degeneracy group")
    lam = theta_d.sigma(tuple(x), tuple(y)).conjugate() * found[1]
    if min(abs(lam - 1), abs(lam + 1)) > 1e-10:
        raise AssertionError(f"lambda={lam} is not a sign")
    return complex(round(lam.real))


def lambda_sign_product_formula(x: Sequence[int], y: Sequence[int], basis: AdaptedBasis,
                                theta_d: ThetaMatrix) -> complex:
    """Same sign as a telescoping product of pairings, with no torus multiplication."""
    w = tuple(a - b for a, b in zip(x, y))
    c = h_membership(w, basis)
    if c is None:
        raise ValueError(f"{w} is not in the degeneracy group")
    gens = [tuple(ci * v for v in g) for ci, g in zip(c, basis.generators())]
    value = theta_d.sigma(tuple(x), tuple(y)).conjugate()
    partial = [0] * len(w)
    for g in gens[:-1]:
        partial = [s + v for s, v in zip(partial, g)]
        rest = tuple(a - b for a, b in zip(w, partial))
        value *= theta_d.sigma(rest, g)
    return value


def _support_d(b: Sequence[int], k: int) -> tuple[int, ...]:
    if any(b[:k]):
        raise ValueError(f"{tuple(b)} is not supported on the last {len(b) - k} coordinates")
    return tuple(b[k:])


def trace_tau(x: TorusElement, measure: Measure, basis: AdaptedBasis,
              theta_d: ThetaMatrix | None = None) -> complex:
    """Trace on the d-block torus: v_b -> [b in H] conj(mu_b) E[z^c].

    ``x`` may live over Theta_d itself or over the full Theta, supported on 0_k x Z^d.
    """
    k = x.theta.n - basis.d
    if k < 0:
        raise ValueError("element dimension smaller than the basis dimension")
    theta_d = _split(x.theta, k) if theta_d is None else theta_d
    total = 0j
    for b, coeff in x.sorted_terms():
        found = _center_phase(theta_d, basis, _support_d(b, k))
        if found is not None:
            total += coeff * found[1] * measure.character(found[0])
    return total


def toeplitz_trace_monomial(x: Sequence[int], y: Sequence[int], measure: Measure,
                            basis: AdaptedBasis, theta_d: ThetaMatrix) -> complex:
    """tau(L_x L_y^*) on the d-block, through the quotient map."""
    w = tuple(a - b for a, b in zip(x, y))
    found = _center_phase(theta_d, basis, w)
    if found is None:
        return 0j
    return theta_d.sigma(tuple(x), tuple(y)).conjugate() * found[1] * measure.character(found[0])


def corner_state(x: ToeplitzElement, k: int, measure: Measure, basis: AdaptedBasis) -> complex:
    """State on Q T Q read off the terms with no first-k part, through tau."""
    theta_d = _split(x.theta, k)
    total = 0j
    for (p, q), coeff in x.sorted_terms():
        if any(p[:k]) or any(q[:k]):
            continue
        total += coeff * toeplitz_trace_monomial(p[k:], q[k:], measure, basis, theta_d)
    return total


def _kms_monomial(P: tuple[int, ...], Q: tuple[int, ...], spec: StateSpec, theta: ThetaMatrix,
                  theta_d: ThetaMatrix) -> complex:
    k = spec.dynamics.k
    if P[:k] != Q[:k]:
        return 0j
    p = P[:k] + (0,) * (theta.n - k)
    w_full = (0,) * k + tuple(a - b for a, b in zip(P[k:], Q[k:]))
    tau = toeplitz_trace_monomial(P[k:], Q[k:], spec.measure, spec.basis, theta_d)
    if tau == 0:
        return 0j
    # L_{p+x} L_{p+y}^* = exp(pi i <p, Theta w>) L_p L_x L_y^* L_p^*
    value = tau * theta.sigma(p, w_full).conjugate()
    for j in range(k):
        value *= euler_factor(j, P[j], spec.beta, spec.dynamics.r, theta, w_full)
    return value


def kms_state_eval(x: ToeplitzElement, spec: StateSpec, theta: ThetaMatrix | None = None) -> complex:
    """Closed-form KMS_beta state: Euler product over the positive directions times a trace on the d-block."""
    theta = x.theta if theta is None else theta
    if theta.n != spec.dynamics.n:
        raise ValueError("element and dynamics have different dimensions")
    theta_d = _split(theta, spec.dynamics.k)
    return sum((c * _kms_monomial(P, Q, spec, theta, theta_d) for (P, Q), c in x.sorted_terms()), 0j)


def series_tail_bound(x: ToeplitzElement, beta: float, r: Sequence[float], cutoff: int) -> float:
    """Weight outside {0..cutoff}^k, times the coefficient 1-norm."""
    inside = 1.0
    for rj in r:
        if rj > 0:
            inside *= -math.expm1(-beta * rj * (cutoff + 1))
    return x.norm1() * (1.0 - inside)


def kms_series_oracle(x: ToeplitzElement, spec: StateSpec, theta: ThetaMatrix | None = None,
                      cutoff: int = 40) -> EvalReport:
    """Z^{-1} sum_l e^{-beta <l, r>} omega(Q L_l^* X L_l Q), l in {0..cutoff}^k."""
    theta = x.theta if theta is None else theta
    if cutoff < 1:
        raise ValueError("cutoff must be at least 1")
    dyn = spec.dynamics
    k, n = dyn.k, theta.n
    zero = (0,) * n
    total = 0j
    for l in itertools.product(range(cutoff + 1), repeat=k):
        lv = tuple(l) + (0,) * (n - k)
        weight = math.exp(-spec.beta * dyn.energy(lv))
        shifted = ToeplitzElement.monomial(theta, zero, lv) * x * ToeplitzElement.monomial(theta, lv, zero)
        total += weight * corner_state(corner_part(shifted, k), k, spec.measure, spec.basis)
    total /= partition_Z(spec.beta, dyn.r)
    return EvalReport(total, "series", series_tail_bound(x, spec.beta, dyn.r, cutoff))


def ground_state_eval(x: ToeplitzElement, measure: Measure, k: int, basis: AdaptedBasis,
                      theta: ThetaMatrix | None = None) -> complex:
    """omega(Q X Q) for the trace given by ``measure`` on the d-block."""
    theta = x.theta if theta is None else theta
    return corner_state(compress_corner(x, k), k, measure, basis)


def kms_zero_plus_eval(x: ToeplitzElement, measure: Measure, dynamics: DynamicsSpec,
                       basis: AdaptedBasis, theta: ThetaMatrix | None = None) -> complex:
    """beta -> 0+ limit of the KMS_beta states: the Euler factors become integrality indicators."""
    theta = x.theta if theta is None else theta
    k = dynamics.k
    theta_d = _split(theta, k)
    total = 0j
    for (P, Q), c in x.sorted_terms():
        if P[:k] != Q[:k]:
            continue
        w_full = (0,) * k + tuple(a - b for a, b in zip(P[k:], Q[k:]))
        if not all(theta.pairing(unit_vector(theta.n, j), w_full).is_integer() for j in range(k)):
            continue
        p = P[:k] + (0,) * (theta.n - k)
        tau = toeplitz_trace_monomial(P[k:], Q[k:], measure, basis, theta_d)
        total += c * tau * theta.sigma(p, w_full).conjugate()
    return total


def kms_zero_eval(x: ToeplitzElement, angles: Sequence[float] | Measure, r: Sequence,
                  basis: AdaptedBasis | None = None, theta: ThetaMatrix | None = None) -> complex:
    """alpha-invariant trace: pi(X), keep v_w with w in H_n^r, evaluate the centre at ``angles``."""
    theta = x.theta if theta is None else theta
    basis = invariant_lattice(theta, r) if basis is None else basis
    measure = angles if isinstance(angles, Measure) else Measure.point(tuple(angles))
    if measure.dim != basis.m:
        raise ValueError(f"need {basis.m} angles for the invariant lattice")
    return trace_tau(quotient_pi(x), measure, basis, theta)


def kms_condition_residual(a: ToeplitzElement, b: ToeplitzElement, spec: StateSpec,
                           theta: ThetaMatrix | None = None) -> float:
    """|phi(AB) - phi(B alpha_{i beta}(A))|."""
    lhs = kms_state_eval(a * b, spec, theta)
    rhs = kms_state_eval(b * apply_dynamics(a, spec.dynamics, 1j * spec.beta), spec, theta)
    return abs(lhs - rhs)


@dataclass(frozen=True)
class ScanRow:
    beta: float
    element_id: str
    value: complex
    method: str
    tail_bound: float | None


def phase_scan(betas: Sequence[float], elements: Iterable[tuple[str, ToeplitzElement]],
               template: StateSpec, method: str = "closed-form", cutoff: int = 40) -> list[ScanRow]:
    """One evaluation per (beta, element), rows ordered by beta then element order."""
    betas = list(betas)
    if not betas:
        raise ValueError("empty beta grid")
    if any(b <= 0 for b in betas) or any(b2 <= b1 for b1, b2 in zip(betas, betas[1:])):
        raise ValueError("beta grid must be positive and strictly ascending")
    if method not in ("closed-form", "series"):
        raise ValueError(f"unknown method {method!r}")
    elements = list(elements)
    rows = []
    for beta in betas:
        spec = StateSpec(beta, template.dynamics, template.measure, template.basis)
        for name, x in elements:
            if method == "series":
                rep = kms_series_oracle(x, spec, cutoff=cutoff)
            else:
                rep = EvalReport(kms_state_eval(x, spec), "closed-form")
            rows.append(ScanRow(beta, name, rep.value, rep.method, rep.tail_bound))
    return rows


def _g17(v: float) -> str:
    return "%.17g" % v


def scan_csv(rows: Iterable[ScanRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["beta", "element_id", "re", "im", "method", "tail_bound"])
    for row in rows:
        writer.writerow([_g17(row.beta), row.element_id, _g17(row.value.real), _g17(row.value.imag),
                         row.method, "" if row.tail_bound is None else _g17(row.tail_bound)])
    return buf.getvalue()
