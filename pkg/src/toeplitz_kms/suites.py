"""Seeded random fixtures and the verification suites run by ``verify``.

Each suite returns a JSON-ready dict with the largest residual seen, the
tolerance it was held to, and the first few failing fixtures for replay.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .exact import ExactScalar, ThetaMatrix
from .kms import Measure, StateSpec, kms_condition_residual, kms_series_oracle, kms_state_eval
from .config import theta_to_json
from .lattice import (AdaptedBasis, box_oracle, degeneracy_group, in_degeneracy_group)
from .rep import FockVector, apply_element, apply_word
from .wick import DynamicsSpec, ToeplitzElement, word_element

DENOMINATORS = (1, 2, 3, 4, 5, 6, 8)
SYMBOL_VALUES = {"s1": math.sqrt(2) - 1, "s2": (math.sqrt(5) - 1) / 2, "s3": math.pi - 3}
MAX_REPORTED_FAILURES = 5


def random_fraction(rng: random.Random, max_den: int | None = None) -> Fraction:
    den = rng.choice([d for d in DENOMINATORS if max_den is None or d <= max_den])
    return Fraction(rng.randint(-2 * den, 2 * den), den)


def random_theta(rng: random.Random, n: int, symbolic: bool | None = None) -> ThetaMatrix:
    """Random antisymmetric matrix; with ``symbolic`` some entries get irrational parts."""
    symbolic = rng.random() < 0.5 if symbolic is None else symbolic
    names = sorted(SYMBOL_VALUES)
    upper = {}
    for i in range(n):
        for j in range(i + 1, n):
            roll = rng.random()
            if roll < 0.2:
                continue
            syms = {}
            if symbolic and roll > 0.6:
                syms[rng.choice(names)] = Fraction(rng.randint(1, 3), rng.choice((1, 2, 3)))
            upper[(i, j)] = ExactScalar(random_fraction(rng), syms)
    bindings = {k: v for k, v in SYMBOL_VALUES.items()} if symbolic else {}
    return ThetaMatrix.from_upper(n, upper, bindings)


def random_vector(rng: random.Random, n: int, hi: int) -> tuple[int, ...]:
    return tuple(rng.randint(0, hi) for _ in range(n))


def random_word(rng: random.Random, n: int, max_len: int = 6, hi: int = 3):
    return [(rng.choice(("L", "L*")), random_vector(rng, n, hi)) for _ in range(rng.randint(1, max_len))]


def random_measure(rng: random.Random, m: int) -> Measure:
    count = rng.randint(1, 3)
    raw = [rng.random() + 0.1 for _ in range(count)]
    total = math.fsum(raw)
    weights = [w / total for w in raw]
    weights[-1] = 1.0 - math.fsum(weights[:-1])
    return Measure(tuple((w, tuple(rng.random() for _ in range(m))) for w in weights))


@dataclass(frozen=True)
class StateFixture:
    theta: ThetaMatrix
    spec: StateSpec

    def to_json(self) -> dict:
        return {**theta_to_json(self.theta), "beta": self.spec.beta, "r": list(self.spec.dynamics.r),
                "measure": self.spec.measure.to_json(), "basis": self.spec.basis.to_json()}


def random_state(rng: random.Random, n: int | None = None, k: int | None = None,
                 beta_range: tuple[float, float] = (0.2, 5.0)) -> StateFixture:
    n = rng.randint(1, 4) if n is None else n
    k = rng.randint(1, n) if k is None else k
    theta = random_theta(rng, n)
    r = [round(rng.uniform(0.3, 2.0), 3) for _ in range(k)] + [0.0] * (n - k)
    dyn = DynamicsSpec(tuple(r), k)
    basis = degeneracy_group(theta.restrict(range(k, n)))
    beta = rng.uniform(*beta_range)
    return StateFixture(theta, StateSpec(beta, dyn, random_measure(rng, basis.m), basis))


def random_lattice_vector(rng: random.Random, basis: AdaptedBasis, spread: int = 1) -> tuple[int, ...]:
    w = [0] * basis.d
    for g in basis.generators():
        c = rng.randint(-spread, spread)
        w = [a + c * b for a, b in zip(w, g)]
    return tuple(w)


def relevant_monomial(rng: random.Random, fx: StateFixture, hi: int = 3) -> ToeplitzElement:
    """Monomial L_P L_Q^* that the state is likely not to kill.

    With high probability P and Q agree on the first k coordinates and
    their last-d parts differ by an element of the degeneracy group.
    """
    n, k = fx.theta.n, fx.spec.dynamics.k
    P = list(random_vector(rng, n, hi))
    Q = list(random_vector(rng, n, hi))
    if rng.random() < 0.8:
        Q[:k] = P[:k]
    if rng.random() < 0.8 and fx.spec.basis.m:
        w = random_lattice_vector(rng, fx.spec.basis)
        Q[k:] = [a - b for a, b in zip(P[k:], w)]
        shift = max([0] + [-v for v in Q[k:]])
        P[k:] = [v + shift for v in P[k:]]
        Q[k:] = [v + shift for v in Q[k:]]
    return ToeplitzElement.monomial(fx.theta, P, Q)


def kms_pair(rng: random.Random, fx: StateFixture, hi: int = 3) -> tuple[ToeplitzElement, ToeplitzElement]:
    """Monomials A, B with AB and BA frequently outside the kernel of the state."""
    n, k = fx.theta.n, fx.spec.dynamics.k
    a, b, c = (list(random_vector(rng, n, hi)) for _ in range(3))
    if rng.random() < 0.8:
        w = [0] * k + list(random_lattice_vector(rng, fx.spec.basis)) if fx.spec.basis.m else [0] * n
        d = [a_ - b_ + c_ - w_ for a_, b_, c_, w_ in zip(a, b, c, w)]
        shift = max([0] + [-v for v in d])
        c = [v + shift for v in c]
        d = [v + shift for v in d]
    else:
        d = list(random_vector(rng, n, hi))
    return (ToeplitzElement.monomial(fx.theta, a, b), ToeplitzElement.monomial(fx.theta, c, d))


def _report(name: str, seed: int, trials: int, tol: float, residual: float, failures: list) -> dict:
    return {"suite": name, "seed": seed, "trials": trials, "tolerance": tol,
            "max_residual": residual, "passed": not failures,
            "failures": failures[:MAX_REPORTED_FAILURES], "failure_count": len(failures)}


def suite_cocycle(seed: int, trials: int = 500) -> dict:
    rng = random.Random(f"cocycle:{seed}")
    tol = 1e-12
    worst = 0.0
    failures = []
    for _ in range(trials):
        n = rng.randint(1, 5)
        theta = random_theta(rng, n)
        x, x2, y, z = (tuple(rng.randint(-5, 5) for _ in range(n)) for _ in range(4))
        s = theta.sigma
        add = lambda u, v: tuple(a + b for a, b in zip(u, v))  # noqa: E731
        res = max(
            abs(s(add(x, x2), y) - s(x, y) * s(x2, y)),
            abs(s(y, add(x, x2)) - s(y, x) * s(y, x2)),
            abs(s(x, y) * s(add(x, y), z) - s(x, add(y, z)) * s(y, z)),
            abs(s(x, y) - s(y, x).conjugate()),
            abs(s(x, x) - 1),
        )
        worst = max(worst, res)
        if res > tol:
            failures.append({**theta_to_json(theta), "vectors": [x, x2, y, z], "residual": res})
    return _report("cocycle", seed, trials, tol, worst, failures)


def suite_wick_oracle(seed: int, trials: int = 1000) -> dict:
    rng = random.Random(f"wick-oracle:{seed}")
    tol = 1e-12
    worst = 0.0
    failures = []
    for _ in range(trials):
        n = rng.randint(1, 4)
        theta = random_theta(rng, n)
        word = random_word(rng, n)
        reduced = word_element(theta, word)
        res = 0.0
        for _ in range(2):
            m = random_vector(rng, n, 6)
            res = max(res, apply_element(reduced, FockVector.basis(m)).distance(
                apply_word(word, FockVector.basis(m), theta)))
        worst = max(worst, res)
        if res > tol:
            failures.append({**theta_to_json(theta), "word": word, "residual": res})
    return _report("wick-oracle", seed, trials, tol, worst, failures)


def suite_lattice_box(seed: int, trials: int = 40, radius: int = 4) -> dict:
    """Disagreements between the adapted basis and direct integrality tests in a box."""
    rng = random.Random(f"lattice-box:{seed}")
    worst = 0
    failures = []
    for _ in range(trials):
        d = rng.randint(1, 3)
        theta = random_theta(rng, d)
        basis = degeneracy_group(theta)

        def member(x, theta=theta):
            return in_degeneracy_group(theta, x)

        problems = []
        try:
            basis.check(member)
        except AssertionError as exc:
            problems.append(str(exc))
        if theta.is_rational and basis.m != d:
            problems.append("rational block with m < d")
        bad = box_oracle(basis, member, radius)
        worst = max(worst, len(bad) + len(problems))
        if bad or problems:
            failures.append({**theta_to_json(theta), "basis": basis.to_json(),
                             "disagreements": bad[:10], "problems": problems})
    return _report("lattice-box", seed, trials, 0, worst, failures)


def suite_kms_residual(seed: int, trials: int = 500) -> dict:
    rng = random.Random(f"kms-residual:{seed}")
    tol = 1e-9
    worst = 0.0
    failures = []
    fx = None
    for t in range(trials):
        if t % 10 == 0:
            fx = random_state(rng)
        a, b = kms_pair(rng, fx)
        res = kms_condition_residual(a, b, fx.spec)
        worst = max(worst, res)
        if res > tol:
            failures.append({**fx.to_json(), "A": a.to_json(), "B": b.to_json(), "residual": res})
    return _report("kms-residual", seed, trials, tol, worst, failures)


def suite_euler_series(seed: int, trials: int = 200, cutoff: int = 40) -> dict:
    """Closed form against the truncated reconstruction series; residual is the excess over the tail bound."""
    rng = random.Random(f"euler-series:{seed}")
    tol = 1e-9
    worst = -math.inf
    failures = []
    for _ in range(trials):
        k = 2 if rng.random() < 0.3 else 1
        fx = random_state(rng, n=rng.randint(k, 4), k=k)
        x = relevant_monomial(rng, fx)
        closed = kms_state_eval(x, fx.spec)
        rep = kms_series_oracle(x, fx.spec, cutoff=cutoff)
        excess = abs(closed - rep.value) - rep.tail_bound
        worst = max(worst, excess)
        if excess > tol:
            failures.append({**fx.to_json(), "element": x.to_json(), "closed": [closed.real, closed.imag],
                             "series": [rep.value.real, rep.value.imag], "tail_bound": rep.tail_bound})
    return _report("euler-series", seed, trials, tol, worst, failures)


SUITES: dict[str, tuple[Callable[..., dict], int]] = {
    "cocycle": (suite_cocycle, 500),
    "wick-oracle": (suite_wick_oracle, 1000),
    "lattice-box": (suite_lattice_box, 40),
    "kms-residual": (suite_kms_residual, 500),
    "euler-series": (suite_euler_series, 200),
}


def run_suites(name: str, seed: int = 0, trials: int | None = None, cutoff: int = 40) -> dict:
    names = list(SUITES) if name == "all" else [name]
    if any(s not in SUITES for s in names):
        raise ValueError(f"unknown suite {name!r}")
    reports = []
    for s in names:
        fn, default = SUITES[s]
        kwargs = {"cutoff": cutoff} if s == "euler-series" else {}
        reports.append(fn(seed, default if trials is None else trials, **kwargs))
    return {"seed": seed, "passed": all(r["passed"] for r in reports), "suites": reports}
