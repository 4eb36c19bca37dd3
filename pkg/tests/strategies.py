"""Hypothesis strategies shared by the test modules."""

import math
from fractions import Fraction

from hypothesis import strategies as st

from toeplitz_kms.exact import ExactScalar, ThetaMatrix

BINDINGS = {"s1": math.sqrt(2) - 1, "s2": (math.sqrt(5) - 1) / 2}


@st.composite
def fractions(draw, max_den=6, bound=2):
    den = draw(st.integers(1, max_den))
    return Fraction(draw(st.integers(-bound * den, bound * den)), den)


@st.composite
def scalars(draw, symbolic=True):
    syms = {}
    if symbolic:
        for name in draw(st.lists(st.sampled_from(sorted(BINDINGS)), max_size=2, unique=True)):
            syms[name] = draw(fractions(max_den=3)) or Fraction(1)
    return ExactScalar(draw(fractions()), syms)


@st.composite
def thetas(draw, n=None, min_n=1, max_n=4, symbolic=True):
    n = draw(st.integers(min_n, max_n)) if n is None else n
    upper = {(i, j): draw(scalars(symbolic)) for i in range(n) for j in range(i + 1, n)}
    return ThetaMatrix.from_upper(n, upper, BINDINGS if symbolic else {})


def int_vectors(n, lo=-5, hi=5):
    return st.tuples(*[st.integers(lo, hi)] * n)


def nat_vectors(n, hi=3):
    return st.tuples(*[st.integers(0, hi)] * n)


@st.composite
def elements(draw, theta, max_terms=3, hi=2, first_zero=0):
    """Random ToeplitzElement over ``theta``; the first ``first_zero`` coordinates of keys vanish."""
    from toeplitz_kms.wick import ToeplitzElement

    n = theta.n
    terms = {}
    for _ in range(draw(st.integers(1, max_terms))):
        p = (0,) * first_zero + draw(nat_vectors(n - first_zero, hi))
        q = (0,) * first_zero + draw(nat_vectors(n - first_zero, hi))
        coeff = complex(draw(st.integers(-3, 3)), draw(st.integers(-3, 3))) / 2 or 1
        terms[(p, q)] = coeff
    return ToeplitzElement(theta, terms)
