import cmath
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import elements, nat_vectors, thetas
from toeplitz_kms.exact import ThetaMatrix, unit_vector
from toeplitz_kms.rep import FockVector, apply_element
from toeplitz_kms.wick import (DynamicsSpec, ToeplitzElement, TorusElement, apply_dynamics, compress_corner,
                               corner_part, defect_projection, defect_projection_by_subsets,
                               gauge_expectation_k, mono_mul, mul, quotient_pi, rho_automorphism,
                               torus_adjoint, torus_mul, word_element)

E1, E2 = (1, 0), (0, 1)


def mono(theta, p, q=None, c=1):
    return ToeplitzElement.monomial(theta, p, q, c)


def box_distance(x, y, radius):
    """Largest difference of the two elements acting on basis vectors in a box."""
    worst = 0.0
    for m in __import__("itertools").product(range(radius + 1), repeat=x.n):
        v = FockVector.basis(m)
        worst = max(worst, apply_element(x, v).distance(apply_element(y, v)))
    return worst


def test_adjoint_generator_commutation(half_block):
    coeff, p, q = mono_mul((1, (0, 0), E1), (1, E2, (0, 0)), half_block)
    assert (p, q) == (E2, E1)
    assert coeff == pytest.approx(cmath.exp(2j * math.pi * 0.5), abs=1e-15)


@given(thetas(), st.data())
def test_isometry_relation(theta, data):
    p = data.draw(nat_vectors(theta.n))
    prod = mono(theta, (0,) * theta.n, p) * mono(theta, p)
    assert prod.distance(ToeplitzElement.identity(theta)) < 1e-15


def test_nica_covariance(half_block):
    prod = mono(half_block, E1, E1) * mono(half_block, E2, E2)
    assert prod.distance(mono(half_block, (1, 1), (1, 1))) < 1e-15


def test_isometries_multiply_with_cocycle(mixed_theta):
    e1, e2 = unit_vector(4, 0), unit_vector(4, 1)
    prod = mono(mixed_theta, e1) * mono(mixed_theta, e2)
    expected = mono(mixed_theta, (1, 1, 0, 0), None, mixed_theta.sigma(e1, e2))
    assert prod.distance(expected) < 1e-15


@given(thetas(max_n=3), st.data())
def test_adjoint_and_identity(theta, data):
    x = data.draw(elements(theta))
    assert x.adjoint().adjoint().distance(x) == 0
    assert mul(x, ToeplitzElement.identity(theta)).distance(x) < 1e-15
    assert mul(ToeplitzElement.identity(theta), x).distance(x) < 1e-15


@settings(max_examples=60)
@given(thetas(max_n=3), st.data())
def test_associativity_and_star(theta, data):
    x, y, z = (data.draw(elements(theta)) for _ in range(3))
    assert ((x * y) * z).distance(x * (y * z)) < 1e-11
    assert (x * y).adjoint().distance(y.adjoint() * x.adjoint()) < 1e-12


@settings(max_examples=60)
@given(thetas(max_n=4), st.data())
def test_product_matches_representation(theta, data):
    n = theta.n
    a = mono(theta, data.draw(nat_vectors(n)), data.draw(nat_vectors(n)))
    b = mono(theta, data.draw(nat_vectors(n)), data.draw(nat_vectors(n)))
    m = FockVector.basis(data.draw(nat_vectors(n, 6)))
    assert apply_element(a * b, m).distance(apply_element(a, apply_element(b, m))) < 1e-12


def test_defect_projection_small_cases(mixed_theta):
    theta = mixed_theta
    one = ToeplitzElement.identity(theta)
    e1, e2 = unit_vector(4, 0), unit_vector(4, 1)
    assert defect_projection(0, theta).distance(one) == 0
    assert defect_projection(1, theta).distance(one - mono(theta, e1, e1)) < 1e-15
    q2 = one - mono(theta, e1, e1) - mono(theta, e2, e2) + mono(theta, (1, 1, 0, 0), (1, 1, 0, 0))
    assert defect_projection(2, theta).distance(q2) < 1e-15
    with pytest.raises(ValueError):
        defect_projection(5, theta)


@pytest.mark.parametrize("k", [0, 1, 2, 3, 4])
def test_defect_projection_is_projection(mixed_theta, k):
    q = defect_projection(k, mixed_theta)
    assert (q * q).distance(q) < 1e-12
    assert q.adjoint().distance(q) < 1e-12
    assert q.distance(defect_projection_by_subsets(k, mixed_theta)) < 1e-12


def test_gauge_expectation_examples():
    theta = ThetaMatrix.zero(2)
    assert gauge_expectation_k(mono(theta, E1), 1).terms == {}
    assert gauge_expectation_k(mono(theta, E2), 1).distance(mono(theta, E2)) == 0


@given(thetas(max_n=3), st.data())
def test_gauge_expectation_idempotent_contractive(theta, data):
    x = data.draw(elements(theta))
    k = data.draw(st.integers(0, theta.n))
    ex = gauge_expectation_k(x, k)
    assert gauge_expectation_k(ex, k).distance(ex) == 0
    assert ex.sup_norm() <= x.sup_norm()


def test_apply_dynamics_examples():
    theta = ThetaMatrix.zero(2)
    spec = DynamicsSpec((1.0, 0.0), 1)
    assert apply_dynamics(mono(theta, E1), spec, math.pi).coefficient(E1, (0, 0)) == pytest.approx(-1)
    fixed = mono(theta, (2, 1), (2, 1), 0.5)
    assert apply_dynamics(fixed, spec, 1.7 + 0.3j).distance(fixed) == 0
    beta = 0.8
    assert apply_dynamics(mono(theta, E1), spec, 1j * beta).coefficient(E1, (0, 0)) == pytest.approx(
        math.exp(-beta))


@given(thetas(max_n=3), st.data())
def test_real_time_dynamics_preserves_moduli(theta, data):
    x = data.draw(elements(theta))
    r = [data.draw(st.floats(0.1, 3)) for _ in range(theta.n)]
    t = data.draw(st.floats(-10, 10))
    moved = apply_dynamics(x, r, t)
    for key, v in x.terms.items():
        assert abs(moved.terms[key]) == pytest.approx(abs(v))


def test_dynamics_spec_sorts_positive_first():
    spec = DynamicsSpec.from_vector(["0", "3/2", "0", "1"])
    assert spec.perm == (1, 3, 0, 2)
    assert spec.k == 2
    assert spec.exact == (Fraction(3, 2), Fraction(1), Fraction(0), Fraction(0))
    assert DynamicsSpec.from_vector([0.5, 0.0]).exact is None
    with pytest.raises(ValueError):
        DynamicsSpec.from_vector(["-1", "1"])
    with pytest.raises(ValueError):
        DynamicsSpec((0.0, 1.0), 1)


def test_rho_examples(mixed_theta):
    x = mono(mixed_theta, (0, 0, 1, 2), (0, 0, 2, 0))
    assert rho_automorphism(x, (0, 0)).distance(x) == 0
    lx = mono(mixed_theta, (0, 0, 1, 2))
    p = (1, 2)
    expected = cmath.exp(-2j * math.pi * mixed_theta.pairing((1, 2, 0, 0), (0, 0, 1, 2)).evaluate({"t": math.sqrt(2)}))
    assert rho_automorphism(lx, p).coefficient((0, 0, 1, 2), (0, 0, 0, 0)) == pytest.approx(expected, abs=1e-12)
    with pytest.raises(ValueError):
        rho_automorphism(mono(mixed_theta, (1, 0, 0, 0)), p)


@settings(max_examples=50)
@given(thetas(n=4), st.data())
def test_rho_is_a_semigroup_of_homomorphisms(theta, data):
    k = 2
    x = data.draw(elements(theta, first_zero=k))
    y = data.draw(elements(theta, first_zero=k))
    p, p2 = data.draw(nat_vectors(k)), data.draw(nat_vectors(k))
    rho = rho_automorphism
    assert rho(x * y, p).distance(rho(x, p) * rho(y, p)) < 1e-12
    assert rho(rho(x, p2), p).distance(rho(x, tuple(a + b for a, b in zip(p, p2)))) < 1e-12


def test_quotient_examples(half_block):
    v0 = TorusElement.identity(half_block)
    assert quotient_pi(ToeplitzElement.identity(half_block)).distance(v0) == 0
    assert quotient_pi(mono(half_block, (2, 1), (2, 1))).distance(v0) < 1e-15
    image = quotient_pi(mono(half_block, E1, E2))
    expected = TorusElement.unitary(half_block, (1, -1), cmath.exp(1j * math.pi / 2))
    assert image.distance(expected) < 1e-15
    # same value through the torus product v_{e1} v_{e2}^*
    via_torus = torus_mul(TorusElement.unitary(half_block, E1),
                          torus_adjoint(TorusElement.unitary(half_block, E2)))
    assert image.distance(via_torus) < 1e-15


@settings(max_examples=60)
@given(thetas(max_n=3), st.data())
def test_quotient_is_star_homomorphism(theta, data):
    x, y = data.draw(elements(theta)), data.draw(elements(theta))
    assert quotient_pi(x * y).distance(torus_mul(quotient_pi(x), quotient_pi(y))) < 1e-12
    assert quotient_pi(x.adjoint()).distance(torus_adjoint(quotient_pi(x))) < 1e-12
    j = data.draw(st.integers(0, theta.n - 1))
    e = unit_vector(theta.n, j)
    defect = ToeplitzElement.identity(theta) - mono(theta, e, e)
    assert quotient_pi(defect).terms == {}


def test_torus_examples(half_block):
    v = lambda b: TorusElement.unitary(half_block, b)  # noqa: E731
    assert torus_mul(v(E1), v(E1)).distance(v((2, 0))) == 0
    ab = torus_mul(v(E1), v(E2)).coefficient((1, 1))
    ba = torus_mul(v(E2), v(E1)).coefficient((1, 1))
    assert ab / ba == pytest.approx(cmath.exp(-2j * math.pi * 0.5))
    b = (3, -2)
    assert torus_mul(torus_adjoint(v(b)), v(b)).distance(TorusElement.identity(half_block)) < 1e-15
    assert torus_mul(v(b), torus_adjoint(v(b))).distance(TorusElement.identity(half_block)) < 1e-15


@given(thetas(max_n=3), st.data())
def test_torus_associative(theta, data):
    def rand():
        return TorusElement(theta, {tuple(data.draw(st.integers(-2, 2)) for _ in range(theta.n)): 1})
    a, b, c = rand(), rand(), rand()
    assert torus_mul(torus_mul(a, b), c).distance(torus_mul(a, torus_mul(b, c))) < 1e-12


def test_compress_corner_examples(mixed_theta):
    theta = mixed_theta
    assert compress_corner(mono(theta, unit_vector(4, 0)), 1).terms == {}
    q = defect_projection(2, theta)
    assert compress_corner(ToeplitzElement.identity(theta), 2).distance(q) < 1e-15
    lx = mono(theta, (0, 0, 1, 1))
    squeezed = compress_corner(lx, 2)
    assert squeezed.terms
    assert squeezed.distance(lx * q) < 1e-12


@settings(max_examples=40)
@given(thetas(n=3), st.data())
def test_corner_commutation_and_filter(theta, data):
    k = 1
    x = data.draw(elements(theta, max_terms=1, first_zero=k))
    q = defect_projection(k, theta)
    assert (q * x * q).distance(x * q) < 1e-12
    y = data.draw(elements(theta))
    full = compress_corner(y, k)
    kept = {key: v for key, v in full.terms.items() if not any(key[0][:k]) and not any(key[1][:k])}
    assert corner_part(y, k).distance(ToeplitzElement(theta, kept)) < 1e-12


def test_words_match_products(half_block):
    word = [("L*", E1), ("L", E2), ("L", E1)]
    direct = mono(half_block, (0, 0), E1) * mono(half_block, E2) * mono(half_block, E1)
    assert word_element(half_block, word).distance(direct) == 0


def test_normal_form_independence_on_box(mixed_theta):
    x = mono(mixed_theta, (1, 0, 1, 0), (0, 1, 0, 0)) * mono(mixed_theta, (0, 2, 0, 0), (1, 0, 0, 1))
    y = mono(mixed_theta, (0, 1, 0, 0), (1, 0, 0, 1), 2.0)
    # different normal forms must act differently on some basis vector
    assert box_distance(x, y, 2) > 0.5


def test_json_round_trip(mixed_theta):
    x = mono(mixed_theta, (1, 0, 2, 0), (0, 1, 0, 0), 0.5 - 2j) + mono(mixed_theta, (0, 0, 0, 0))
    data = x.to_json()
    assert [(d["p"], d["q"]) for d in data] == sorted((d["p"], d["q"]) for d in data)
    assert ToeplitzElement.from_json(mixed_theta, data).distance(x) == 0
    t = TorusElement(mixed_theta, {(1, -1, 0, 2): 1j, (0, 0, 0, 0): 0.25})
    assert TorusElement.from_json(mixed_theta, t.to_json()).distance(t) == 0


def test_invalid_keys_rejected(half_block):
    with pytest.raises(ValueError):
        ToeplitzElement(half_block, {((1, -1), (0, 0)): 1})
    with pytest.raises(ValueError):
        ToeplitzElement(half_block, {((1,), (0,)): 1})
    other = ThetaMatrix.zero(2)
    with pytest.raises(ValueError):
        mono(half_block, E1) * mono(other, E1)


def test_pruning(half_block):
    x = ToeplitzElement(half_block, {(E1, E2): 1e-15, (E2, E1): 1.0})
    assert list(x.terms) == [(E2, E1)]
