import numpy as np
import pytest
from hypothesis import given, strategies as st

from innermccoy import DegreeBudgetError, RingMismatch, make_modular_ring
from innermccoy.dsl import build_ring_spec, parse_polynomial
from innermccoy.poly import (
    BivariatePolynomial,
    LaurentPolynomial,
    Polynomial,
    collision_free,
    flatten,
    flatten_k,
    flatten_multivariate,
    laurent_to_poly,
    poly_mul,
    sandwich,
)

from oracles import all_elements, naive_mul, random_bivariate, random_poly

RINGS = ["Z4", "Z6", "T2(Z2)", "M2(Z3)", "Z2 x Z4", "DUT3(Z2)"]


def poly_strategy(R, max_degree=3):
    coeff = st.tuples(*(st.integers(0, int(m) - 1) for m in R.orders))
    return st.lists(coeff, max_size=max_degree + 1).map(lambda rows: Polynomial(R, rows or None))


def test_trimming_and_degree():
    Z4 = make_modular_ring(4)
    p = Polynomial(Z4, [[1], [0], [4]])
    assert p.degree == 0 and len(p) == 1
    assert Polynomial(Z4).degree is None
    assert Polynomial(Z4, [[0], [0]]).is_zero()


def test_char4_square_vanishes():
    Z4 = make_modular_ring(4)
    f = Polynomial(Z4, [[2], [2]])
    assert (f * f).is_zero()
    assert sandwich(f, Polynomial.constant(Z4.unity())).is_zero()


def test_ex2_product_vanishes():
    R = build_ring_spec("EX2@D=4")
    F = parse_polynomial("c0 + c1*x", R)
    G = parse_polynomial("d0 + d1*x", R)
    assert poly_mul(F, G).is_zero()


def test_mn2_product_vanishes_mod_two():
    R = build_ring_spec("M2(Z2)")
    A = parse_polynomial("[[x, x^2],[x^3, x^4]]", R)
    B = parse_polynomial("[[x, -x^2],[-1, x]]", R)
    assert poly_mul(A, B).is_zero()


def test_mn2_sandwich_over_z5():
    R = build_ring_spec("M2(Z5)")
    A = parse_polynomial("[[x, x^2],[x^3, x^4]]", R)
    B = parse_polynomial("[[x, -x^2],[-1, x]]", R)
    assert not poly_mul(B, A).is_zero()
    assert sandwich(A, B).is_zero()
    assert sandwich(A, Polynomial(R)).is_zero()


def test_ring_mismatch():
    with pytest.raises(RingMismatch):
        poly_mul(Polynomial.x(make_modular_ring(2)), Polynomial.x(make_modular_ring(3)))


def test_overflow_raises_instead_of_truncating():
    R = build_ring_spec("EX2@D=2")
    c0 = parse_polynomial("c0", R)
    with pytest.raises(DegreeBudgetError):
        poly_mul(c0 * c0, c0)


@pytest.mark.parametrize("spec", RINGS)
@given(data=st.data())
def test_convolution_matches_naive(spec, data):
    R = build_ring_spec(spec)
    f, g = data.draw(poly_strategy(R)), data.draw(poly_strategy(R))
    fg = poly_mul(f, g)
    assert fg == naive_mul(f, g)
    if not fg.is_zero():
        assert fg.degree <= f.degree + g.degree


@pytest.mark.parametrize("spec", RINGS)
def test_sandwich_bilinear(spec):
    R = build_ring_spec(spec)
    rng = np.random.default_rng(7)
    for _ in range(10_000 // len(RINGS)):
        f, g1, g2 = (random_poly(R, rng, 3) for _ in range(3))
        assert sandwich(f, g1 + g2) == sandwich(f, g1) + sandwich(f, g2)


@pytest.mark.parametrize("spec", RINGS)
@given(data=st.data())
def test_central_indeterminate(spec, data):
    R = build_ring_spec(spec)
    f = data.draw(poly_strategy(R))
    x = Polynomial.x(R)
    assert x * f == f * x == f.shift(1)


# Laurent -----------------------------------------------------------------


def test_laurent_examples():
    Z4, Z6 = make_modular_ring(4), make_modular_ring(6)
    f = parse_polynomial("x^-1 + 1", Z4)
    assert isinstance(f, LaurentPolynomial) and f.offset == 1
    assert laurent_to_poly(f) == (1, Polynomial(Z4, [[1], [1]]))
    m, p = laurent_to_poly(parse_polynomial("3*x^-2", Z6))
    assert (m, p) == (2, Polynomial(Z6, [[3]]))
    assert laurent_to_poly(LaurentPolynomial(Z6, 3)) == (0, Polynomial(Z6))


def test_laurent_canonical_offset():
    Z4 = make_modular_ring(4)
    f = LaurentPolynomial(Z4, 3, [[0], [0], [1], [1]])
    assert f.offset == 1 and str(f) == "x^-1 + 1"
    assert LaurentPolynomial(Z4, 0, [[0], [2]]).offset == 0


def test_laurent_witness_transfer_z4():
    Z4 = make_modular_ring(4)
    rng = np.random.default_rng(3)
    for _ in range(300):
        m = int(rng.integers(0, 4))
        coeffs = rng.integers(0, 4, size=(int(rng.integers(1, 5)), 1))
        f = LaurentPolynomial(Z4, m, coeffs)
        _, p = laurent_to_poly(f)
        for r in all_elements(Z4):
            lhs = (f * r * f).is_zero()
            assert lhs == sandwich(p, Polynomial.constant(r)).is_zero()


# flattening --------------------------------------------------------------


def biv(R, rows):
    return BivariatePolynomial(R, [Polynomial(R, r) if r else Polynomial(R) for r in rows])


def test_flatten_k_examples():
    Z5 = make_modular_ring(5)
    a, b, c = 2, 3, 4
    F = biv(Z5, [[[a]], [[0], [b]]])
    G = biv(Z5, [[[c]]])
    assert flatten_k(F, G) == 1
    F2 = biv(Z5, [[[0], [0], [1]]])
    G2 = biv(Z5, [None, [[0], [1]]])
    assert flatten_k(F2, G2) == 4
    assert flatten_k(BivariatePolynomial(Z5), BivariatePolynomial(Z5)) == 0


def test_flatten_substitution():
    Z2 = make_modular_ring(2)
    F = biv(Z2, [[[0], [1]], [[1]]])
    assert flatten(F, 2) == Polynomial(Z2, [[0], [1], [1]])
    with pytest.raises(ValueError):
        flatten(F, -1)


def test_flatten_is_homomorphism():
    Z6 = make_modular_ring(6)
    rng = np.random.default_rng(11)
    for _ in range(2000):
        F, G = random_bivariate(Z6, rng), random_bivariate(Z6, rng)
        k = int(rng.integers(0, 9))
        assert flatten(F + G, k) == flatten(F, k) + flatten(G, k)
        assert flatten(F * G, k) == flatten(F, k) * flatten(G, k)


def test_collision_free():
    assert collision_free({(0, 0), (1, 0), (0, 1)}, 2)
    assert not collision_free({(1, 0), (0, 1)}, 1)


def test_paper_k_can_collide_but_one_more_than_max_degree_never_does():
    Z2 = make_modular_ring(2)
    F = biv(Z2, [[[0], [1]], [[1]]])  # x + y
    G = biv(Z2, [[[1]]])
    assert flatten_k(F, G) == 1
    assert not collision_free(F.support(), 1)
    rng = np.random.default_rng(5)
    for _ in range(500):
        F, G = random_bivariate(Z2, rng), random_bivariate(Z2, rng)
        pts = F.support() | G.support() | (G * F * G).support()
        safe = max((s for s, _ in pts), default=0) + 1
        assert collision_free(pts, max(flatten_k(F, G), safe))


def test_multivariate_flattening_preserves_vanishing():
    Z4 = make_modular_ring(4)
    two, one = Z4.scalar(2), Z4.scalar(1)
    # three variables: F = 2*x1*x3 + x2^2, G = 2 + 2*x2*x3
    F = {(1, 0, 1): two, (0, 2, 0): one}
    G = {(0, 0, 0): two, (0, 1, 1): two}
    f, g, ks = flatten_multivariate(F, G, Z4)
    assert len(ks) == 2
    assert sandwich(g, f).is_zero()
    assert not f.is_zero()
