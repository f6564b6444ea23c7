import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from innermccoy import HypothesisViolation, make_opposite_ring
from innermccoy.annihilators import (
    SIDES,
    annihilator_space,
    brute_force_annihilators,
    componentwise_inner_witness,
    extract_scalar_dut,
    lift_inner_witness_dut,
    lift_inner_witness_t2,
    partner_space,
    product_inner_witness,
    space_witness,
)
from innermccoy.dsl import build_ring_spec, parse_element, parse_polynomial
from innermccoy.matrices import basis_matrix
from innermccoy.poly import Polynomial, sandwich
from innermccoy.ring import element_array, pair

from oracles import annihilators_by_enumeration, naive_mul, naive_side

ORACLE_RINGS = ["Z8", "Z6", "T2(Z2)", "T2(Z4)", "M2(Z2)", "DUT2(Z4)", "DUT3(Z2)", "Z2 x Z4", "opp(T2(Z3))", "B[1,2](Z2)"]


def P(text, spec):
    return parse_polynomial(text, build_ring_spec(spec))


def poly_of(R, draw, max_degree=3):
    deg = draw(st.integers(0, max_degree))
    rows = [draw(st.tuples(*(st.integers(0, int(m) - 1) for m in R.orders))) for _ in range(deg + 1)]
    return Polynomial(R, rows)


def test_mn2_inner_space_zero_over_z5():
    sp = annihilator_space(P("[[x, x^2],[x^3, x^4]]", "M2(Z5)"), "inner")
    assert sp.is_zero and sp.witness is None


def test_ex2_right_space_zero():
    for D in (2, 3, 4):
        assert annihilator_space(P("c0 + c1*x", f"EX2@D={D}"), "right").is_zero


def test_z8_inner_space():
    sp = annihilator_space(P("2 + 2*x", "Z8"), "inner")
    assert sp.vector_set() == {(0,), (2,), (4,), (6,)}
    assert sp.witness == (2,)


def test_strict_ring_restricts_unknowns():
    sp = annihilator_space(P("c0 + c1*x", "EX2@D=4"), "inner")
    assert sp.meta["restricted"] and sp.meta["max_unknown_grade"] == 2
    R = build_ring_spec("EX2@D=4")
    assert sp.contains(parse_element("d0", R).coeffs)


@pytest.mark.parametrize("spec", ORACLE_RINGS)
@given(data=st.data())
def test_oracle_equivalence(spec, data):
    R = build_ring_spec(spec)
    f = poly_of(R, data.draw)
    for side in SIDES:
        sp = annihilator_space(f, side)
        truth = annihilators_by_enumeration(f, side)
        assert sp.vector_set() == truth
        assert brute_force_annihilators(f, side) == truth
        nonzero = [v for v in truth if any(v)]
        assert sp.witness == (min(nonzero) if nonzero else None)


@pytest.mark.parametrize("spec", ["T2(Z2)", "M2(Z2)", "DUT2(Z4)", "Z2 x Z4"])
@given(data=st.data())
def test_side_duality(spec, data):
    R = build_ring_spec(spec)
    Ro = make_opposite_ring(R)
    f = poly_of(R, data.draw)
    mirrored = Polynomial(Ro, f.coeffs)
    assert annihilator_space(f, "right").vector_set() == annihilator_space(mirrored, "left").vector_set()
    assert annihilator_space(f, "inner").vector_set() == annihilator_space(mirrored, "inner").vector_set()


@pytest.mark.parametrize("spec", ["T2(Z4)", "M2(Z2)", "B[1,2](Z2)"])
@given(data=st.data())
def test_one_sided_spaces_inside_inner(spec, data):
    R = build_ring_spec(spec)
    f = poly_of(R, data.draw)
    inner = annihilator_space(f, "inner")
    for side in ("left", "right"):
        for v in annihilator_space(f, side).vectors():
            assert inner.contains(v)


@pytest.mark.parametrize("spec", ["T2(Z2)", "Z6"])
@given(data=st.data())
def test_partner_space_matches_naive_products(spec, data):
    R = build_ring_spec(spec)
    f = poly_of(R, data.draw, 2)
    for side in SIDES:
        sp = partner_space(f, side, 1)
        for v in itertools.islice(sp.vectors(), 50):
            g = Polynomial(R, np.array(v).reshape(2, R.basis_size))
            prod = naive_mul(f, g) if side == "right" else naive_mul(g, f) if side == "left" else naive_mul(naive_mul(f, g), f)
            assert prod.is_zero()


def test_product_decomposition_exhaustive():
    R = build_ring_spec("Z2 x Z4")
    X = element_array(R)
    for rows in itertools.product(range(len(X)), repeat=3):
        f = Polynomial(R, X[list(rows)])
        space = annihilator_space(f, "inner").vector_set()
        f1 = Polynomial(R.meta["factors"][0], f.coeffs[:, :1] if len(f) else None)
        f2 = Polynomial(R.meta["factors"][1], f.coeffs[:, 1:] if len(f) else None)
        s1 = {v[0] for v in annihilator_space(f1, "inner").vectors()}
        s2 = {v[0] for v in annihilator_space(f2, "inner").vectors()}
        assert space == {(a, b) for a in s1 for b in s2}


# T_2 lifter -------------------------------------------------------------


@pytest.mark.parametrize(
    "spec,F,G,expected,case",
    [
        ("T2(Z2)", "E12*x + E22*x", "E11", "E11", "f11=0"),
        ("T2(Z4)", "(2 + 2*x)*I", "I", "2*E12", "g11: f11*g11!=0"),
        ("T2(Z4)", "(2 + 2*x)*I", "E12", "2*E12", "g12: f11*g12!=0"),
        ("T2(Z4)", "E11*x + E12", "E22", "E22", "f22=0"),
        ("T2(Z4)", "2*E11 + E22", "2*E11", "2*E11", "g11: f11*g11=0"),
    ],
)
def test_t2_lifter_cases(spec, F, G, expected, case):
    R = build_ring_spec(spec)
    Fp, Gp = parse_polynomial(F, R), parse_polynomial(G, R)
    D, got_case = lift_inner_witness_t2(Fp, Gp, with_case=True)
    assert str(D) == expected and got_case == case
    assert sandwich(Fp, Polynomial.constant(D)).is_zero()


def test_t2_lifter_rejects_bad_hypotheses():
    R = build_ring_spec("T2(Z4)")
    with pytest.raises(HypothesisViolation):
        lift_inner_witness_t2(parse_polynomial("I", R), parse_polynomial("I", R))
    Rn = build_ring_spec("T2(T2(Z2))")
    F = Polynomial.constant(basis_matrix(Rn, 1, 2))
    with pytest.raises(HypothesisViolation):
        lift_inner_witness_t2(F, F)


def test_t2_lifter_all_partners_t2_z2():
    R = build_ring_spec("T2(Z2)")
    X = element_array(R)
    for rows in itertools.product(range(len(X)), repeat=2):
        F = Polynomial(R, X[list(rows)])
        if F.is_zero():
            continue
        G = space_witness(R, partner_space(F, "inner", 1))
        if G is not None:
            D = lift_inner_witness_t2(F, G)
            assert D and naive_side(F, D, "inner").is_zero()


# DUT lifter -------------------------------------------------------------


def test_dut_lifter_examples():
    R2 = build_ring_spec("DUT2(Z4)")
    F = parse_polynomial("(2 + 2*x)*I", R2)
    D = lift_inner_witness_dut(F, R2.meta["base"].scalar(1))
    assert str(D) == "E12" and sandwich(F, Polynomial.constant(D)).is_zero()
    R3 = build_ring_spec("DUT3(Z4)")
    F3 = parse_polynomial("2*E12 + E23*x", R3)
    assert str(lift_inner_witness_dut(F3)) == "E13"


def test_dut_lifter_last_row_placement_and_fallback():
    R = build_ring_spec("DUT3(Z4)")
    base = R.meta["base"]
    F = parse_polynomial("2*I + E12", R)
    G = parse_polynomial("2*E23", R)
    D, case = lift_inner_witness_dut(F, base.scalar(1), G, with_case=True)
    assert case == "g=0 fallback" and str(D) == "E13"
    F2 = parse_polynomial("2*I", R)
    D2, case2 = lift_inner_witness_dut(F2, base.scalar(1), G, with_case=True)
    assert case2 == "g=0" and str(D2) == "E23"


def test_dut_lifter_rejects_bad_scalar():
    R = build_ring_spec("DUT2(Z4)")
    with pytest.raises(HypothesisViolation):
        lift_inner_witness_dut(parse_polynomial("1 + x", R), R.meta["base"].scalar(1))


def test_dut_extraction():
    R = build_ring_spec("DUT3(Z4)")
    F = parse_polynomial("2*I + E12", R)
    assert str(extract_scalar_dut(F, parse_element("2*E13", R))) == "2"
    F2 = parse_polynomial("(2 + 2*x)*I", build_ring_spec("DUT2(Z4)"))
    D = parse_element("I + E12", F2.ring)
    d = extract_scalar_dut(F2, D)
    assert str(d) == "1"


# products ---------------------------------------------------------------


def test_product_witness_examples():
    R = build_ring_spec("Z2 x Z8")
    Z2, Z8 = R.meta["factors"]
    w = product_inner_witness(Z2.scalar(1), Z8.scalar(2), R)
    g = parse_polynomial("(0, 2 + 2*x)", R)
    assert sandwich(g, Polynomial.constant(w)).is_zero()
    with pytest.raises(HypothesisViolation):
        product_inner_witness(Z2.zero(), Z8.zero(), R)


def test_ex2_product_pair_witness():
    R = build_ring_spec("EX2@D=4 x opp(EX2@D=4)")
    f = parse_polynomial("(c0 + c1*x, c0 + c1*x)", R)
    w = parse_element("(d0, d0)", R)
    assert sandwich(f, Polynomial.constant(w)).is_zero()
    cw = componentwise_inner_witness(f)
    assert cw and sandwich(f, Polynomial.constant(cw)).is_zero()
