import json

import pytest
from hypothesis import given, strategies as st

from innermccoy import ConstructionError, DegreeBudgetError, InadmissiblePosition
from innermccoy.certificates import CORPUS_DIR
from innermccoy.dsl import (
    DSLSyntaxError,
    MatrixSpec,
    Modular,
    Opposite,
    Product,
    Truncated,
    build_ring_spec,
    format_ring_spec,
    parse_element,
    parse_polynomial,
    parse_ring_spec,
    register_presentation,
)
from innermccoy.graded import Presentation
from innermccoy.matrices import basis_matrix
from innermccoy.poly import LaurentPolynomial, Polynomial

leaves = st.one_of(
    st.integers(2, 40).map(Modular),
    st.builds(Truncated, st.sampled_from(["EX1", "EX2"]), st.integers(0, 9), st.sampled_from(["D", "Q"])),
)


def _extend(children):
    return st.one_of(
        st.builds(lambda k, n, c: MatrixSpec(k, n, (), c), st.sampled_from(["M", "T", "DUT"]), st.integers(1, 5), children),
        st.builds(lambda parts, c: MatrixSpec("B", sum(parts), tuple(parts), c),
                  st.lists(st.integers(1, 3), min_size=1, max_size=3), children),
        st.builds(Opposite, children),
        st.builds(Product, children, children),
    )


specs = st.recursive(leaves, _extend, max_leaves=6)


@given(specs)
def test_ast_round_trip(spec):
    text = format_ring_spec(spec)
    assert parse_ring_spec(text) == spec
    assert format_ring_spec(parse_ring_spec(text)) == text


def test_product_is_left_associative():
    assert parse_ring_spec("Z2 x Z3 x Z5") == Product(Product(Modular(2), Modular(3)), Modular(5))
    assert format_ring_spec(parse_ring_spec("Z2 x (Z3 x Z5)")) == "Z2 x (Z3 x Z5)"


@pytest.mark.parametrize("text", ["T2(Z4)", "EX2@D=4", "B[2,1](Z2)", "opp(M2(Z3))", "Z2 x Z4", "EX1@Q=2", "DUT3(Z2 x Z2)"])
def test_printed_spec_is_ring_id(text):
    assert build_ring_spec(text).id == text


def test_spec_examples():
    T = build_ring_spec("T2(Z4)")
    assert T.meta["shape"].kind == "upper_triangular" and T.modulus == 4
    E = build_ring_spec("EX2@D=4")
    assert E.cap == 4 and E.is_strict and E.basis_size == 40
    B = build_ring_spec("B[2,1](Z2)")
    assert B.meta["shape"].partition == (2, 1) and B.basis_size == 7


@pytest.mark.parametrize("text,pos", [("T2(Z4", 5), ("Q5", 0), ("M2(Z2) x", 8), ("Z2 y Z3", 3), ("B[2,](Z2)", 4)])
def test_syntax_errors_carry_position(text, pos):
    with pytest.raises(DSLSyntaxError) as err:
        parse_ring_spec(text)
    assert err.value.position == pos


def test_semantic_errors():
    with pytest.raises(ConstructionError):
        build_ring_spec("B[0,2](Z2)")
    with pytest.raises(DSLSyntaxError):
        build_ring_spec("EX9@D=2")
    with pytest.raises(ConstructionError):
        build_ring_spec("Z1")


def test_registered_presentation():
    register_presentation(Presentation.from_text("NIL2", ["u", "v"], ["u*u", "v*v"]))
    R = build_ring_spec("NIL2@D=3")
    assert [str(R.basis_element(i)) for i in range(R.basis_size)] == ["1", "u", "v", "u*v", "v*u", "u*v*u", "v*u*v"]


def test_matrix_literal_becomes_polynomial_of_matrices():
    R = build_ring_spec("M2(Z5)")
    A = parse_polynomial("[[x, x^2],[x^3, x^4]]", R)
    assert A.degree == 4
    for k, (i, j) in enumerate([(1, 1), (1, 2), (2, 1), (2, 2)], start=1):
        assert A[k] == basis_matrix(R, i, j)
    assert not A[0]


def test_scalar_and_generator_polynomials():
    R = build_ring_spec("EX2@D=2")
    F = parse_polynomial("c0 + c1*x", R)
    assert str(F) == "c0 + c1*x"
    assert parse_polynomial("2 + 2*x^3", build_ring_spec("Z4")) == Polynomial(build_ring_spec("Z4"), [[2], [0], [0], [2]])


def test_laurent_input():
    f = parse_polynomial("x^-1 + 1", build_ring_spec("Z4"))
    assert isinstance(f, LaurentPolynomial) and f.offset == 1


def test_polynomial_errors():
    R = build_ring_spec("M2(Z2)")
    with pytest.raises(DSLSyntaxError):
        parse_polynomial("c0 + x", R)
    with pytest.raises(DSLSyntaxError):
        parse_polynomial("[[1, 0, 0],[0, 1, 0]]", R)
    with pytest.raises(InadmissiblePosition):
        parse_polynomial("[[1, 0],[x, 1]]", build_ring_spec("T2(Z2)"))
    with pytest.raises(DegreeBudgetError):
        parse_polynomial("c0^5", build_ring_spec("EX2@D=4"))
    with pytest.raises(DSLSyntaxError) as err:
        parse_polynomial("1 + * x", build_ring_spec("Z2"))
    assert err.value.position == 4


def test_embedded_scalars_in_nested_rings():
    R = build_ring_spec("T2(EX2@D=4)")
    F = parse_polynomial("[[c1*x + c0, 1],[0, x + 1]]", R)
    assert F.degree == 1
    e = parse_element("(d0, 1)", build_ring_spec("EX2@D=4 x Z3"))
    assert e.coeffs[-1] == 1


def _corpus_inputs():
    for path in sorted(CORPUS_DIR.glob("*.json")):
        cert = json.loads(path.read_text())
        for inp in cert["inputs"]:
            yield pytest.param(inp.get("ring", cert["ring"]), inp["text"], id=f"{cert['id']}:{inp['name']}")
        yield pytest.param(cert["ring"], None, id=f"{cert['id']}:ring")


@pytest.mark.parametrize("ring,text", list(_corpus_inputs()))
def test_corpus_inputs_round_trip(ring, text):
    spec = parse_ring_spec(ring)
    assert parse_ring_spec(format_ring_spec(spec)) == spec
    if text is None:
        return
    R = build_ring_spec(spec)
    p = parse_polynomial(text, R)
    assert parse_polynomial(str(p), R) == p
