"""Verification workbench for inner McCoy rings.

Finite and degree-truncated noncommutative rings as structure-constant
tables over Z_n, polynomial annihilator spaces solved exactly, degree-bounded
class-membership checks and a replayable certificate corpus.
"""

from innermccoy.errors import (
    BudgetExceeded,
    ConstructionError,
    DegreeBudgetError,
    DSLSyntaxError,
    HypothesisViolation,
    InadmissiblePosition,
    InvalidModulus,
    LiftFailure,
    RewriteBudgetError,
    RingMismatch,
    WorkbenchError,
)
from innermccoy.ring import (
    Element,
    RingDescriptor,
    enumerate_elements,
    make_modular_ring,
    make_opposite_ring,
    make_product_ring,
    ring_arith,
)
from innermccoy.matrices import MatrixShape, basis_matrix, make_matrix_ring, shape_membership
from innermccoy.poly import BivariatePolynomial, LaurentPolynomial, Polynomial, sandwich
from innermccoy.graded import (
    Presentation,
    RewriteSystem,
    TruncatedAlgebra,
    builtin_presentation,
    check_confluence,
    idempotent_scan,
)
from innermccoy.linalg import SolutionSpace, solve_kernel_mod
from innermccoy.annihilators import (
    annihilator_space,
    extract_scalar_dut,
    lift_inner_witness_dut,
    lift_inner_witness_t2,
    partner_space,
    product_inner_witness,
)
from innermccoy.properties import PropertyReport, check_elementwise, check_mccoy_like, replay_witness
from innermccoy.dsl import build_ring_spec, format_ring_spec, parse_polynomial, parse_ring_spec
from innermccoy.certificates import Certificate, run_corpus, verify_certificate

__version__ = "0.1.0"

__all__ = [
    "BivariatePolynomial",
    "BudgetExceeded",
    "Certificate",
    "ConstructionError",
    "DSLSyntaxError",
    "DegreeBudgetError",
    "Element",
    "HypothesisViolation",
    "InadmissiblePosition",
    "InvalidModulus",
    "LaurentPolynomial",
    "LiftFailure",
    "MatrixShape",
    "Polynomial",
    "Presentation",
    "PropertyReport",
    "RewriteBudgetError",
    "RewriteSystem",
    "RingDescriptor",
    "RingMismatch",
    "SolutionSpace",
    "TruncatedAlgebra",
    "WorkbenchError",
    "annihilator_space",
    "basis_matrix",
    "build_ring_spec",
    "builtin_presentation",
    "check_confluence",
    "check_elementwise",
    "check_mccoy_like",
    "enumerate_elements",
    "extract_scalar_dut",
    "format_ring_spec",
    "idempotent_scan",
    "lift_inner_witness_dut",
    "lift_inner_witness_t2",
    "make_matrix_ring",
    "make_modular_ring",
    "make_opposite_ring",
    "make_product_ring",
    "parse_polynomial",
    "parse_ring_spec",
    "partner_space",
    "product_inner_witness",
    "replay_witness",
    "ring_arith",
    "run_corpus",
    "sandwich",
    "shape_membership",
    "solve_kernel_mod",
    "verify_certificate",
]
