"""Annihilator spaces of polynomials as kernels over Z_n, and witness lifting.

For a fixed polynomial h over R, each of the maps

    right:  g -> h*g        left:  g -> g*h        inner:  g -> h*g*h

is Z_n-linear in g.  Writing g = sum_k sum_b g[k, b] e_b x^k gives an
integer system whose kernel is the set of annihilating g of degree <= k_max;
k_max = 0 is the scalar annihilator space.

In a strict truncated ring the unknowns are restricted to basis words of
low enough degree that every product in the system stays below the cap;
the restriction is recorded in the space's ``meta``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from innermccoy.errors import (
    BudgetExceeded,
    DegreeBudgetError,
    HypothesisViolation,
    LiftFailure,
    RingMismatch,
)
from innermccoy.config import budgets
from innermccoy.linalg import SolutionSpace, solve_kernel_mod
from innermccoy.matrices import basis_matrix, family_index
from innermccoy.poly import Polynomial, poly_mul, sandwich
from innermccoy.ring import Element, RingDescriptor, element_array, pair

SIDES = ("left", "right", "inner")


# system construction ------------------------------------------------------


def image_tensor(R: RingDescriptor, H: np.ndarray, side: str, support=None) -> np.ndarray:
    """Coefficients of the image of each basis vector, for a batch of h.

    ``H`` has shape (N, L, d).  Returns P with shape (N, Lout, B, d) where
    P[n, t, b, c] is the e_c-coordinate of x**t in h_n*e_b (right), e_b*h_n
    (left) or h_n*e_b*h_n (inner), b running over ``support``.
    """
    T = R.table if support is None else R.table[:, support, :]
    if side == "right":
        return np.einsum("nia,abc->nibc", H, T, optimize=True)
    if side == "left":
        TL = R.table if support is None else R.table[support]
        return np.einsum("bac,nia->nibc", TL, H, optimize=True)
    if side != "inner":
        raise ValueError(f"side must be one of {SIDES}, got {side!r}")
    N, L, d = H.shape
    HE = np.einsum("nia,abc->nibc", H, T, optimize=True)
    Q = np.einsum("nibc,njh,che->nijbe", HE, H, R.table, optimize=True)
    out = np.zeros((N, 2 * L - 1, Q.shape[3], d), dtype=np.int64)
    for i in range(L):
        out[:, i:i + L] += Q[:, i]
    return out


def system_matrix(P: np.ndarray, degree: int) -> np.ndarray:
    """Stack shifted copies of P into rows (t, c) and columns (k, b)."""
    N, Lp, B, d = P.shape
    M = np.zeros((N, Lp + degree, d, degree + 1, B), dtype=np.int64)
    Pt = P.transpose(0, 1, 3, 2)
    for k in range(degree + 1):
        M[:, k:k + Lp, :, k, :] = Pt
    return M.reshape(N, (Lp + degree) * d, (degree + 1) * B)


def unknown_support(R: RingDescriptor, h: Polynomial, side: str) -> np.ndarray:
    """Basis indices the unknown may use without leaving the retained degrees."""
    d = R.basis_size
    if not R.is_strict:
        return np.arange(d)
    mult = 2 if side == "inner" else 1
    need = mult * h.max_grade()
    if need > R.cap:
        raise DegreeBudgetError(
            f"{side} system of a polynomial of coefficient degree {h.max_grade()} "
            f"does not fit the cap {R.cap} of {R.id}"
        )
    return np.flatnonzero(R.grades + need <= R.cap)


@dataclass(frozen=True)
class AnnihilationSystem:
    ring: RingDescriptor
    f: Polynomial
    side: str
    degree: int
    support: np.ndarray
    matrix: np.ndarray
    var_orders: np.ndarray
    eq_orders: np.ndarray

    @classmethod
    def build(cls, f: Polynomial, side: str, degree: int = 0) -> "AnnihilationSystem":
        if side not in SIDES:
            raise ValueError(f"side must be one of {SIDES}, got {side!r}")
        R = f.ring
        support = unknown_support(R, f, side)
        n_unknowns = (degree + 1) * len(support)
        if n_unknowns > budgets().solver_unknowns:
            raise BudgetExceeded(f"{n_unknowns} unknowns exceeds the solver budget")
        if f.is_zero():
            P = np.zeros((1, 1, len(support), R.basis_size), dtype=np.int64)
        else:
            P = image_tensor(R, f.coeffs[None], side, support)
        M = system_matrix(P, degree)[0]
        rows = M.shape[0] // R.basis_size
        return cls(
            ring=R,
            f=f,
            side=side,
            degree=degree,
            support=support,
            matrix=M,
            var_orders=np.tile(R.orders[support], degree + 1),
            eq_orders=np.tile(R.orders, rows),
        )

    def solve(self, method: str = "auto") -> SolutionSpace:
        R = self.ring
        sp = solve_kernel_mod(self.matrix, R.modulus, self.var_orders, self.eq_orders, method=method)
        d = R.basis_size
        flat_support = tuple(int(k * d + b) for k in range(self.degree + 1) for b in self.support)
        restricted = len(self.support) < d
        meta = {"side": self.side, "degree": self.degree, "restricted": restricted}
        if restricted:
            meta["max_unknown_grade"] = int(R.grades[self.support].max())
        return SolutionSpace(
            modulus=sp.modulus,
            orders=sp.orders,
            rows=sp.rows,
            ring_id=R.id,
            support=flat_support,
            basis_size=(self.degree + 1) * d,
            meta=meta,
        )


def apply_side(f: Polynomial, g: Polynomial, side: str) -> Polynomial:
    if side == "right":
        return poly_mul(f, g)
    if side == "left":
        return poly_mul(g, f)
    return sandwich(f, g)


def _verify_generators(f: Polynomial, space: SolutionSpace, side: str) -> None:
    R = f.ring
    for vec in space.generators:
        g = vector_to_polynomial(R, vec)
        if not apply_side(f, g, side).is_zero():
            raise LiftFailure(f"kernel generator {g} does not satisfy the {side} system")
        if side != "inner" and space.meta["degree"] == 0:
            # one-sided annihilators are inner annihilators
            try:
                if not sandwich(f, g).is_zero():
                    raise LiftFailure(f"{side} annihilator {g} is not an inner annihilator")
            except DegreeBudgetError:
                pass


def partner_space(f: Polynomial, side: str, degree: int, method: str = "auto", verify: bool = True) -> SolutionSpace:
    """All g with deg g <= degree and f*g (right), g*f (left) or f*g*f (inner) zero."""
    space = AnnihilationSystem.build(f, side, degree).solve(method)
    if verify:
        _verify_generators(f, space, side)
    return space


def annihilator_space(f: Polynomial, side: str, method: str = "auto") -> SolutionSpace:
    """Scalars r in R with f*r = 0, r*f = 0 or f*r*f = 0."""
    return partner_space(f, side, 0, method)


def vector_to_polynomial(R: RingDescriptor, vec) -> Polynomial:
    return Polynomial(R, np.asarray(vec, dtype=np.int64).reshape(-1, R.basis_size))


def space_witness(R: RingDescriptor, space: SolutionSpace) -> Polynomial | None:
    w = space.witness
    return None if w is None else vector_to_polynomial(R, w)


def scalar_witness(R: RingDescriptor, space: SolutionSpace) -> Element | None:
    w = space.witness
    return None if w is None else R.element(w[:R.basis_size])


def brute_force_annihilators(f: Polynomial, side: str, budget: int | None = None) -> set[tuple[int, ...]]:
    """Every r in R with the requested annihilation, found by enumerating R."""
    R = f.ring
    X = element_array(R, budget)
    if f.is_zero():
        return {tuple(int(v) for v in row) for row in X}
    support = None
    if R.is_strict:
        support = unknown_support(R, f, side)
        outside = np.setdiff1d(np.arange(R.basis_size), support)
        X = X[~X[:, outside].any(axis=1)]
    P = image_tensor(R, f.coeffs[None], side)[0]  # (Lout, d_b, d_c)
    out = np.einsum("rb,tbc->rtc", X, P) % R.orders
    ok = ~out.reshape(len(X), -1).any(axis=1)
    return {tuple(int(v) for v in row) for row in X[ok]}


# witness lifting ----------------------------------------------------------


def _base_and_shape(R: RingDescriptor):
    if R.kind != "matrix":
        raise HypothesisViolation(f"{R.id} is not a matrix ring")
    return R.meta["base"], R.meta["shape"]


def entry_polynomial(F: Polynomial, i: int, j: int) -> Polynomial:
    """The (i, j) entry of a polynomial over a matrix ring, as a polynomial over the base."""
    base, shape = _base_and_shape(F.ring)
    k = family_index(F.ring, i, j)
    db = base.basis_size
    return Polynomial(base, F.coeffs[:, k * db:(k + 1) * db] if len(F) else None)


@lru_cache(maxsize=1 << 16)
def _base_solve(ring: RingDescriptor, side: str, key: bytes, length: int) -> Element | None:
    coeffs = np.frombuffer(key, dtype=np.int64).reshape(length, ring.basis_size)
    sp = annihilator_space(Polynomial(ring, coeffs), side)
    return scalar_witness(ring, sp)


def base_annihilator(f: Polynomial, side: str) -> Element:
    """Lex-least nonzero scalar annihilator of f over its base ring (memoised)."""
    r = _base_solve(f.ring, side, f.coeffs.tobytes(), len(f))
    if r is None:
        raise HypothesisViolation(f"{f} has no nonzero {side} scalar annihilator in {f.ring.id}")
    return r


def _checked(F: Polynomial, D: Element, label: str) -> Element:
    if not D or not sandwich(F, Polynomial.constant(D)).is_zero():
        raise LiftFailure(f"{label}: {D} does not inner-annihilate {F}")
    return D


def lift_inner_witness_t2(F: Polynomial, G: Polynomial, *, with_case: bool = False):
    """Nonzero A in T_2(R) with F*A*F = 0, following the case split on diagonals."""
    Rm = F.ring
    base, shape = _base_and_shape(Rm)
    if shape.kind != "upper_triangular" or shape.n != 2:
        raise HypothesisViolation(f"{Rm.id} is not T_2 of a ring")
    if G.ring.id != Rm.id:
        raise RingMismatch(f"{Rm.id} vs {G.ring.id}")
    if not base.is_commutative:
        raise HypothesisViolation(f"base ring {base.id} is not commutative")
    if F.is_zero() or G.is_zero():
        raise HypothesisViolation("F and G must be nonzero")
    if not sandwich(F, G).is_zero():
        raise HypothesisViolation("F*G*F is not zero")

    f11, f22 = entry_polynomial(F, 1, 1), entry_polynomial(F, 2, 2)
    g11, g12, g22 = (entry_polynomial(G, *c) for c in ((1, 1), (1, 2), (2, 2)))

    if f11.is_zero():
        case, D = "f11=0", basis_matrix(Rm, 1, 1)
    elif f22.is_zero():
        case, D = "f22=0", basis_matrix(Rm, 2, 2)
    elif not g11.is_zero():
        if poly_mul(f11, g11).is_zero():
            case, D = "g11: f11*g11=0", basis_matrix(Rm, 1, 1, base_annihilator(f11, "right"))
        else:
            case, D = "g11: f11*g11!=0", basis_matrix(Rm, 1, 2, base_annihilator(f11, "left"))
    elif not g22.is_zero():
        if poly_mul(g22, f22).is_zero():
            case, D = "g22: g22*f22=0", basis_matrix(Rm, 2, 2, base_annihilator(f22, "left"))
        else:
            case, D = "g22: g22*f22!=0", basis_matrix(Rm, 1, 2, base_annihilator(f22, "right"))
    else:
        if poly_mul(f11, g12).is_zero():
            case, D = "g12: f11*g12=0", basis_matrix(Rm, 1, 2, base_annihilator(f11, "right"))
        else:
            case, D = "g12: f11*g12!=0", basis_matrix(Rm, 1, 2, base_annihilator(f22, "left"))
    _checked(F, D, case)
    return (D, case) if with_case else D


def _dut_parts(F: Polynomial):
    base, shape = _base_and_shape(F.ring)
    if shape.kind != "dut":
        raise HypothesisViolation(f"{F.ring.id} is not DUT_n of a ring")
    return base, shape.n


def last_row_leading(G: Polynomial) -> tuple[int, int] | None:
    """(k, m): last row with a nonzero off-diagonal entry and its first nonzero column."""
    _, n = _dut_parts(G)
    for k in range(n, 0, -1):
        for m in range(k + 1, n + 1):
            if not entry_polynomial(G, k, m).is_zero():
                return k, m
    return None


def lift_inner_witness_dut(F: Polynomial, d: Element | None = None, G: Polynomial | None = None, *, with_case: bool = False):
    """Nonzero D in DUT_n(R) with F*D*F = 0.

    Zero diagonal gives E_1n.  Otherwise the caller's d (with f*d*f = 0 on
    the diagonal polynomial f) is placed at (1, n), or at G's last-row
    leading cell when G has zero diagonal.  That second placement can fail
    for n >= 3 (e.g. over Z_4, F = 2I + E12, G = 2*E23, d = 1), in which
    case the (1, n) placement is used and the case label says so.
    """
    Rm = F.ring
    base, n = _dut_parts(F)
    if F.is_zero():
        raise HypothesisViolation("F must be nonzero")
    f = entry_polynomial(F, 1, 1)
    if f.is_zero():
        D = _checked(F, basis_matrix(Rm, 1, n), "f=0")
        return (D, "f=0") if with_case else D
    if d is None:
        raise HypothesisViolation("a nonzero diagonal needs a scalar d with f*d*f = 0")
    if d.ring.id != base.id:
        raise RingMismatch(f"{d.ring.id} vs {base.id}")
    if not d or not sandwich(f, Polynomial.constant(d)).is_zero():
        raise HypothesisViolation(f"supplied d = {d} does not satisfy f*d*f = 0")
    case = "g!=0"
    if G is not None and entry_polynomial(G, 1, 1).is_zero():
        km = last_row_leading(G)
        if km is not None:
            D = basis_matrix(Rm, km[0], km[1], d)
            if sandwich(F, Polynomial.constant(D)).is_zero():
                return (D, "g=0") if with_case else D
            case = "g=0 fallback"
    D = _checked(F, basis_matrix(Rm, 1, n, d), case)
    return (D, case) if with_case else D


def extract_scalar_dut(F: Polynomial, D: Element) -> Element:
    """Scalar d with f*d*f = 0 from a nonzero D with F*D*F = 0 (converse direction)."""
    base, n = _dut_parts(F)
    if not D:
        raise HypothesisViolation("D must be nonzero")
    if not sandwich(F, Polynomial.constant(D)).is_zero():
        raise HypothesisViolation("F*D*F is not zero")
    Dp = Polynomial.constant(D)
    d = entry_polynomial(Dp, 1, 1)[0]
    if not d:
        k, m = last_row_leading(Dp)
        d = entry_polynomial(Dp, k, m)[0]
    f = entry_polynomial(F, 1, 1)
    if not sandwich(f, Polynomial.constant(d)).is_zero():
        raise LiftFailure(f"extracted {d} does not inner-annihilate the diagonal {f}")
    return d


def product_inner_witness(w1: Element, w2: Element, ring: RingDescriptor) -> Element:
    """The pair (w1, w2) in ``ring`` = R1 x R2; rejects (0, 0)."""
    if ring.kind != "product":
        raise HypothesisViolation(f"{ring.id} is not a direct product")
    R1, R2 = ring.meta["factors"]
    if w1.ring.id != R1.id or w2.ring.id != R2.id:
        raise RingMismatch(f"({w1.ring.id}, {w2.ring.id}) vs factors of {ring.id}")
    if not w1 and not w2:
        raise HypothesisViolation("both components are zero")
    return pair(w1, w2, ring)


def project_polynomial(f: Polynomial, factor: int) -> Polynomial:
    R1, R2 = f.ring.meta["factors"]
    d1 = R1.basis_size
    if factor == 0:
        return Polynomial(R1, f.coeffs[:, :d1] if len(f) else None)
    return Polynomial(R2, f.coeffs[:, d1:] if len(f) else None)


def componentwise_inner_witness(f: Polynomial) -> Element | None:
    """Inner annihilator of f over R1 x R2 assembled from factor witnesses."""
    R = f.ring
    comps = []
    for k in (0, 1):
        fk = project_polynomial(f, k)
        Rk = fk.ring
        if fk.is_zero():
            comps.append(Rk.unity())
            continue
        comps.append(scalar_witness(Rk, annihilator_space(fk, "inner")) or Rk.zero())
    if not comps[0] and not comps[1]:
        return None
    w = product_inner_witness(comps[0], comps[1], R)
    return _checked(f, w, "product")
