"""Finite rings as structure-constant tables over Z_n.

A ring of rank ``d`` is stored as a ``(d, d, d)`` integer array ``table`` with
``e_i * e_j = sum_k table[i, j, k] e_k``.  Every basis vector carries its own
additive order (all equal to the modulus except in products of rings with
different characteristic), so an element is a coefficient vector reduced
coordinatewise by ``orders``.

Truncated graded rings additionally carry ``grades``, a ``cap`` and an
``overflow`` mask marking basis products whose degree exceeds the cap.
Multiplying through an overflowed product raises :class:`DegreeBudgetError`
instead of silently returning zero.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from innermccoy.config import budgets
from innermccoy.errors import (
    BudgetExceeded,
    ConstructionError,
    DegreeBudgetError,
    InvalidModulus,
    RingMismatch,
)

EXHAUSTIVE_ASSOC_LIMIT = 64


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=np.int64)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class RingDescriptor:
    id: str
    modulus: int
    orders: np.ndarray
    table: np.ndarray
    one: np.ndarray
    labels: tuple[str, ...]
    provenance: tuple
    grades: np.ndarray | None = None
    cap: int | None = None
    overflow: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __repr__(self) -> str:
        return f"RingDescriptor({self.id!r}, d={self.basis_size}, n={self.modulus})"

    @property
    def basis_size(self) -> int:
        return len(self.orders)

    @property
    def kind(self) -> str:
        return self.provenance[0]

    @cached_property
    def size(self) -> int:
        return math.prod(int(m) for m in self.orders)

    @property
    def is_graded(self) -> bool:
        return self.grades is not None

    @property
    def is_strict(self) -> bool:
        """True when some basis product overflows the degree cap."""
        return self.overflow is not None and bool(self.overflow.any())

    @cached_property
    def is_commutative(self) -> bool:
        diff = (self.table - self.table.transpose(1, 0, 2)) % self.orders
        if self.overflow is not None:
            diff = diff * ~(self.overflow | self.overflow.T)[:, :, None]
        return not diff.any()

    @cached_property
    def uniform_orders(self) -> bool:
        return bool((self.orders == self.modulus).all())

    # vectors -------------------------------------------------------------

    def reduce(self, vec) -> np.ndarray:
        return np.asarray(vec, dtype=np.int64) % self.orders

    def zero(self) -> "Element":
        return Element(self, (0,) * self.basis_size)

    def unity(self) -> "Element":
        return Element(self, tuple(int(c) for c in self.one))

    def basis_element(self, i: int) -> "Element":
        v = [0] * self.basis_size
        v[i] = 1
        return Element(self, tuple(v))

    def element(self, coeffs: Sequence[int]) -> "Element":
        if len(coeffs) != self.basis_size:
            raise ValueError(f"expected {self.basis_size} coefficients, got {len(coeffs)}")
        return Element(self, tuple(int(c) for c in self.reduce(coeffs)))

    def scalar(self, c: int) -> "Element":
        return Element(self, tuple(int(x) for x in self.reduce(c * self.one)))

    def check_overflow(self, a: np.ndarray, b: np.ndarray) -> None:
        if self.overflow is None:
            return
        hit = self.overflow[np.ix_(np.flatnonzero(a), np.flatnonzero(b))]
        if hit.any():
            raise DegreeBudgetError(
                f"product in {self.id} exceeds the retained degree {self.cap}"
            )

    def mul_vec(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        self.check_overflow(a, b)
        return np.einsum("i,j,ijk->k", a, b, self.table) % self.orders

    def left_matrix(self, a: np.ndarray) -> np.ndarray:
        """Matrix of ``v -> a*v`` (no overflow check)."""
        return np.einsum("i,ibc->cb", a, self.table)

    def right_matrix(self, a: np.ndarray) -> np.ndarray:
        """Matrix of ``v -> v*a`` (no overflow check)."""
        return np.einsum("j,bjc->cb", a, self.table)

    def max_grade(self, vec: np.ndarray) -> int:
        if self.grades is None:
            return 0
        nz = np.flatnonzero(np.asarray(vec) % self.orders)
        return int(self.grades[nz].max()) if len(nz) else 0

    def format_vec(self, vec) -> str:
        terms = []
        for c, label in zip(self.reduce(vec), self.labels):
            if c == 0:
                continue
            if label == "1":
                terms.append(str(c))
            elif c == 1:
                terms.append(label)
            else:
                terms.append(f"{c}*{label}")
        return " + ".join(terms) if terms else "0"

    @cached_property
    def truncated_quotient(self) -> "RingDescriptor":
        """The quotient by everything above the cap (overflow read as zero).

        Unlike the strict ring this is a genuine finite ring; claims proved on
        it concern R/R_{>D}, not R.
        """
        if not self.is_strict:
            return self
        return build_ring(
            id=self.id.replace("@D=", "@Q="),
            modulus=self.modulus,
            orders=self.orders,
            table=self.table,
            one=self.one,
            labels=self.labels,
            provenance=("quotient_view", self.id),
            grades=self.grades,
            cap=self.cap,
            overflow=None,
            meta=dict(self.meta),
        )


@dataclass(frozen=True, eq=False)
class Element:
    ring: RingDescriptor
    coeffs: tuple[int, ...]

    @property
    def vec(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=np.int64)

    def _check(self, other: "Element") -> None:
        if not isinstance(other, Element):
            raise TypeError(f"cannot combine Element with {type(other).__name__}")
        if other.ring.id != self.ring.id:
            raise RingMismatch(f"{self.ring.id} vs {other.ring.id}")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Element)
            and other.ring.id == self.ring.id
            and other.coeffs == self.coeffs
        )

    def __hash__(self) -> int:
        return hash((self.ring.id, self.coeffs))

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def _wrap(self, vec) -> "Element":
        return Element(self.ring, tuple(int(c) for c in self.ring.reduce(vec)))

    def __add__(self, other: "Element") -> "Element":
        self._check(other)
        return self._wrap(self.vec + other.vec)

    def __sub__(self, other: "Element") -> "Element":
        self._check(other)
        return self._wrap(self.vec - other.vec)

    def __neg__(self) -> "Element":
        return self._wrap(-self.vec)

    def __mul__(self, other):
        if isinstance(other, int):
            return self._wrap(self.vec * other)
        self._check(other)
        return self._wrap(self.ring.mul_vec(self.vec, other.vec))

    def __rmul__(self, other: int) -> "Element":
        if isinstance(other, int):
            return self._wrap(self.vec * other)
        return NotImplemented

    def __pow__(self, k: int) -> "Element":
        out = self.ring.unity()
        for _ in range(k):
            out = out * self
        return out

    def __str__(self) -> str:
        return self.ring.format_vec(self.coeffs)

    def __repr__(self) -> str:
        return f"Element({self.ring.id}: {self})"


def ring_arith(op: str, a: Element, b: Element | None = None) -> Element:
    if op == "neg":
        if b is not None:
            raise ValueError("neg takes a single operand")
        return -a
    if b is None:
        raise ValueError(f"{op} needs two operands")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown ring operation {op!r}")


# construction -------------------------------------------------------------


MAX_ASSOC_SAMPLES = 20_000


def _assoc_defect(table, orders, triples=None, grades=None, cap=None) -> tuple | None:
    """Return a basis triple where associativity fails, or None."""
    t = table.astype(np.float64)
    d = table.shape[0]
    if triples is None:
        # (e_i e_j) e_k and e_i (e_j e_k) for all triples at once
        lhs = (t.reshape(d * d, d) @ t.reshape(d, d * d)).reshape(d, d, d, d)
        rhs = np.matmul(t.reshape(1, d * d, d), t).reshape(d, d, d, d)
        bad = (np.rint(lhs - rhs).astype(np.int64) % orders).any(axis=3)
        if grades is not None and cap is not None:
            g = grades
            bad &= (g[:, None, None] + g[None, :, None] + g[None, None, :]) <= cap
        hits = np.argwhere(bad)
        return tuple(int(x) for x in hits[0]) if len(hits) else None
    chunk = max(1, 2**22 // (d * d))
    for s in range(0, len(triples[0]), chunk):
        i, j, k = (a[s:s + chunk] for a in triples)
        lhs = np.einsum("tm,tml->tl", t[i, j], t[:, k].transpose(1, 0, 2))
        rhs = np.einsum("tm,tml->tl", t[j, k], t[i])
        bad = (np.rint(lhs - rhs).astype(np.int64) % orders).any(axis=1)
        if grades is not None and cap is not None:
            bad &= (grades[i] + grades[j] + grades[k]) <= cap
        hits = np.flatnonzero(bad)
        if len(hits):
            return int(i[hits[0]]), int(j[hits[0]]), int(k[hits[0]])
    return None


def build_ring(
    *,
    id: str,
    modulus: int,
    orders,
    table,
    one,
    labels,
    provenance: tuple,
    grades=None,
    cap: int | None = None,
    overflow=None,
    meta: dict | None = None,
    seed: int = 0,
) -> RingDescriptor:
    """Validate a structure table and freeze it into a descriptor.

    Associativity is checked on every basis triple up to rank 64 and on
    ``min(10*d**2, 20000)`` random triples above that; a defect aborts construction.
    """
    orders = _frozen(orders)
    d = len(orders)
    table = np.array(table, dtype=np.int64) % orders
    if overflow is not None:
        overflow = np.array(overflow, dtype=bool)
        table[overflow] = 0
        if not overflow.any():
            overflow = None
    table.setflags(write=False)
    if overflow is not None:
        overflow.setflags(write=False)
    if grades is not None:
        grades = _frozen(grades)
    one = _frozen(np.asarray(one) % orders)
    if table.shape != (d, d, d) or one.shape != (d,) or len(labels) != d:
        raise ConstructionError(f"inconsistent shapes for ring {id}")
    if any(modulus % int(m) for m in orders):
        raise ConstructionError("basis orders must divide the modulus")

    eye = np.eye(d, dtype=np.int64)
    left = np.einsum("i,ibc->cb", one, table) % orders[:, None]
    right = np.einsum("j,bjc->cb", one, table) % orders[:, None]
    if (left != eye % orders[:, None]).any() or (right != eye % orders[:, None]).any():
        raise ConstructionError(f"unity of {id} is not a two-sided identity")

    if d <= EXHAUSTIVE_ASSOC_LIMIT:
        bad = _assoc_defect(table, orders, grades=grades, cap=cap if overflow is not None else None)
    else:
        rng = np.random.default_rng(seed)
        n_samples = min(10 * d * d, MAX_ASSOC_SAMPLES)
        tri = tuple(rng.integers(0, d, n_samples) for _ in range(3))
        bad = _assoc_defect(table, orders, tri, grades=grades, cap=cap if overflow is not None else None)
    if bad is not None:
        raise ConstructionError(f"multiplication table of {id} is not associative at basis triple {bad}")

    return RingDescriptor(
        id=id,
        modulus=int(modulus),
        orders=orders,
        table=table,
        one=one,
        labels=tuple(labels),
        provenance=provenance,
        grades=grades,
        cap=cap,
        overflow=overflow,
        meta=meta or {},
    )


def make_modular_ring(n: int) -> RingDescriptor:
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise InvalidModulus(f"modulus must be an integer >= 2, got {n!r}")
    n = int(n)
    return build_ring(
        id=f"Z{n}",
        modulus=n,
        orders=[n],
        table=[[[1]]],
        one=[1],
        labels=["1"],
        provenance=("modular", n),
    )


def _is_product(R: RingDescriptor) -> bool:
    return R.kind == "product"


def make_product_ring(R1: RingDescriptor, R2: RingDescriptor) -> RingDescriptor:
    """Direct product with componentwise multiplication and unity (1, 1).

    Coefficients live in Z_lcm(m1, m2); each basis vector keeps the order of
    its factor, which is how mixed characteristics stay exact.
    """
    d1, d2 = R1.basis_size, R2.basis_size
    d = d1 + d2
    table = np.zeros((d, d, d), dtype=np.int64)
    table[:d1, :d1, :d1] = R1.table
    table[d1:, d1:, d1:] = R2.table
    overflow = None
    if R1.overflow is not None or R2.overflow is not None:
        overflow = np.zeros((d, d), dtype=bool)
        if R1.overflow is not None:
            overflow[:d1, :d1] = R1.overflow
        if R2.overflow is not None:
            overflow[d1:, d1:] = R2.overflow
    grades = cap = None
    if R1.grades is not None or R2.grades is not None:
        g1 = R1.grades if R1.grades is not None else np.zeros(d1, dtype=np.int64)
        g2 = R2.grades if R2.grades is not None else np.zeros(d2, dtype=np.int64)
        grades = np.concatenate([g1, g2])
        caps = [c for c in (R1.cap, R2.cap) if c is not None]
        cap = min(caps) if caps else None
    right_id = f"({R2.id})" if _is_product(R2) else R2.id
    labels = [f"({l},0)" for l in R1.labels] + [f"(0,{l})" for l in R2.labels]
    return build_ring(
        id=f"{R1.id} x {right_id}",
        modulus=math.lcm(R1.modulus, R2.modulus),
        orders=np.concatenate([R1.orders, R2.orders]),
        table=table,
        one=np.concatenate([R1.one, R2.one]),
        labels=labels,
        provenance=("product", R1.id, R2.id),
        grades=grades,
        cap=cap,
        overflow=overflow,
        meta={"factors": (R1, R2)},
    )


def make_opposite_ring(R: RingDescriptor) -> RingDescriptor:
    return build_ring(
        id=f"opp({R.id})",
        modulus=R.modulus,
        orders=R.orders,
        table=R.table.transpose(1, 0, 2),
        one=R.one,
        labels=R.labels,
        provenance=("opposite", R.id),
        grades=R.grades,
        cap=R.cap,
        overflow=None if R.overflow is None else R.overflow.T,
        meta={"base": R},
    )


def project(x: Element, factor: int) -> Element:
    """Projection of a product-ring element onto factor 0 or 1."""
    R = x.ring
    if R.kind != "product":
        raise ValueError(f"{R.id} is not a direct product")
    R1, R2 = R.meta["factors"]
    d1 = R1.basis_size
    if factor == 0:
        return R1.element(x.coeffs[:d1])
    return R2.element(x.coeffs[d1:])


def pair(x1: Element, x2: Element, R: RingDescriptor) -> Element:
    return R.element(tuple(x1.coeffs) + tuple(x2.coeffs))


def enumerate_elements(R: RingDescriptor, budget: int | None = None) -> Iterator[Element]:
    """All elements in lexicographic coefficient order (first coordinate most significant)."""
    limit = budgets().enumeration if budget is None else budget
    if R.size > limit:
        raise BudgetExceeded(f"{R.id} has {R.size} elements, enumeration budget is {limit}")
    for coeffs in itertools.product(*(range(int(m)) for m in R.orders)):
        yield Element(R, coeffs)


def element_array(R: RingDescriptor, budget: int | None = None) -> np.ndarray:
    """All elements as an ``(|R|, d)`` array, same order as :func:`enumerate_elements`."""
    limit = budgets().enumeration if budget is None else budget
    if R.size > limit:
        raise BudgetExceeded(f"{R.id} has {R.size} elements, enumeration budget is {limit}")
    grids = np.meshgrid(*(np.arange(int(m)) for m in R.orders), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1).astype(np.int64)
