"""Polynomials in one central indeterminate over a structure-constant ring.

Coefficients are stored as an ``(L, d)`` array, row k holding the coefficient
of x**k; trailing zero rows are trimmed so equal polynomials have equal
arrays.  Products keep the left factor's coefficients on the left, which is
all noncommutativity asks for because x itself is central.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from innermccoy.errors import DegreeBudgetError, RingMismatch
from innermccoy.ring import Element, RingDescriptor


def _trim(arr: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(arr.any(axis=1))
    return arr[: nz[-1] + 1] if len(nz) else arr[:0]


class Polynomial:
    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: RingDescriptor, coeffs=None):
        self.ring = ring
        if coeffs is None:
            arr = np.zeros((0, ring.basis_size), dtype=np.int64)
        else:
            arr = np.array(coeffs, dtype=np.int64).reshape(-1, ring.basis_size) % ring.orders
        arr = _trim(arr)
        arr.setflags(write=False)
        self.coeffs = arr

    @classmethod
    def from_elements(cls, ring: RingDescriptor, elems: Iterable[Element]) -> "Polynomial":
        rows = []
        for e in elems:
            if e.ring.id != ring.id:
                raise RingMismatch(f"{e.ring.id} vs {ring.id}")
            rows.append(e.coeffs)
        return cls(ring, rows if rows else None)

    @classmethod
    def constant(cls, e: Element) -> "Polynomial":
        return cls(e.ring, [e.coeffs])

    @classmethod
    def monomial(cls, e: Element, k: int) -> "Polynomial":
        rows = np.zeros((k + 1, e.ring.basis_size), dtype=np.int64)
        rows[k] = e.coeffs
        return cls(e.ring, rows)

    @classmethod
    def x(cls, ring: RingDescriptor) -> "Polynomial":
        return cls.monomial(ring.unity(), 1)

    @property
    def degree(self) -> int | None:
        """None for the zero polynomial."""
        return len(self.coeffs) - 1 if len(self.coeffs) else None

    def is_zero(self) -> bool:
        return len(self.coeffs) == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, k: int) -> Element:
        if 0 <= k < len(self.coeffs):
            return Element(self.ring, tuple(int(c) for c in self.coeffs[k]))
        return self.ring.zero()

    def elements(self) -> list[Element]:
        return [self[k] for k in range(len(self.coeffs))]

    def max_grade(self) -> int:
        if self.ring.grades is None or self.is_zero():
            return 0
        used = self.coeffs.any(axis=0)
        return int(self.ring.grades[used].max()) if used.any() else 0

    def _check(self, other: "Polynomial") -> None:
        if other.ring.id != self.ring.id:
            raise RingMismatch(f"{self.ring.id} vs {other.ring.id}")

    def _lift(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, Element):
            if other.ring.id != self.ring.id:
                raise RingMismatch(f"{self.ring.id} vs {other.ring.id}")
            return Polynomial.constant(other)
        if isinstance(other, int):
            return Polynomial.constant(self.ring.scalar(other))
        raise TypeError(f"cannot combine Polynomial with {type(other).__name__}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return other.ring.id == self.ring.id and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self) -> int:
        return hash((self.ring.id, self.coeffs.tobytes(), self.coeffs.shape))

    def __add__(self, other) -> "Polynomial":
        other = self._lift(other)
        L = max(len(self), len(other))
        out = np.zeros((L, self.ring.basis_size), dtype=np.int64)
        out[: len(self)] += self.coeffs
        out[: len(other)] += other.coeffs
        return Polynomial(self.ring, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.ring, -self.coeffs)

    def __sub__(self, other) -> "Polynomial":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "Polynomial":
        return self._lift(other) - self

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, int):
            return Polynomial(self.ring, self.coeffs * other)
        return poly_mul(self, self._lift(other))

    def __rmul__(self, other) -> "Polynomial":
        if isinstance(other, int):
            return Polynomial(self.ring, self.coeffs * other)
        return poly_mul(self._lift(other), self)

    def __pow__(self, k: int) -> "Polynomial":
        out = Polynomial.constant(self.ring.unity())
        for _ in range(k):
            out = out * self
        return out

    def shift(self, k: int) -> "Polynomial":
        """Multiply by x**k."""
        if self.is_zero() or k == 0:
            return self
        pad = np.zeros((k, self.ring.basis_size), dtype=np.int64)
        return Polynomial(self.ring, np.vstack([pad, self.coeffs]))

    def substitute_power(self, k: int) -> "Polynomial":
        """f(x**k)."""
        if self.is_zero():
            return self
        if k == 0:
            return Polynomial(self.ring, [self.coeffs.sum(axis=0)])
        out = np.zeros(((len(self) - 1) * k + 1, self.ring.basis_size), dtype=np.int64)
        out[::k] = self.coeffs
        return Polynomial(self.ring, out)

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        terms = []
        for k, row in enumerate(self.coeffs):
            if not row.any():
                continue
            c = self.ring.format_vec(row)
            if k == 0:
                terms.append(c)
                continue
            xk = "x" if k == 1 else f"x^{k}"
            if c == "1":
                terms.append(xk)
            elif " + " in c:
                terms.append(f"({c})*{xk}")
            else:
                terms.append(f"{c}*{xk}")
        return " + ".join(terms)

    def __repr__(self) -> str:
        return f"Polynomial({self.ring.id}: {self})"


def poly_mul(f: Polynomial, g: Polynomial) -> Polynomial:
    """Convolution sum_{i+j=k} f_i g_j, exact over the coefficient ring."""
    if f.ring.id != g.ring.id:
        raise RingMismatch(f"{f.ring.id} vs {g.ring.id}")
    R = f.ring
    if f.is_zero() or g.is_zero():
        return Polynomial(R)
    if R.overflow is not None:
        used_f = f.coeffs.any(axis=0)
        used_g = g.coeffs.any(axis=0)
        if R.overflow[np.ix_(used_f, used_g)].any():
            raise DegreeBudgetError(f"polynomial product in {R.id} exceeds the retained degree {R.cap}")
    ft = np.einsum("ia,abc->ibc", f.coeffs, R.table)
    prod = np.einsum("ibc,jb->ijc", ft, g.coeffs)
    Lf, Lg = len(f), len(g)
    out = np.zeros((Lf + Lg - 1, R.basis_size), dtype=np.int64)
    for i in range(Lf):
        out[i:i + Lg] += prod[i]
    return Polynomial(R, out)


def sandwich(f: Polynomial, g) -> Polynomial:
    """f*g*f, evaluated as f*(g*f)."""
    if not isinstance(g, Polynomial):
        g = f._lift(g)
    return poly_mul(f, poly_mul(g, f))


# Laurent ------------------------------------------------------------------


class LaurentPolynomial:
    """sum_i coeffs[i] x**(i - offset); offset >= 0 and canonical.

    When the lowest exponent is negative the offset equals minus that
    exponent; otherwise the offset is 0 and low-order zeros are kept.
    """

    __slots__ = ("ring", "offset", "poly")

    def __init__(self, ring: RingDescriptor, offset: int, coeffs=None):
        p = coeffs if isinstance(coeffs, Polynomial) else Polynomial(ring, coeffs)
        if p.is_zero():
            offset = 0
        else:
            low = int(np.flatnonzero(p.coeffs.any(axis=1))[0])
            lowest = low - offset
            if lowest >= 0:
                p = Polynomial(ring, p.coeffs[offset:]) if offset else p
                offset = 0
            else:
                p = Polynomial(ring, p.coeffs[low:])
                offset = -lowest
        self.ring = ring
        self.offset = offset
        self.poly = p

    @classmethod
    def from_polynomial(cls, p: Polynomial) -> "LaurentPolynomial":
        return cls(p.ring, 0, p)

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def __mul__(self, other) -> "LaurentPolynomial":
        if isinstance(other, Element):
            other = LaurentPolynomial(self.ring, 0, Polynomial.constant(other))
        if isinstance(other, Polynomial):
            other = LaurentPolynomial.from_polynomial(other)
        return LaurentPolynomial(self.ring, self.offset + other.offset, poly_mul(self.poly, other.poly))

    def __add__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        m = max(self.offset, other.offset)
        a = self.poly.shift(m - self.offset)
        b = other.poly.shift(m - other.offset)
        return LaurentPolynomial(self.ring, m, a + b)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentPolynomial):
            return NotImplemented
        return self.offset == other.offset and self.poly == other.poly

    def __hash__(self) -> int:
        return hash((self.offset, self.poly))

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        terms = []
        for k, row in enumerate(self.poly.coeffs):
            if not row.any():
                continue
            e = k - self.offset
            c = self.ring.format_vec(row)
            if e == 0:
                terms.append(c)
                continue
            xe = "x" if e == 1 else f"x^{e}"
            terms.append(xe if c == "1" else (f"({c})*{xe}" if " + " in c else f"{c}*{xe}"))
        return " + ".join(terms)

    def __repr__(self) -> str:
        return f"LaurentPolynomial({self.ring.id}: {self})"


def laurent_to_poly(f: LaurentPolynomial) -> tuple[int, Polynomial]:
    """(m, x**m * f) with m the canonical offset."""
    return f.offset, f.poly


# bivariate ----------------------------------------------------------------


class BivariatePolynomial:
    """F(y) = sum_i f_i y**i with every f_i in R[x]."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: RingDescriptor, coeffs: Sequence[Polynomial] = ()):
        cs = list(coeffs)
        for c in cs:
            if c.ring.id != ring.id:
                raise RingMismatch(f"{c.ring.id} vs {ring.id}")
        while cs and cs[-1].is_zero():
            cs.pop()
        self.ring = ring
        self.coeffs = tuple(cs)

    @classmethod
    def from_array(cls, ring: RingDescriptor, arr) -> "BivariatePolynomial":
        """``arr[t][s]`` is the base vector of x**s y**t."""
        arr = np.asarray(arr, dtype=np.int64)
        if arr.ndim == 2:
            arr = arr[:, :, None]
        return cls(ring, [Polynomial(ring, row) for row in arr])

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def y_degree(self) -> int | None:
        return len(self.coeffs) - 1 if self.coeffs else None

    def coefficient(self, i: int) -> Polynomial:
        return self.coeffs[i] if i < len(self.coeffs) else Polynomial(self.ring)

    def __add__(self, other: "BivariatePolynomial") -> "BivariatePolynomial":
        L = max(len(self.coeffs), len(other.coeffs))
        return BivariatePolynomial(self.ring, [self.coefficient(i) + other.coefficient(i) for i in range(L)])

    def __neg__(self) -> "BivariatePolynomial":
        return BivariatePolynomial(self.ring, [-c for c in self.coeffs])

    def __sub__(self, other: "BivariatePolynomial") -> "BivariatePolynomial":
        return self + (-other)

    def __mul__(self, other: "BivariatePolynomial") -> "BivariatePolynomial":
        if self.is_zero() or other.is_zero():
            return BivariatePolynomial(self.ring)
        out = [Polynomial(self.ring) for _ in range(len(self.coeffs) + len(other.coeffs) - 1)]
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                if not b.is_zero():
                    out[i + j] = out[i + j] + poly_mul(a, b)
        return BivariatePolynomial(self.ring, out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BivariatePolynomial):
            return NotImplemented
        return self.ring.id == other.ring.id and self.coeffs == other.coeffs

    def support(self) -> set[tuple[int, int]]:
        """{(s, t)}: exponent s of x, t of y, over nonzero coefficients."""
        out = set()
        for t, c in enumerate(self.coeffs):
            for s in np.flatnonzero(c.coeffs.any(axis=1)):
                out.add((int(s), t))
        return out

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for t, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            yt = "" if t == 0 else ("*y" if t == 1 else f"*y^{t}")
            parts.append(f"({c}){yt}")
        return " + ".join(parts)


def _deg0(p: Polynomial) -> int:
    # deg_x(0) is taken as 0 only here
    return p.degree if p.degree is not None else 0


def flatten_k(F: BivariatePolynomial, G: BivariatePolynomial) -> int:
    """sum_i deg_x(f_i) + 2 sum_j deg_x(g_j), for the relation G F G = 0."""
    return sum(_deg0(f) for f in F.coeffs) + 2 * sum(_deg0(g) for g in G.coeffs)


def flatten(F: BivariatePolynomial, k: int) -> Polynomial:
    """Image under y -> x**k."""
    if k < 0:
        raise ValueError("k must be >= 0")
    out = Polynomial(F.ring)
    for i, f in enumerate(F.coeffs):
        out = out + f.shift(k * i)
    return out


def collision_free(points: Iterable[tuple[int, int]], k: int) -> bool:
    """Is (s, t) -> s + k*t injective on ``points``?"""
    pts = set(points)
    return len({s + k * t for s, t in pts}) == len(pts)


# several variables --------------------------------------------------------
# Multivariate polynomials are plain dicts {exponent tuple: Element}; there
# is no dedicated type, each variable is removed by one bivariate step.


def eliminate_last_variable(terms: dict, k: int) -> dict:
    """Substitute x_v -> x_{v-1}**k."""
    out: dict = {}
    for exps, c in terms.items():
        *rest, last = exps
        rest[-1] += k * last
        key = tuple(rest)
        out[key] = out[key] + c if key in out else c
    return {e: c for e, c in out.items() if c}


def last_variable_k(F: dict, G: dict) -> int:
    """Flattening exponent for x_v -> x_{v-1}**k, F and G in the roles of flatten_k.

    The y-coefficients are the groups of terms sharing the exponent of x_v;
    their x-degree is the largest exponent of x_{v-1} within the group.
    """

    def total(P: dict) -> int:
        groups: dict = {}
        for exps, c in P.items():
            if c:
                groups[exps[-1]] = max(groups.get(exps[-1], 0), exps[-2])
        return sum(groups.values())

    return total(F) + 2 * total(G)


def to_univariate(terms: dict, ring: RingDescriptor) -> Polynomial:
    L = max((e[0] for e in terms), default=-1) + 1
    arr = np.zeros((max(L, 0), ring.basis_size), dtype=np.int64)
    for (e,), c in terms.items():
        arr[e] += c.vec
    return Polynomial(ring, arr)


def flatten_multivariate(F: dict, G: dict, ring: RingDescriptor) -> tuple[Polynomial, Polynomial, list[int]]:
    """Collapse F, G in R[x_1..x_v] to R[x_1] by repeated elimination.

    Returns the univariate images and the exponents used, last variable first.
    """
    nvars = len(next(iter({**F, **G})))
    ks = []
    for _ in range(nvars - 1):
        k = last_variable_k(F, G)
        ks.append(k)
        F, G = eliminate_last_variable(F, k), eliminate_last_variable(G, k)
    return to_univariate(F, ring), to_univariate(G, ring), ks
