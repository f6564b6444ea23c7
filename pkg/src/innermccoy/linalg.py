"""Exact kernels of integer matrices modulo n.

Z_n is not a field for composite n, so kernels are Z_n-submodules rather than
vector spaces.  They are computed through the Howell form (an echelon form
over Z_n with the extra property that, for every column j, the rows whose
pivot lies at or after j span every module element vanishing before j).
Applied to ``[A^T | I]`` that property hands the kernel over directly, and
applied to the kernel itself it gives a canonical basis whose last row is the
lexicographically least nonzero solution.

An independent brute-force path (:func:`kernel_by_enumeration`) is kept for
cross-checking on small systems.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from innermccoy.config import budgets
from innermccoy.errors import BudgetExceeded


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, s, t) with s*a + t*b == g == gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        return -a, -s0, -t0
    return a, s0, t0


def unit_normalizer(a: int, n: int) -> int:
    """A unit u of Z_n with u*a == gcd(a, n) (mod n)."""
    g = math.gcd(a, n)
    if g == n:
        return 1
    n1 = n // g
    u = pow((a // g) % n1, -1, n1) if n1 > 1 else 1
    while math.gcd(u, n) != 1:
        u += n1
    return u % n


def howell_form(rows: Sequence[Sequence[int]], n: int, ncols: int | None = None) -> list[list[int]]:
    """Howell form of the Z_n-row-module spanned by ``rows``.

    Pivots are normalised to divisors of n and entries above a pivot are
    reduced below it, so the result is unique for a given module.
    """
    A = [[int(x) % n for x in r] for r in rows]
    A = [r for r in A if any(r)]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    r = 0
    for j in range(ncols):
        if r >= len(A):
            break
        for i in range(r + 1, len(A)):
            b = A[i][j]
            if not b:
                continue
            a = A[r][j]
            g, s, t = xgcd(a, b)
            ag, bg = a // g, b // g
            Rr, Ri = A[r], A[i]
            A[r] = [(s * x + t * y) % n for x, y in zip(Rr, Ri)]
            A[i] = [(ag * y - bg * x) % n for x, y in zip(Rr, Ri)]
        p = A[r][j]
        if not p:
            continue
        u = unit_normalizer(p, n)
        if u != 1:
            A[r] = [(u * x) % n for x in A[r]]
            p = A[r][j]
        row = A[r]
        for i in range(r):
            q = A[i][j] // p
            if q:
                A[i] = [(x - q * y) % n for x, y in zip(A[i], row)]
        if p != 1:
            ann = [((n // p) * x) % n for x in row]
            if any(ann):
                A.append(ann)
        r += 1
    return [row for row in A[:r] if any(row)]


def _pivot(row: Sequence[int]) -> int:
    for j, x in enumerate(row):
        if x:
            return j
    return -1


@dataclass(frozen=True)
class SolutionSpace:
    """Solution module of a homogeneous system over Z_n.

    ``rows`` is the Howell basis in *scaled* coordinates: unknown u of
    additive order m_u is stored as ``(n // m_u) * value`` so every unknown
    lives in Z_n.  ``support`` maps unknown positions to ring basis indices
    when the space is attached to a ring.
    """

    modulus: int
    orders: tuple[int, ...]
    rows: tuple[tuple[int, ...], ...]
    ring_id: str | None = None
    support: tuple[int, ...] | None = None
    basis_size: int | None = None
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def n_unknowns(self) -> int:
        return len(self.orders)

    @property
    def is_zero(self) -> bool:
        return not self.rows

    def _unscale(self, row: Sequence[int]) -> tuple[int, ...]:
        n = self.modulus
        return tuple((x // (n // m)) % m for x, m in zip(row, self.orders))

    def _embed(self, vec: Sequence[int]) -> tuple[int, ...]:
        if self.support is None:
            return tuple(vec)
        out = [0] * self.basis_size
        for pos, v in zip(self.support, vec):
            out[pos] = v
        return tuple(out)

    @property
    def generators(self) -> list[tuple[int, ...]]:
        """Module generators in ring-basis coordinates."""
        return [self._embed(self._unscale(r)) for r in self.rows]

    @property
    def witness(self) -> tuple[int, ...] | None:
        """Lexicographically least nonzero solution, or None."""
        if not self.rows:
            return None
        return self._embed(self._unscale(self.rows[-1]))

    @property
    def size(self) -> int:
        n = self.modulus
        return math.prod(n // r[_pivot(r)] for r in self.rows)

    def vectors(self, budget: int | None = None) -> Iterator[tuple[int, ...]]:
        """Every solution, in ring-basis coordinates."""
        limit = budgets().enumeration if budget is None else budget
        if self.size > limit:
            raise BudgetExceeded(f"solution module has {self.size} elements (budget {limit})")
        n = self.modulus
        ranges = [range(n // r[_pivot(r)]) for r in self.rows]
        k = self.n_unknowns
        for cs in itertools.product(*ranges):
            acc = [0] * k
            for c, r in zip(cs, self.rows):
                if c:
                    acc = [(a + c * x) % n for a, x in zip(acc, r)]
            yield self._embed(self._unscale(acc))

    def vector_set(self, budget: int | None = None) -> set[tuple[int, ...]]:
        return set(self.vectors(budget))

    def contains(self, vec: Sequence[int]) -> bool:
        """Membership test by reducing against the Howell basis."""
        n = self.modulus
        if self.support is not None:
            sup = set(self.support)
            if any(v for i, v in enumerate(vec) if i not in sup and v):
                return False
            vec = [vec[i] for i in self.support]
        cur = [(int(v) % m) * (n // m) for v, m in zip(vec, self.orders)]
        for r in self.rows:
            j = _pivot(r)
            if cur[j] % r[j]:
                return False
            q = cur[j] // r[j]
            cur = [(x - q * y) % n for x, y in zip(cur, r)]
        return not any(cur)

    def to_json(self) -> dict:
        w = self.witness
        return {
            "ring": self.ring_id,
            "modulus": self.modulus,
            "support": list(self.support) if self.support is not None else None,
            "generators": [list(g) for g in self.generators],
            "witness": list(w) if w is not None else None,
            "is_zero": self.is_zero,
            "size": self.size,
            "meta": {k: v for k, v in self.meta.items() if isinstance(v, (bool, int, str))},
        }


def _scaled_system(matrix, n, var_orders, eq_orders):
    A = np.asarray(matrix, dtype=object) if not isinstance(matrix, np.ndarray) else matrix.astype(object)
    if A.ndim == 1:
        A = A.reshape(1, -1)
    m, k = A.shape
    if eq_orders is not None:
        scale = np.array([n // int(e) for e in eq_orders], dtype=object)
        A = A * scale[:, None]
    return A % n, m, k


def kernel_by_elimination(matrix, modulus: int, var_orders=None, eq_orders=None) -> SolutionSpace:
    n = int(modulus)
    A, m, k = _scaled_system(matrix, n, var_orders, eq_orders)
    var_orders = tuple(int(v) for v in var_orders) if var_orders is not None else (n,) * k
    if k > budgets().solver_unknowns:
        raise BudgetExceeded(f"{k} unknowns exceeds the solver budget")
    if k == 0:
        return SolutionSpace(n, (), ())
    At = A.T.tolist()
    aug = [list(map(int, At[i])) + [1 if c == i else 0 for c in range(k)] for i in range(k)]
    H = howell_form(aug, n, m + k)
    kern = [row[m:] for row in H if not any(row[:m])]
    if any(v != n for v in var_orders):
        # project each unknown to Z_{m_u}, then scale into Z_n
        kern = [[(x % mu) * (n // mu) for x, mu in zip(row, var_orders)] for row in kern]
    rows = howell_form(kern, n, k) if kern else []
    return SolutionSpace(n, var_orders, tuple(tuple(r) for r in rows))


def kernel_by_enumeration(matrix, modulus: int, var_orders=None, eq_orders=None) -> SolutionSpace:
    """Brute force: test every vector; limited to d*log2(n) <= 24."""
    n = int(modulus)
    A, m, k = _scaled_system(matrix, n, var_orders, eq_orders)
    var_orders = tuple(int(v) for v in var_orders) if var_orders is not None else (n,) * k
    total = math.prod(var_orders)
    if total > 2**24:
        raise BudgetExceeded(f"enumeration of {total} candidate vectors exceeds 2**24")
    A = A.astype(np.int64)
    grids = np.meshgrid(*(np.arange(v) for v in var_orders), indexing="ij")
    X = np.stack([g.ravel() for g in grids], axis=1).astype(np.int64) if k else np.zeros((1, 0), np.int64)
    ok = ~((X @ A.T) % n).any(axis=1) if m else np.ones(len(X), bool)
    sols = X[ok]
    scaled = [[int(x) * (n // mu) for x, mu in zip(row, var_orders)] for row in sols if row.any()]
    rows = howell_form(scaled, n, k) if scaled else []
    return SolutionSpace(n, var_orders, tuple(tuple(r) for r in rows))


def batched_ranks_mod_p(mats, p: int) -> np.ndarray:
    """Rank over F_p of every matrix in an (N, r, c) batch, by vectorised elimination."""
    A = np.asarray(mats, dtype=np.int64) % p
    N, r, c = A.shape
    inv = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        inv[a] = pow(a, -1, p)
    piv = np.zeros(N, dtype=np.int64)
    rows = np.arange(r)
    for j in range(c):
        cand = (A[:, :, j] != 0) & (rows[None, :] >= piv[:, None])
        has = cand.any(axis=1)
        if not has.any():
            continue
        idx = np.flatnonzero(has)
        s, t = np.argmax(cand, axis=1)[has], piv[has]
        tmp = A[idx, s].copy()
        A[idx, s] = A[idx, t]
        A[idx, t] = tmp * inv[tmp[:, j]][:, None] % p
        prow = A[idx, t]
        factors = A[idx, :, j] * (rows[None, :] > t[:, None])
        A[idx] = (A[idx] - factors[:, :, None] * prow[:, None, :]) % p
        piv[has] += 1
    return piv


def prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def kernels_nonzero(mats, modulus: int) -> np.ndarray:
    """Batched test: does each matrix have a nonzero kernel over Z_n?

    Over Z_{p^k} a kernel is nonzero exactly when the reduction mod p drops
    rank (scale a mod-p kernel vector by p^(k-1)); CRT splits general n.
    """
    mats = np.asarray(mats, dtype=np.int64)
    out = np.zeros(len(mats), dtype=bool)
    for p in prime_factors(modulus):
        out |= batched_ranks_mod_p(mats, p) < mats.shape[2]
    return out


def solve_kernel_mod(matrix, modulus: int, var_orders=None, eq_orders=None, method: str = "auto") -> SolutionSpace:
    """Kernel of ``matrix`` acting on column vectors over Z_n.

    ``eq_orders`` gives the additive order of each equation's target
    coordinate, ``var_orders`` that of each unknown (both default to n).
    ``method`` is ``"eliminate"``, ``"enumerate"`` or ``"auto"`` (elimination).
    """
    if method in ("auto", "eliminate"):
        return kernel_by_elimination(matrix, modulus, var_orders, eq_orders)
    if method == "enumerate":
        return kernel_by_enumeration(matrix, modulus, var_orders, eq_orders)
    raise ValueError(f"unknown method {method!r}")
