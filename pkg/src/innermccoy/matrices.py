"""Matrix-shaped rings over a base ring, flattened to structure tables.

Every shape is described by *families*: 0/1 pattern matrices whose base-ring
multiples span the ring.  For full, upper triangular and block upper shapes a
family is a single matrix unit ``E_ij``; for DUT the whole diagonal is one
family (the identity pattern), so diagonal equality holds by construction.
The ring table is ``Lambda (x) T_base`` where ``Lambda`` decomposes products
of patterns back into families.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from innermccoy.errors import ConstructionError, InadmissiblePosition
from innermccoy.ring import Element, RingDescriptor, build_ring

SHAPE_KINDS = ("full", "upper_triangular", "dut", "block_upper")
_PREFIX = {"full": "M", "upper_triangular": "T", "dut": "DUT"}


@dataclass(frozen=True)
class MatrixShape:
    kind: str
    n: int
    partition: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in SHAPE_KINDS:
            raise ConstructionError(f"unknown matrix shape {self.kind!r}")
        if self.n < 1:
            raise ConstructionError("matrix size must be >= 1")
        if self.kind == "block_upper":
            if not self.partition or any(p < 1 for p in self.partition):
                raise ConstructionError("block partition entries must be >= 1")
            if sum(self.partition) != self.n:
                raise ConstructionError(
                    f"block partition {list(self.partition)} sums to {sum(self.partition)}, not {self.n}"
                )
        elif self.partition:
            raise ConstructionError("only block_upper shapes take a partition")

    @classmethod
    def full(cls, n: int) -> "MatrixShape":
        return cls("full", n)

    @classmethod
    def upper(cls, n: int) -> "MatrixShape":
        return cls("upper_triangular", n)

    @classmethod
    def dut(cls, n: int) -> "MatrixShape":
        return cls("dut", n)

    @classmethod
    def block(cls, *partition: int) -> "MatrixShape":
        return cls("block_upper", sum(partition), tuple(partition))

    @property
    def prefix(self) -> str:
        if self.kind == "block_upper":
            return "B[" + ",".join(str(p) for p in self.partition) + "]"
        return f"{_PREFIX[self.kind]}{self.n}"

    def _block_of(self, i: int) -> int:
        acc = 0
        for b, size in enumerate(self.partition):
            acc += size
            if i <= acc:
                return b
        raise IndexError(i)

    def admissible(self, i: int, j: int) -> bool:
        """1-based cell test."""
        if not (1 <= i <= self.n and 1 <= j <= self.n):
            return False
        if self.kind == "full":
            return True
        if self.kind in ("upper_triangular", "dut"):
            return i <= j
        return self._block_of(i) <= self._block_of(j)

    def families(self) -> list[tuple[str, np.ndarray, tuple[int, int]]]:
        """(label, pattern, representative cell) for each family, in basis order."""
        n = self.n
        out = []
        if self.kind == "dut":
            out.append(("I", np.eye(n, dtype=np.int64), (1, 1)))
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if not self.admissible(i, j) or (self.kind == "dut" and i == j):
                    continue
                pat = np.zeros((n, n), dtype=np.int64)
                pat[i - 1, j - 1] = 1
                out.append((f"E{i}{j}" if n < 10 else f"E{i},{j}", pat, (i, j)))
        return out


def _decompose(families, mat: np.ndarray) -> np.ndarray:
    coeffs = np.array([mat[r - 1, c - 1] for _, _, (r, c) in families], dtype=np.int64)
    rebuilt = sum(c * pat for c, (_, pat, _) in zip(coeffs, families))
    if not np.array_equal(rebuilt, mat):
        raise ConstructionError("shape is not closed under multiplication")
    return coeffs


def make_matrix_ring(R: RingDescriptor, shape: MatrixShape) -> RingDescriptor:
    fams = shape.families()
    nf, db = len(fams), R.basis_size
    lam = np.zeros((nf, nf, nf), dtype=np.int64)
    for x, (_, p1, _) in enumerate(fams):
        for y, (_, p2, _) in enumerate(fams):
            lam[x, y] = _decompose(fams, p1 @ p2)
    d = nf * db
    table = np.einsum("xyz,abc->xaybzc", lam, R.table).reshape(d, d, d)
    overflow = None
    if R.overflow is not None:
        hits = lam.any(axis=2)
        overflow = np.einsum("xy,ab->xayb", hits, R.overflow).reshape(d, d).astype(bool)
    one_fam = _decompose(fams, np.eye(shape.n, dtype=np.int64))
    one = np.kron(one_fam, R.one)
    labels = []
    for flabel, _, _ in fams:
        for blabel in R.labels:
            labels.append(flabel if blabel == "1" else f"{flabel}*{blabel}")
    return build_ring(
        id=f"{shape.prefix}({R.id})",
        modulus=R.modulus,
        orders=np.tile(R.orders, nf),
        table=table,
        one=one,
        labels=labels,
        provenance=("matrix", R.id, shape.n, shape.kind, shape.partition),
        grades=None if R.grades is None else np.tile(R.grades, nf),
        cap=R.cap,
        overflow=overflow,
        meta={"base": R, "shape": shape, "families": fams},
    )


def _matrix_meta(Rmat: RingDescriptor):
    if Rmat.kind != "matrix":
        raise ValueError(f"{Rmat.id} is not a matrix ring")
    return Rmat.meta["base"], Rmat.meta["shape"], Rmat.meta["families"]


def family_index(Rmat: RingDescriptor, i: int, j: int) -> int:
    base, shape, fams = _matrix_meta(Rmat)
    if not shape.admissible(i, j):
        raise InadmissiblePosition(f"cell ({i},{j}) is not admissible in {Rmat.id}")
    if shape.kind == "dut" and i == j:
        return 0
    for k, (_, _, cell) in enumerate(fams):
        if cell == (i, j):
            return k
    raise InadmissiblePosition(f"cell ({i},{j}) is not admissible in {Rmat.id}")


def basis_matrix(Rmat: RingDescriptor, i: int, j: int, v: Element | int = 1) -> Element:
    """The matrix with ``v`` at cell (i, j); on a DUT diagonal this is ``v*I``."""
    base, shape, fams = _matrix_meta(Rmat)
    if isinstance(v, int):
        v = base.scalar(v)
    if v.ring.id != base.id:
        raise ValueError(f"entry must live in {base.id}")
    k = family_index(Rmat, i, j)
    db = base.basis_size
    coeffs = np.zeros(Rmat.basis_size, dtype=np.int64)
    coeffs[k * db:(k + 1) * db] = v.vec
    return Rmat.element(coeffs)


def to_matrix(x: Element) -> list[list[Element]]:
    """Entries of a matrix-ring element as base-ring elements."""
    base, shape, fams = _matrix_meta(x.ring)
    db, n = base.basis_size, shape.n
    entries = np.zeros((n, n, db), dtype=np.int64)
    vec = x.vec
    for k, (_, pat, _) in enumerate(fams):
        entries += pat[:, :, None] * vec[k * db:(k + 1) * db][None, None, :]
    return [[base.element(entries[i, j]) for j in range(n)] for i in range(n)]


def from_matrix(Rmat: RingDescriptor, entries) -> Element:
    """Inverse of :func:`to_matrix`; rejects inadmissible or unequal-diagonal input."""
    base, shape, fams = _matrix_meta(Rmat)
    n, db = shape.n, base.basis_size
    arr = np.zeros((n, n, db), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            e = entries[i][j]
            arr[i, j] = e.vec if isinstance(e, Element) else base.scalar(int(e)).vec
    arr %= base.orders
    coeffs = np.concatenate([arr[r - 1, c - 1] for _, _, (r, c) in fams])
    x = Rmat.element(coeffs)
    back = np.array([[e.vec for e in row] for row in to_matrix(x)])
    if not np.array_equal(back, arr):
        raise InadmissiblePosition(f"matrix does not belong to {Rmat.id}")
    return x


def shape_membership(x: Element, shape: MatrixShape) -> bool:
    """Does a full-matrix-ring element lie in the given shape?"""
    _, own, _ = _matrix_meta(x.ring)
    if own.kind != "full" or own.n != shape.n:
        raise ValueError("shape_membership expects an element of the full matrix ring")
    ents = to_matrix(x)
    n = shape.n
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if not shape.admissible(i, j) and ents[i - 1][j - 1]:
                return False
    if shape.kind == "dut":
        diag = {ents[i][i] for i in range(n)}
        if len(diag) > 1:
            return False
    return True


def embed(x: Element, Rfull: RingDescriptor) -> Element:
    """Image of a shaped-matrix element in the full matrix ring over the same base."""
    return from_matrix(Rfull, to_matrix(x))
