"""Free Z_2-algebras modulo homogeneous ideals, via monomial rewriting.

Words are tuples of generator indices; a free-algebra polynomial over Z_2 is
a frozenset of words.  Each relation is oriented toward its degree-lex
leading word (generator precedence is the declared generator order, later
generators larger), giving rules ``leading word -> sum of smaller words``.
Normal forms use leftmost reduction; critical-pair checking decides whether
that choice matters up to a degree bound.

Truncating at degree D yields a finite structure table whose products of
total degree above D are flagged as overflow (see ``ring.RingDescriptor``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

from innermccoy.config import budgets
from innermccoy.errors import BudgetExceeded, ConstructionError, RewriteBudgetError
from innermccoy.ring import Element, RingDescriptor, build_ring

Word = tuple[int, ...]
FreePoly = frozenset


def _xor(acc: set, words: Iterable[Word]) -> None:
    for w in words:
        if w in acc:
            acc.remove(w)
        else:
            acc.add(w)


class RewriteSystem:
    """Monomial rewriting rules over Z_2 on a fixed alphabet."""

    def __init__(self, generators: Sequence[str], rules: dict[Word, FreePoly], step_budget: int | None = None):
        self.generators = tuple(generators)
        self.rules = {tuple(k): frozenset(v) for k, v in rules.items()}
        self.lengths = sorted({len(k) for k in self.rules})
        self.step_budget = budgets().rewrite_steps if step_budget is None else step_budget
        self._cache: dict[Word, FreePoly] = {}

    @classmethod
    def from_text_rules(cls, generators: Sequence[str], rules: dict[str, str]) -> "RewriteSystem":
        gens = list(generators)
        return cls(gens, {parse_word(l, gens): parse_free_poly(r, gens) for l, r in rules.items()})

    def find_redex(self, w: Word) -> tuple[int, Word] | None:
        for i in range(len(w)):
            for L in self.lengths:
                if i + L <= len(w) and w[i:i + L] in self.rules:
                    return i, w[i:i + L]
        return None

    def is_irreducible(self, w: Word) -> bool:
        return self.find_redex(w) is None

    def rewrite_once(self, w: Word, pos: int, lhs: Word) -> FreePoly:
        pre, post = w[:pos], w[pos + len(lhs):]
        acc: set = set()
        _xor(acc, (pre + r + post for r in self.rules[lhs]))
        return frozenset(acc)

    def nf_word(self, w: Word) -> FreePoly:
        hit = self._cache.get(w)
        if hit is not None:
            return hit
        steps = 0
        result: set = set()
        stack = [w]
        while stack:
            u = stack.pop()
            known = self._cache.get(u)
            if known is not None:
                _xor(result, known)
                continue
            red = self.find_redex(u)
            if red is None:
                _xor(result, (u,))
                continue
            steps += 1
            if steps > self.step_budget:
                raise RewriteBudgetError(f"reduction of {self.show_word(w)} exceeded {self.step_budget} steps")
            stack.extend(self.rewrite_once(u, *red))
        out = frozenset(result)
        self._cache[w] = out
        return out

    def normal_form(self, poly: Iterable[Word]) -> FreePoly:
        acc: set = set()
        for w in poly:
            _xor(acc, self.nf_word(tuple(w)))
        return frozenset(acc)

    def show_word(self, w: Word) -> str:
        return "*".join(self.generators[i] for i in w) if w else "1"

    def show(self, poly: Iterable[Word]) -> str:
        words = sorted(poly, key=lambda w: (len(w), w))
        return " + ".join(self.show_word(w) for w in words) if words else "0"

    def overlaps(self, degree_bound: int) -> list[tuple[Word, FreePoly, FreePoly]]:
        """Every ambiguity up to ``degree_bound`` with its two one-step reducts."""
        out = []
        lhss = sorted(self.rules, key=lambda w: (len(w), w))
        for u in lhss:
            for v in lhss:
                # v is a proper factor of u
                if u != v and len(v) < len(u) and len(u) <= degree_bound:
                    for p in range(len(u) - len(v) + 1):
                        if u[p:p + len(v)] == v:
                            out.append((u, self.rewrite_once(u, 0, u), self.rewrite_once(u, p, v)))
                # suffix of u equals prefix of v
                for k in range(1, min(len(u), len(v))):
                    if u[-k:] == v[:k]:
                        w = u + v[k:]
                        if len(w) <= degree_bound:
                            out.append((w, self.rewrite_once(w, 0, u), self.rewrite_once(w, len(u) - k, v)))
        return out


def check_confluence(system: "RewriteSystem | Presentation", degree_bound: int) -> list[dict]:
    """Complete both sides of every overlap; report the pairs that disagree.

    An empty report means the rules are locally confluent on all ambiguities
    of length <= degree_bound.
    """
    rs = system.rewrite_system if isinstance(system, Presentation) else system
    report = []
    for w, left, right in rs.overlaps(degree_bound):
        a, b = rs.normal_form(left), rs.normal_form(right)
        if a != b:
            report.append({"word": rs.show_word(w), "left": rs.show(a), "right": rs.show(b)})
    return report


# parsing of free-algebra text ---------------------------------------------

_MONO = re.compile(r"^\s*([A-Za-z_][A-Za-z_0-9]*(\s*\*\s*[A-Za-z_][A-Za-z_0-9]*)*)\s*$")


def parse_word(text: str, gens: Sequence[str]) -> Word:
    text = text.strip()
    if text == "1":
        return ()
    if not _MONO.match(text):
        raise ValueError(f"not a monomial: {text!r}")
    out = []
    for name in (t.strip() for t in text.split("*")):
        if name not in gens:
            raise ValueError(f"unknown generator {name!r}")
        out.append(gens.index(name))
    return tuple(out)


def parse_free_poly(text: str, gens: Sequence[str]) -> FreePoly:
    text = text.strip()
    if text == "0":
        return frozenset()
    acc: set = set()
    for term in text.split("+"):
        _xor(acc, (parse_word(term, gens),))
    return frozenset(acc)


# presentations ------------------------------------------------------------


def deglex_key(w: Word) -> tuple:
    return (len(w), w)


@dataclass(frozen=True, eq=False)
class Presentation:
    """Generators of degree 1 and homogeneous Z_2 relations.

    Generator order doubles as precedence: a later generator is larger.
    """

    name: str
    generators: tuple[str, ...]
    relations: tuple[FreePoly, ...]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for rel in self.relations:
            degs = {len(w) for w in rel}
            if len(degs) > 1:
                raise ConstructionError(f"relation {self.show(rel)} is not homogeneous")

    @classmethod
    def from_text(cls, name: str, generators: Sequence[str], relations: Sequence[str]) -> "Presentation":
        gens = list(generators)
        return cls(name, tuple(gens), tuple(parse_free_poly(r, gens) for r in relations))

    def show(self, poly: Iterable[Word]) -> str:
        return RewriteSystem(self.generators, {}).show(poly)

    @cached_property
    def rewrite_system(self) -> RewriteSystem:
        rs = RewriteSystem(self.generators, {})
        for rel in self.relations:
            red = rs.normal_form(rel)
            if not red:
                continue
            lead = max(red, key=deglex_key)
            rs.rules[lead] = frozenset(red - {lead})
            rs.lengths = sorted({len(k) for k in rs.rules})
            rs._cache.clear()
        return rs

    @property
    def rules(self) -> dict[Word, FreePoly]:
        return self.rewrite_system.rules

    def normal_form(self, poly: Iterable[Word]) -> FreePoly:
        return self.rewrite_system.normal_form(poly)

    def parse(self, text: str) -> FreePoly:
        return parse_free_poly(text, self.generators)

    def irreducible_words(self, D: int) -> list[Word]:
        """All irreducible words of length <= D, by length then lexicographically."""
        rs = self.rewrite_system
        words = [()]
        layer = [()]
        limit = budgets().basis_limit
        for _ in range(D):
            nxt = []
            for w in layer:
                for g in range(len(self.generators)):
                    u = w + (g,)
                    # only suffixes ending at the new letter can be redexes
                    if not any(len(u) >= L and u[-L:] in rs.rules for L in rs.lengths):
                        nxt.append(u)
            words.extend(nxt)
            if len(words) > limit:
                raise BudgetExceeded(f"{self.name} has more than {limit} basis words up to degree {D}")
            layer = nxt
        return words

    def truncate(self, D: int) -> "TruncatedAlgebra":
        return TruncatedAlgebra(self, D)


def parse_presentation_file(text: str, name: str = "custom") -> Presentation:
    """``generators: c0 c1 ...`` and ``relations: p1; p2; ...`` lines."""
    gens: list[str] | None = None
    rels: list[str] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, val = line.partition(":")
        key = key.strip().lower()
        if key == "generators":
            gens = val.split()
        elif key == "relations":
            rels.extend(r for r in (p.strip() for p in val.split(";")) if r)
        elif key == "name":
            name = val.strip()
        else:
            raise ValueError(f"unknown presentation field {key!r}")
    if not gens:
        raise ValueError("presentation file has no generators line")
    return Presentation.from_text(name, gens, rels)


def _ex2() -> Presentation:
    rels = ["c0*d0", "c0*d1 + c1*d0", "c1*d1"]
    rels += [f"d{i}*d{j}" for i in range(2) for j in range(2)]
    rels += [f"d{i}*c{j}" for i in range(2) for j in range(2)]
    return Presentation.from_text("EX2", ["c0", "c1", "d0", "d1"], rels)


def _ex1() -> Presentation:
    rels = ["a0*b0", "a0*b1 + a1*b0", "a1*b1 + a2*b0", "a2*b1 + a3*b0", "a3*b1"]
    rels += [f"a0*a{j}" for j in range(4)]
    rels += [f"a3*a{j}" for j in range(4)]
    rels += [f"a1*a{j} + a2*a{j}" for j in range(4)]
    rels += [f"b{i}*b{j}" for i in range(2) for j in range(2)]
    rels += [f"b{i}*a{j}" for i in range(2) for j in range(4)]
    return Presentation.from_text("EX1", ["a0", "a1", "a2", "a3", "b0", "b1"], rels)


BUILTIN = {"EX2": _ex2, "EX1": _ex1}


@lru_cache(maxsize=None)
def builtin_presentation(name: str) -> Presentation:
    try:
        return BUILTIN[name]()
    except KeyError:
        raise ValueError(f"unknown presentation {name!r}; built-ins are {sorted(BUILTIN)}") from None


# truncation ---------------------------------------------------------------


class TruncatedAlgebra:
    """Irreducible words of degree <= D with an exact-below-the-cap table."""

    def __init__(self, presentation: Presentation, D: int):
        if D < 0:
            raise ValueError("truncation degree must be >= 0")
        self.presentation = presentation
        self.cap = D
        self.basis = presentation.irreducible_words(D)
        self.index = {w: i for i, w in enumerate(self.basis)}

    @property
    def basis_count(self) -> int:
        return len(self.basis)

    @cached_property
    def ring(self) -> RingDescriptor:
        P, D = self.presentation, self.cap
        d = len(self.basis)
        table = np.zeros((d, d, d), dtype=np.int64)
        overflow = np.zeros((d, d), dtype=bool)
        for i, u in enumerate(self.basis):
            for j, v in enumerate(self.basis):
                if len(u) + len(v) > D:
                    overflow[i, j] = True
                    continue
                for w in P.normal_form([u + v]):
                    table[i, j, self.index[w]] ^= 1
        one = np.zeros(d, dtype=np.int64)
        one[0] = 1
        rs = P.rewrite_system
        return build_ring(
            id=f"{P.name}@D={D}",
            modulus=2,
            orders=[2] * d,
            table=table,
            one=one,
            labels=[rs.show_word(w) for w in self.basis],
            provenance=("truncated_quotient", P.name, D),
            grades=[len(w) for w in self.basis],
            cap=D,
            overflow=overflow,
            meta={"algebra": self},
        )

    def element(self, poly: Iterable[Word] | str) -> Element:
        if isinstance(poly, str):
            poly = self.presentation.parse(poly)
        vec = np.zeros(len(self.basis), dtype=np.int64)
        for w in self.presentation.normal_form(poly):
            if len(w) > self.cap:
                raise BudgetExceeded(f"word of degree {len(w)} above the cap {self.cap}")
            vec[self.index[w]] ^= 1
        return self.ring.element(vec)

    def to_free(self, x: Element) -> FreePoly:
        return frozenset(self.basis[i] for i in np.flatnonzero(x.vec))


def homogeneous_components(x: Element) -> list[tuple[int, Element]]:
    """Split an element of a graded ring by degree, lowest first."""
    R = x.ring
    if R.grades is None:
        return [(0, x)] if x else []
    vec = x.vec
    out = []
    for deg in sorted(set(int(g) for g in R.grades)):
        part = np.where(R.grades == deg, vec, 0)
        if part.any():
            out.append((deg, R.element(part)))
    return out


BRUTE_FORCE_WORDS = 22


def idempotent_scan(R: RingDescriptor | TruncatedAlgebra) -> set[Element]:
    """Idempotents, restricted for graded rings to degrees <= cap // 2.

    The restriction keeps squaring exact.  Brute force is used up to 22
    retained basis vectors; past that, a Z_2-graded ring whose degree-0 part
    is spanned by 1 has only 0 and 1 (the lowest positive component of
    e or 1+e would have to equal a strictly higher-degree part of its square).
    """
    if isinstance(R, TruncatedAlgebra):
        R = R.ring
    if R.grades is not None and R.cap is not None:
        support = np.flatnonzero(R.grades <= R.cap // 2)
    else:
        support = np.arange(R.basis_size)
    if len(support) <= BRUTE_FORCE_WORDS:
        orders = R.orders[support]
        grids = np.meshgrid(*(np.arange(int(m)) for m in orders), indexing="ij")
        sub = np.stack([g.ravel() for g in grids], axis=1).astype(np.int64)
        X = np.zeros((len(sub), R.basis_size), dtype=np.int64)
        X[:, support] = sub
        sq = np.einsum("ta,tb,abc->tc", X, X, R.table) % R.orders
        hits = X[(sq == X).all(axis=1)]
        return {R.element(v) for v in hits}
    degree0 = np.flatnonzero(R.grades == 0) if R.grades is not None else np.array([])
    if R.grades is None or R.modulus != 2 or len(degree0) != 1 or R.one[degree0[0]] != 1:
        raise BudgetExceeded(
            f"{R.id}: {len(support)} basis vectors exceed brute force and the graded argument does not apply"
        )
    return {R.zero(), R.unity()}
