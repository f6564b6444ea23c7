"""Text syntax for rings and polynomials.

Ring specifications::

    spec  := term ('x' term)*                      (left associative)
    term  := 'Z' int | shape '(' spec ')' | 'opp' '(' spec ')'
           | name '@' ('D' | 'Q') '=' int | '(' spec ')'
    shape := 'M' int | 'T' int | 'DUT' int | 'B' '[' int (',' int)* ']'

``NAME@D=k`` is the strict truncation (products past degree k raise),
``NAME@Q=k`` the quotient view where they vanish.  Printing an AST gives
exactly the id of the ring it builds.

Polynomials use ``+ - * ^``, the indeterminate ``x``, integers, basis labels
and generator names, ``E<i><j>`` and ``I`` in matrix rings, ``[[..],[..]]``
matrix literals and ``(a, b)`` pairs in product rings.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from innermccoy.errors import DSLSyntaxError
from innermccoy.graded import Presentation, builtin_presentation
from innermccoy.matrices import MatrixShape, basis_matrix, from_matrix, make_matrix_ring
from innermccoy.poly import LaurentPolynomial, Polynomial
from innermccoy.ring import (
    Element,
    RingDescriptor,
    make_modular_ring,
    make_opposite_ring,
    make_product_ring,
)

MAX_EXPONENT = 10_000

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


@dataclass(frozen=True)
class Token:
    kind: str  # "int", "name", "sym", "end"
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # only trailing whitespace left
            break
        start = m.start(m.lastindex)
        if m.group(1):
            out.append(Token("int", m.group(1), start))
        elif m.group(2):
            out.append(Token("name", m.group(2), start))
        else:
            out.append(Token("sym", m.group(3), start))
        pos = m.end()
    out.append(Token("end", "", len(text)))
    return out


class _Cursor:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, message: str, tok: Token | None = None) -> DSLSyntaxError:
        tok = tok or self.tok
        return DSLSyntaxError(message, self.text, tok.pos)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("sym", "name") and self.tok.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            got = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, got {got!r}")
        return self.advance()

    def advance(self) -> Token:
        tok = self.tok
        self.i += 1
        return tok

    def integer(self) -> int:
        if self.tok.kind != "int":
            raise self.error(f"expected an integer, got {self.tok.text or 'end of input'!r}")
        return int(self.advance().text)

    def finish(self) -> None:
        if self.tok.kind != "end":
            raise self.error(f"unexpected {self.tok.text!r}")


# ring specifications ------------------------------------------------------


@dataclass(frozen=True)
class Modular:
    n: int


@dataclass(frozen=True)
class MatrixSpec:
    kind: str  # "M", "T", "DUT", "B"
    n: int
    partition: tuple[int, ...]
    inner: "RingSpec"


@dataclass(frozen=True)
class Opposite:
    inner: "RingSpec"


@dataclass(frozen=True)
class Product:
    left: "RingSpec"
    right: "RingSpec"


@dataclass(frozen=True)
class Truncated:
    name: str
    cap: int
    view: str = "D"


RingSpec = Modular | MatrixSpec | Opposite | Product | Truncated

_SHAPE_RE = re.compile(r"^(M|T|DUT)(\d+)$")
_MOD_RE = re.compile(r"^Z(\d+)$")


def parse_ring_spec(text: str) -> RingSpec:
    cur = _Cursor(text)
    spec = _spec(cur)
    cur.finish()
    return spec


def _spec(cur: _Cursor) -> RingSpec:
    left = _term(cur)
    while cur.at("x"):
        cur.advance()
        left = Product(left, _term(cur))
    return left


def _term(cur: _Cursor) -> RingSpec:
    tok = cur.tok
    if cur.at("("):
        cur.advance()
        inner = _spec(cur)
        cur.expect(")")
        return inner
    if tok.kind != "name":
        raise cur.error(f"expected a ring, got {tok.text or 'end of input'!r}")
    cur.advance()
    if tok.text == "opp":
        cur.expect("(")
        inner = _spec(cur)
        cur.expect(")")
        return Opposite(inner)
    if m := _MOD_RE.match(tok.text):
        return Modular(int(m.group(1)))
    if m := _SHAPE_RE.match(tok.text):
        cur.expect("(")
        inner = _spec(cur)
        cur.expect(")")
        return MatrixSpec(m.group(1), int(m.group(2)), (), inner)
    if tok.text == "B":
        cur.expect("[")
        parts = [cur.integer()]
        while cur.at(","):
            cur.advance()
            parts.append(cur.integer())
        cur.expect("]")
        cur.expect("(")
        inner = _spec(cur)
        cur.expect(")")
        return MatrixSpec("B", sum(parts), tuple(parts), inner)
    if cur.at("@"):
        cur.advance()
        view = cur.tok
        if view.kind != "name" or view.text not in ("D", "Q"):
            raise cur.error("expected 'D' or 'Q' after '@'")
        cur.advance()
        cur.expect("=")
        return Truncated(tok.text, cur.integer(), view.text)
    raise cur.error(f"unknown ring {tok.text!r}", tok)


def format_ring_spec(spec: RingSpec) -> str:
    match spec:
        case Modular(n):
            return f"Z{n}"
        case MatrixSpec("B", _, parts, inner):
            return "B[" + ",".join(map(str, parts)) + f"]({format_ring_spec(inner)})"
        case MatrixSpec(kind, n, _, inner):
            return f"{kind}{n}({format_ring_spec(inner)})"
        case Opposite(inner):
            return f"opp({format_ring_spec(inner)})"
        case Product(left, right):
            r = format_ring_spec(right)
            return f"{format_ring_spec(left)} x " + (f"({r})" if isinstance(right, Product) else r)
        case Truncated(name, cap, view):
            return f"{name}@{view}={cap}"
    raise TypeError(f"not a ring spec: {spec!r}")


_PRESENTATIONS: dict[str, Presentation] = {}


def register_presentation(p: Presentation) -> None:
    """Make a custom presentation available to ``NAME@D=k`` specs."""
    _PRESENTATIONS[p.name] = p
    _build.cache_clear()


def lookup_presentation(name: str) -> Presentation:
    if name in _PRESENTATIONS:
        return _PRESENTATIONS[name]
    try:
        return builtin_presentation(name)
    except ValueError as exc:
        raise DSLSyntaxError(str(exc)) from None


_SHAPES = {"M": MatrixShape.full, "T": MatrixShape.upper, "DUT": MatrixShape.dut}


@lru_cache(maxsize=256)
def _build(canonical: str) -> RingDescriptor:
    return _construct(parse_ring_spec(canonical))


def _construct(spec: RingSpec) -> RingDescriptor:
    match spec:
        case Modular(n):
            return make_modular_ring(n)
        case MatrixSpec("B", _, parts, inner):
            return make_matrix_ring(_build(format_ring_spec(inner)), MatrixShape.block(*parts))
        case MatrixSpec(kind, n, _, inner):
            return make_matrix_ring(_build(format_ring_spec(inner)), _SHAPES[kind](n))
        case Opposite(inner):
            return make_opposite_ring(_build(format_ring_spec(inner)))
        case Product(left, right):
            return make_product_ring(_build(format_ring_spec(left)), _build(format_ring_spec(right)))
        case Truncated(name, cap, view):
            R = lookup_presentation(name).truncate(cap).ring
            return R.truncated_quotient if view == "Q" else R
    raise TypeError(f"not a ring spec: {spec!r}")


def build_ring_spec(spec: RingSpec | str) -> RingDescriptor:
    """Construct (and cache) the ring described by a spec or its text."""
    if isinstance(spec, str):
        spec = parse_ring_spec(spec)
    return _build(format_ring_spec(spec))



# polynomials --------------------------------------------------------------


def _laurent_const(e: Element) -> LaurentPolynomial:
    return LaurentPolynomial(e.ring, 0, Polynomial.constant(e))


def _map_coeffs(f: LaurentPolynomial, target: RingDescriptor, fn) -> LaurentPolynomial:
    rows = [fn(f.ring.element(row)).vec for row in f.poly.coeffs]
    coeffs = np.array(rows, dtype=np.int64).reshape(-1, target.basis_size) if rows else None
    return LaurentPolynomial(target, f.offset, coeffs)


def _aligned(parts: list[LaurentPolynomial]) -> tuple[int, list[np.ndarray]]:
    """Common offset and equal-length coefficient arrays."""
    m = max(p.offset for p in parts)
    arrs = [p.poly.shift(m - p.offset).coeffs for p in parts]
    length = max((len(a) for a in arrs), default=0)
    out = []
    for p, a in zip(parts, arrs):
        pad = np.zeros((length, p.ring.basis_size), dtype=np.int64)
        pad[: len(a)] = a
        out.append(pad)
    return m, out


def _scalar_embedding(R: RingDescriptor):
    """(base ring, map base element -> R) for rings with a scalar base."""
    if R.kind == "matrix":
        base = R.meta["base"]
        n = R.meta["shape"].n

        def lift(e: Element) -> Element:
            return from_matrix(R, [[e if i == j else 0 for j in range(n)] for i in range(n)])

        return base, lift
    if R.kind == "opposite":
        return R.meta["base"], lambda e: R.element(e.coeffs)
    return None, None


_UNIT_RE = re.compile(r"^E(\d)(\d)$")


class _PolyParser:
    def __init__(self, text: str, env: dict | None = None):
        self.cur = _Cursor(text)
        self.env = env or {}

    # label lookup tries the longest run of name*name*... first so that
    # printed basis labels such as ``c0*d1`` read back as basis vectors
    def _label(self, R: RingDescriptor) -> Element | None:
        cur = self.cur
        index = R.meta.setdefault("_label_index", {l: i for i, l in enumerate(R.labels)})
        names = []
        k = 0
        while True:
            t = cur.peek(k)
            if t.kind not in ("name", "int"):
                break
            names.append(t.text)
            if cur.peek(k + 1).text != "*" or cur.peek(k + 1).kind != "sym":
                break
            k += 2
        for n in range(len(names), 0, -1):
            label = "*".join(names[:n])
            if label not in index or label == "1":
                continue
            follow = cur.peek(2 * n - 1)
            if n > 1 and follow.kind == "sym" and follow.text == "^":
                continue
            if names[0].isdigit():
                continue
            for _ in range(2 * n - 1):
                cur.advance()
            return R.basis_element(index[label])
        return None

    def _name(self, R: RingDescriptor, tok: Token) -> Element:
        name = tok.text
        index = R.meta.setdefault("_label_index", {l: i for i, l in enumerate(R.labels)})
        if name in index and name != "1":
            return R.basis_element(index[name])
        if R.kind == "matrix":
            if name == "I":
                return R.unity()
            if m := _UNIT_RE.match(name):
                return basis_matrix(R, int(m.group(1)), int(m.group(2)))
        base, lift = _scalar_embedding(R)
        if base is not None:
            return lift(self._name(base, tok))
        raise self.cur.error(f"unknown generator name {name!r} in {R.id}", tok)

    def parse(self, R: RingDescriptor) -> LaurentPolynomial:
        value = self.expr(R)
        self.cur.finish()
        return value

    def expr(self, R: RingDescriptor) -> LaurentPolynomial:
        cur = self.cur
        sign = 1
        if cur.at("-"):
            cur.advance()
            sign = -1
        value = self.term(R)
        if sign < 0:
            value = value * _laurent_const(R.scalar(-1))
        while cur.at("+") or cur.at("-"):
            op = cur.advance().text
            rhs = self.term(R)
            if op == "-":
                rhs = rhs * _laurent_const(R.scalar(-1))
            value = value + rhs
        return value

    def term(self, R: RingDescriptor) -> LaurentPolynomial:
        value = self.power(R)
        while self.cur.at("*"):
            self.cur.advance()
            value = value * self.power(R)
        return value

    def power(self, R: RingDescriptor) -> LaurentPolynomial:
        cur = self.cur
        is_x = cur.at("x") and not ("x" in self.env)
        value = self.atom(R)
        if not cur.at("^"):
            return value
        cur.advance()
        neg = False
        if cur.at("-"):
            cur.advance()
            neg = True
        tok = cur.tok
        k = cur.integer()
        if k > MAX_EXPONENT:
            raise cur.error(f"exponent {k} exceeds {MAX_EXPONENT}", tok)
        if is_x:
            one = R.unity()
            if neg:
                return LaurentPolynomial(R, k, Polynomial.constant(one))
            return LaurentPolynomial(R, 0, Polynomial.monomial(one, k))
        if neg:
            raise cur.error("negative exponents are only allowed on x", tok)
        out = _laurent_const(R.unity())
        for _ in range(k):
            out = out * value
        return out

    def atom(self, R: RingDescriptor) -> LaurentPolynomial:
        cur = self.cur
        tok = cur.tok
        if tok.kind == "int":
            cur.advance()
            return _laurent_const(R.scalar(int(tok.text)))
        if tok.kind == "name":
            if tok.text in self.env:
                cur.advance()
                value = self.env[tok.text]
                if isinstance(value, Polynomial):
                    value = LaurentPolynomial.from_polynomial(value)
                elif isinstance(value, Element):
                    value = _laurent_const(value)
                if value.ring.id != R.id:
                    raise cur.error(f"{tok.text!r} lives in {value.ring.id}, not {R.id}", tok)
                return value
            if tok.text == "x":
                cur.advance()
                return LaurentPolynomial(R, 0, Polynomial.x(R))
            found = self._label(R)
            if found is not None:
                return _laurent_const(found)
            cur.advance()
            return _laurent_const(self._name(R, tok))
        if cur.at("["):
            return self.matrix(R)
        if cur.at("("):
            if self._is_tuple():
                return self.tuple(R)
            cur.advance()
            value = self.expr(R)
            cur.expect(")")
            return value
        raise cur.error(f"unexpected {tok.text or 'end of input'!r}")

    def _is_tuple(self) -> bool:
        depth = 0
        k = 0
        while True:
            t = self.cur.peek(k)
            if t.kind == "end":
                return False
            if t.kind == "sym":
                if t.text in "([":
                    depth += 1
                elif t.text in ")]":
                    depth -= 1
                    if depth == 0:
                        return False
                elif t.text == "," and depth == 1:
                    return True
            k += 1

    def tuple(self, R: RingDescriptor) -> LaurentPolynomial:
        cur = self.cur
        open_tok = cur.tok
        if R.kind != "product":
            base, lift = _scalar_embedding(R)
            if base is None:
                raise cur.error(f"pair literal needs a product ring, not {R.id}", open_tok)
            return _map_coeffs(self.tuple(base), R, lift)
        R1, R2 = R.meta["factors"]
        cur.expect("(")
        a = self.expr(R1)
        cur.expect(",")
        b = self.expr(R2)
        cur.expect(")")
        m, (ca, cb) = _aligned([a, b])
        return LaurentPolynomial(R, m, np.concatenate([ca, cb], axis=1))

    def matrix(self, R: RingDescriptor) -> LaurentPolynomial:
        cur = self.cur
        open_tok = cur.tok
        if R.kind != "matrix":
            base, lift = _scalar_embedding(R)
            if base is None:
                raise cur.error(f"matrix literal needs a matrix ring, not {R.id}", open_tok)
            return _map_coeffs(self.matrix(base), R, lift)
        base = R.meta["base"]
        n = R.meta["shape"].n
        rows = []
        cur.expect("[")
        while True:
            cur.expect("[")
            row = [self.expr(base)]
            while cur.at(","):
                cur.advance()
                row.append(self.expr(base))
            cur.expect("]")
            rows.append(row)
            if not cur.at(","):
                break
            cur.advance()
        cur.expect("]")
        if len(rows) != n or any(len(r) != n for r in rows):
            dims = f"{len(rows)}x{max(len(r) for r in rows)}"
            raise cur.error(f"shape mismatch: {dims} literal for {R.id}", open_tok)
        flat = [e for row in rows for e in row]
        m, arrs = _aligned(flat)
        out = []
        for k in range(len(arrs[0])):
            ents = [[base.element(arrs[i * n + j][k]) for j in range(n)] for i in range(n)]
            out.append(from_matrix(R, ents).vec)
        coeffs = np.array(out, dtype=np.int64).reshape(-1, R.basis_size) if out else None
        return LaurentPolynomial(R, m, coeffs)


def parse_laurent(text: str, R: RingDescriptor, env: dict | None = None) -> LaurentPolynomial:
    return _PolyParser(text, env).parse(R)


def parse_polynomial(text: str, R: RingDescriptor, env: dict | None = None) -> Polynomial | LaurentPolynomial:
    """Polynomial over R, or a LaurentPolynomial when a negative power of x survives.

    ``env`` maps extra names to already-built values in the same ring.
    """
    value = parse_laurent(text, R, env)
    return value.poly if value.offset == 0 else value


def parse_element(text: str, R: RingDescriptor, env: dict | None = None) -> Element:
    value = parse_laurent(text, R, env)
    if value.offset or (value.poly.degree or 0) > 0:
        raise DSLSyntaxError(f"{text!r} is not a constant of {R.id}", text)
    return value.poly[0]

