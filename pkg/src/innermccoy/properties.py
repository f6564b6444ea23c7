"""Elementwise and McCoy-type class checks with replayable reports.

McCoy-type checks never enumerate pairs.  For a fixed polynomial h the
partners {g : h*g*h = 0} (inner), {g : h*g = 0} (right) or {g : g*h = 0}
(left) form a kernel, as do the scalar annihilators; h violates the
property exactly when the partner kernel is nonzero and the scalar one is
zero.  Candidates h run by degree, then over a nonzero leading coefficient,
then lexicographically with the constant term most significant.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from innermccoy.annihilators import (
    annihilator_space,
    apply_side,
    image_tensor,
    partner_space,
    space_witness,
    system_matrix,
)
from innermccoy.config import budgets
from innermccoy.errors import BudgetExceeded, DegreeBudgetError
from innermccoy.graded import idempotent_scan
from innermccoy.linalg import batched_ranks_mod_p, kernels_nonzero, solve_kernel_mod
from innermccoy.poly import Polynomial
from innermccoy.ring import Element, RingDescriptor, element_array

ELEMENTWISE = ("reversible", "semicommutative", "ireversible", "trivial_idempotents")
MCCOY_LIKE = ("left_mccoy", "right_mccoy", "mccoy", "inner_mccoy")
_SIDES = {"inner_mccoy": ("inner",), "right_mccoy": ("right",), "left_mccoy": ("left",), "mccoy": ("right", "left")}

HOLDS_EXHAUSTIVE = "holds_exhaustive"
HOLDS_AT_BOUND = "holds_at_bound"
FAILS = "fails"


@dataclass
class PropertyReport:
    ring: str
    property: str
    mode: str
    verdict: str
    bounds: dict | None = None
    witness: dict | None = None
    seed: int | None = None
    trials: int | None = None
    checked: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def fails(self) -> bool:
        return self.verdict == FAILS

    def to_json(self) -> dict:
        return {
            "kind": "property_report",
            "ring": self.ring,
            "property": self.property,
            "mode": self.mode,
            "bounds": self.bounds,
            "verdict": self.verdict,
            "witness": self.witness,
            "seed": self.seed,
            "trials": self.trials,
            "checked": self.checked,
            "notes": list(self.notes),
        }

    def summary(self) -> str:
        head = f"{self.property} on {self.ring} [{self.mode}"
        if self.bounds:
            head += ", " + ", ".join(f"{k}={v}" for k, v in self.bounds.items())
        head += f"]: {self.verdict}"
        lines = [head, f"  candidates checked: {self.checked}"]
        if self.witness:
            for k, v in self.witness.items():
                if not k.endswith("_coeffs") and k != "scalar_space":
                    lines.append(f"  {k}: {v}")
        lines.extend(f"  note: {n}" for n in self.notes)
        return "\n".join(lines)


def _elem_json(R: RingDescriptor, vec) -> dict:
    vec = [int(v) for v in vec]
    return {"text": R.format_vec(vec), "coeffs": vec}


# elementwise --------------------------------------------------------------


def _kernel_rows(A: np.ndarray, R: RingDescriptor):
    return solve_kernel_mod(A, R.modulus, R.orders, np.tile(R.orders, A.shape[0] // R.basis_size))


def _left_mats(R: RingDescriptor, X: np.ndarray) -> np.ndarray:
    # (N, d, d): v -> a*v
    return np.einsum("ni,ibc->ncb", X, R.table)


def _right_mats(R: RingDescriptor, X: np.ndarray) -> np.ndarray:
    return np.einsum("nj,bjc->ncb", X, R.table)


def _sandwich_mats(R: RingDescriptor, X: np.ndarray) -> np.ndarray:
    # rows (i, c): v -> a*e_i*v for every basis e_i
    AE = np.einsum("na,aic->nic", X, R.table)
    return np.einsum("nic,cvz->nizv", AE, R.table).reshape(len(X), -1, R.basis_size)


def _first_escape(R, inner_mat, outer_mat) -> np.ndarray | None:
    """A generator of ker(inner_mat) outside ker(outer_mat), or None."""
    sp = _kernel_rows(inner_mat, R)
    for g in sp.generators:
        v = np.array(g, dtype=np.int64)
        if ((outer_mat @ v) % np.tile(R.orders, outer_mat.shape[0] // R.basis_size)).any():
            return v
    return None


def _candidate_rows(R: RingDescriptor, mode: str, trials: int, seed: int):
    if mode == "exhaustive":
        return element_array(R)
    rng = np.random.default_rng(seed)
    return rng.integers(0, R.orders, size=(trials, R.basis_size))


def _containment_check(R, prop, X):
    """First row a of X where ker(L_a) escapes ker(R_a) / ker(a*R*-)."""
    other = _right_mats if prop == "reversible" else _sandwich_mats
    prime = _is_prime(R.modulus) and R.uniform_orders
    chunk = max(1, 2**22 // max(1, R.basis_size ** 3))
    for start in range(0, len(X), chunk):
        Xs = X[start:start + chunk]
        L = _left_mats(R, Xs)
        O = other(R, Xs)
        if prime:
            r1 = batched_ranks_mod_p(L, R.modulus)
            r2 = batched_ranks_mod_p(np.concatenate([L, O], axis=1), R.modulus)
            bad = np.flatnonzero(r2 > r1)
            if len(bad) == 0:
                continue
            k = int(bad[0])
            return Xs[k], _first_escape(R, L[k], O[k])
        for k in range(len(Xs)):
            v = _first_escape(R, L[k], O[k])
            if v is not None:
                return Xs[k], v
    return None


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % p for p in range(2, int(n**0.5) + 1))


def _ireversible_failure(R, A, B):
    """First (a, b) with ab a nonzero idempotent and ba not idempotent."""
    T = R.table
    orders = R.orders
    for a in A:
        aT = np.einsum("i,ijc->jc", a, T)
        ab = (B @ aT) % orders
        ba = np.einsum("ni,j,ijc->nc", B, a, T) % orders
        ab2 = np.einsum("ni,nj,ijc->nc", ab, ab, T) % orders
        ba2 = np.einsum("ni,nj,ijc->nc", ba, ba, T) % orders
        bad = ab.any(axis=1) & (ab2 == ab).all(axis=1) & ~(ba2 == ba).all(axis=1)
        hit = np.flatnonzero(bad)
        if len(hit):
            return a, B[hit[0]], ab[hit[0]], ba[hit[0]]
    return None


def check_elementwise(R: RingDescriptor, prop: str, mode: str = "exhaustive", trials: int = 1000, seed: int = 0) -> PropertyReport:
    if prop not in ELEMENTWISE:
        raise ValueError(f"unknown elementwise property {prop!r}; choose from {ELEMENTWISE}")
    if mode not in ("exhaustive", "randomized"):
        raise ValueError("mode must be 'exhaustive' or 'randomized'")
    notes = []
    rep_seed = seed if mode == "randomized" else None
    rep_trials = trials if mode == "randomized" else None

    if prop == "trivial_idempotents":
        idem = idempotent_scan(R)
        nontrivial = sorted((e for e in idem if e != R.zero() and e != R.unity()), key=lambda e: e.coeffs)
        if R.grades is not None and R.cap is not None:
            notes.append(f"idempotents scanned among elements of degree <= {R.cap // 2}")
        witness = None
        if nontrivial:
            witness = {"idempotent": str(nontrivial[0]), "idempotent_coeffs": list(nontrivial[0].coeffs)}
        witness_all = sorted(str(e) for e in idem)
        notes.append("idempotents found: " + ", ".join(witness_all))
        return PropertyReport(R.id, prop, "exhaustive", FAILS if nontrivial else HOLDS_EXHAUSTIVE,
                              witness=witness, checked=len(idem), notes=notes)

    if R.is_strict:
        notes.append(f"evaluated on {R.truncated_quotient.id}, the quotient by degrees above {R.cap}")
        R = R.truncated_quotient
    X = _candidate_rows(R, mode, trials, seed)
    holds = HOLDS_EXHAUSTIVE if mode == "exhaustive" else HOLDS_AT_BOUND

    if prop in ("reversible", "semicommutative"):
        hit = _containment_check(R, prop, X)
        if hit is None:
            return PropertyReport(R.id, prop, mode, holds, seed=rep_seed, trials=rep_trials, checked=len(X), notes=notes)
        a, b = hit
        if prop == "reversible":
            ba = R.mul_vec(b, a)
            witness = {"a": _elem_json(R, a), "b": _elem_json(R, b), "ba": _elem_json(R, ba)}
        else:
            r = _first_middle(R, a, b)
            witness = {"a": _elem_json(R, a), "b": _elem_json(R, b), "r": _elem_json(R, r),
                       "arb": _elem_json(R, R.mul_vec(R.mul_vec(a, r), b))}
        return PropertyReport(R.id, prop, mode, FAILS, witness=witness, seed=rep_seed, trials=rep_trials,
                              checked=len(X), notes=notes)

    # ireversible: nonlinear in both arguments, so pairs are enumerated
    if mode == "exhaustive":
        if R.size**2 > budgets().enumeration:
            raise BudgetExceeded(f"{R.size}**2 pairs exceed the enumeration budget; use randomized mode")
        hit = _ireversible_failure(R, X, X)
        checked = R.size**2
    else:
        rng = np.random.default_rng(seed)
        Y = rng.integers(0, R.orders, size=(trials, R.basis_size))
        hit = _ireversible_failure(R, X, Y)
        checked = trials * trials
    if hit is None:
        return PropertyReport(R.id, prop, mode, holds, seed=rep_seed, trials=rep_trials, checked=checked, notes=notes)
    a, b, ab, ba = hit
    witness = {"a": _elem_json(R, a), "b": _elem_json(R, b), "ab": _elem_json(R, ab), "ba": _elem_json(R, ba)}
    return PropertyReport(R.id, prop, mode, FAILS, witness=witness, seed=rep_seed, trials=rep_trials,
                          checked=checked, notes=notes)


def _first_middle(R, a, b):
    for r in element_array(R):
        if R.mul_vec(R.mul_vec(a, r), b).any():
            return r
    raise AssertionError("no separating middle element")


# McCoy-type ---------------------------------------------------------------


def count_candidates(size: int, d_f: int) -> int:
    return sum((size - 1) * size**k for k in range(d_f + 1))


def candidate_batches(R: RingDescriptor, d_f: int, batch: int = 4096) -> Iterator[np.ndarray]:
    """Nonzero polynomials of degree <= d_f in candidate order, as (N, L, d) arrays.

    Within a degree the coefficient indices (into ``element_array`` order)
    form a mixed-radix number with the constant term most significant.
    """
    total = count_candidates(R.size, d_f)
    if total > budgets().enumeration:
        raise BudgetExceeded(f"{total} candidate polynomials exceed the enumeration budget")
    X = element_array(R)
    q = R.size
    for k in range(d_f + 1):
        count = (q - 1) * q**k
        for start in range(0, count, batch):
            idx = np.arange(start, min(start + batch, count), dtype=np.int64)
            digits = np.zeros((len(idx), k + 1), dtype=np.int64)
            rest = idx
            digits[:, k] = rest % (q - 1) + 1
            rest = rest // (q - 1)
            for pos in range(k - 1, -1, -1):
                digits[:, pos] = rest % q
                rest = rest // q
            yield X[digits]


def random_batches(R: RingDescriptor, d_f: int, trials: int, seed: int, batch: int = 4096) -> Iterator[np.ndarray]:
    rng = np.random.default_rng(seed)
    H = rng.integers(0, R.orders, size=(trials, d_f + 1, R.basis_size))
    H = H[H.reshape(trials, -1).any(axis=1)]
    for start in range(0, len(H), batch):
        yield H[start:start + batch]


def _fast_path_ok(R: RingDescriptor) -> bool:
    return R.uniform_orders and not R.is_strict


def _batch_flags(R: RingDescriptor, H: np.ndarray, side: str, d_g: int):
    """(scalar_nonzero, partner_nonzero) for a batch of candidates."""
    P = image_tensor(R, H, side)
    scal = kernels_nonzero(system_matrix(P, 0) % R.modulus, R.modulus)
    partner = scal.copy()
    todo = np.flatnonzero(~scal)
    if len(todo) and d_g > 0:
        partner[todo] = kernels_nonzero(system_matrix(P[todo], d_g) % R.modulus, R.modulus)
    return scal, partner


def _failure_witness(R: RingDescriptor, h: Polynomial, side: str, d_g: int) -> dict:
    scal = annihilator_space(h, side)
    part = partner_space(h, side, d_g)
    g = space_witness(R, part)
    return {
        "side": side,
        "f": str(h),
        "f_coeffs": h.coeffs.tolist(),
        "partner": str(g),
        "partner_coeffs": g.coeffs.tolist(),
        "scalar_space": scal.to_json(),
    }


def _scan(R, side, d_g, batches):
    """Yield (h array, scalar_nonzero, partner_nonzero) per candidate batch."""
    for H in batches:
        if _fast_path_ok(R):
            s, p = _batch_flags(R, H, side, d_g)
            yield H, s, p
            continue
        s = np.zeros(len(H), dtype=bool)
        p = np.zeros(len(H), dtype=bool)
        skipped = np.zeros(len(H), dtype=bool)
        for i, row in enumerate(H):
            h = Polynomial(R, row)
            try:
                s[i] = not annihilator_space(h, side).is_zero
                p[i] = s[i] or not partner_space(h, side, d_g, verify=False).is_zero
            except DegreeBudgetError:
                skipped[i] = True
        yield H[~skipped], s[~skipped], p[~skipped]


def check_mccoy_like(R: RingDescriptor, prop: str, d_f: int = 2, d_g: int = 2, mode: str = "exhaustive",
                     trials: int = 1000, seed: int = 0) -> PropertyReport:
    if prop not in MCCOY_LIKE:
        raise ValueError(f"unknown McCoy-type property {prop!r}; choose from {MCCOY_LIKE}")
    if mode not in ("exhaustive", "randomized"):
        raise ValueError("mode must be 'exhaustive' or 'randomized'")
    bounds = {"d_f": d_f, "d_g": d_g}
    notes = ["a holds verdict is evidence at these degree bounds only"]
    if prop == "left_mccoy" or prop == "mccoy":
        notes.append("left side: the fixed polynomial is the right factor, its partner the left factor")
    checked = 0
    report_mode = "degree_bounded" if mode == "exhaustive" else "randomized"
    for side in _SIDES[prop]:
        batches = candidate_batches(R, d_f) if mode == "exhaustive" else random_batches(R, d_f, trials, seed)
        for H, scal, partner in _scan(R, side, d_g, batches):
            checked += len(H)
            bad = np.flatnonzero(partner & ~scal)
            if len(bad):
                h = Polynomial(R, H[bad[0]])
                return PropertyReport(R.id, prop, report_mode, FAILS, bounds=bounds,
                                      witness=_failure_witness(R, h, side, d_g),
                                      seed=seed if mode == "randomized" else None,
                                      trials=trials if mode == "randomized" else None,
                                      checked=checked, notes=notes)
    return PropertyReport(R.id, prop, report_mode, HOLDS_AT_BOUND, bounds=bounds,
                          seed=seed if mode == "randomized" else None,
                          trials=trials if mode == "randomized" else None, checked=checked, notes=notes)


def partner_witnesses(R: RingDescriptor, side: str, d_f: int, d_g: int) -> Iterator[tuple[Polynomial, Polynomial]]:
    """Every candidate h (degree <= d_f) with a nonzero partner, paired with one partner.

    The partner is the lex-least scalar annihilator when one exists, else the
    lex-least partner polynomial of degree <= d_g.
    """
    X = element_array(R)
    for H, scal, partner in _scan(R, side, d_g, candidate_batches(R, d_f)):
        wit = _batch_scalar_witnesses(R, H[scal], side, X)
        k = 0
        for i in range(len(H)):
            if not partner[i]:
                continue
            h = Polynomial(R, H[i])
            if scal[i]:
                g = Polynomial.constant(Element(R, tuple(int(v) for v in X[wit[k]])))
                k += 1
            else:
                g = space_witness(R, partner_space(h, side, d_g))
            yield h, g


def _batch_scalar_witnesses(R, H, side, X) -> np.ndarray:
    """Index into X of the lex-least nonzero scalar annihilator of each h."""
    if len(H) == 0:
        return np.zeros(0, dtype=np.int64)
    P = image_tensor(R, H, side)  # (N, Lout, b, c)
    out = np.empty(len(H), dtype=np.int64)
    nz = X[1:]
    step = max(1, 2**22 // max(1, len(nz) * P.shape[1] * R.basis_size))
    for s in range(0, len(H), step):
        img = np.einsum("rb,ntbc->nrtc", nz, P[s:s + step]) % R.orders
        ok = ~img.reshape(img.shape[0], img.shape[1], -1).any(axis=2)
        out[s:s + step] = np.argmax(ok, axis=1) + 1
    return out


# replay -------------------------------------------------------------------


def replay_witness(R: RingDescriptor, report: PropertyReport | dict) -> bool:
    """Recompute a stored failure from its coefficient data; True when it reproduces."""
    rep = report.to_json() if isinstance(report, PropertyReport) else report
    if rep["verdict"] != FAILS:
        return False
    w = rep["witness"]
    prop = rep["property"]
    if R.is_strict and prop not in ("trivial_idempotents",) + MCCOY_LIKE:
        R = R.truncated_quotient
    if prop in MCCOY_LIKE:
        side = w["side"]
        h = Polynomial(R, w["f_coeffs"])
        g = Polynomial(R, w["partner_coeffs"])
        return (not g.is_zero()) and apply_side(h, g, side).is_zero() and annihilator_space(h, side).is_zero
    if prop == "trivial_idempotents":
        e = R.element(w["idempotent_coeffs"])
        return e * e == e and e != R.zero() and e != R.unity()
    a = R.element(w["a"]["coeffs"])
    b = R.element(w["b"]["coeffs"])
    if prop == "reversible":
        return not (a * b) and bool(b * a)
    if prop == "semicommutative":
        r = R.element(w["r"]["coeffs"])
        return not (a * b) and bool(a * r * b)
    ab, ba = a * b, b * a
    return bool(ab) and ab * ab == ab and ba * ba != ba
