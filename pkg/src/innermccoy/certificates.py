"""Declarative certificates: a ring, named inputs and checkable claims.

A certificate is a JSON record::

    {"id", "ring", "inputs": [{"name", "text", "ring"?}],
     "claims": [{"op", ..., "holds"}], "expected", "status",
     "witnesses": [...], "citation", "tags"?}

Each claim is evaluated exactly.  The result is ``pass`` when every claim
evaluates true, ``fail`` otherwise.  Replay additionally compares each
claim's value and detail with the recorded ``holds`` and ``witnesses`` and
the overall result with ``status``; a certificate meets its expectation
when it reproduces and the result matches ``expected`` (``pass`` or
``fail``; ``paper_discrepancy`` expects ``fail``, i.e. the published claim
did not check out and the recorded counter-evidence was reproduced).
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from innermccoy.annihilators import (
    componentwise_inner_witness,
    extract_scalar_dut,
    lift_inner_witness_dut,
    lift_inner_witness_t2,
    partner_space,
)
from innermccoy.dsl import build_ring_spec, lookup_presentation, parse_element, parse_laurent
from innermccoy.errors import WorkbenchError
from innermccoy.graded import check_confluence, idempotent_scan
from innermccoy.poly import LaurentPolynomial, Polynomial, sandwich
from innermccoy.properties import ELEMENTWISE, check_elementwise, check_mccoy_like
from innermccoy.ring import RingDescriptor

CORPUS_DIR = Path(__file__).with_name("corpus")
EXPECTED = ("pass", "fail", "paper_discrepancy")


@dataclass
class Certificate:
    id: str
    ring: str
    inputs: list[dict]
    claims: list[dict]
    expected: str
    status: str | None = None
    witnesses: list[dict] = field(default_factory=list)
    citation: str = ""
    tags: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.expected not in EXPECTED:
            raise ValueError(f"{self.id}: expected must be one of {EXPECTED}")

    @classmethod
    def from_json(cls, data: dict) -> "Certificate":
        return cls(
            id=data["id"],
            ring=data["ring"],
            inputs=list(data.get("inputs", [])),
            claims=list(data["claims"]),
            expected=data["expected"],
            status=data.get("status"),
            witnesses=list(data.get("witnesses", [])),
            citation=data.get("citation", ""),
            tags=list(data.get("tags", [])),
        )

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "ring": self.ring,
            "inputs": self.inputs,
            "claims": self.claims,
            "expected": self.expected,
            "status": self.status,
            "witnesses": self.witnesses,
            "citation": self.citation,
            "tags": self.tags,
        }

    @classmethod
    def load(cls, path: str | Path) -> "Certificate":
        return cls.from_json(json.loads(Path(path).read_text()))


# claim evaluation ---------------------------------------------------------


class _Context:
    def __init__(self, cert: Certificate):
        self.ring = build_ring_spec(cert.ring)
        self.values: dict[str, LaurentPolynomial] = {}
        for item in cert.inputs:
            R = build_ring_spec(item["ring"]) if "ring" in item else self.ring
            self.values[item["name"]] = parse_laurent(item["text"], R, self._env(R))

    def _env(self, R: RingDescriptor) -> dict:
        return {k: v for k, v in self.values.items() if v.ring.id == R.id}

    def ring_of(self, claim: dict) -> RingDescriptor:
        return build_ring_spec(claim["ring"]) if "ring" in claim else self.ring

    def value(self, text: str, R: RingDescriptor | None = None) -> LaurentPolynomial:
        if text in self.values and (R is None or self.values[text].ring.id == R.id):
            return self.values[text]
        R = R or self.ring
        return parse_laurent(text, R, self._env(R))

    def poly(self, text: str, R: RingDescriptor | None = None) -> Polynomial:
        """Polynomial form; a Laurent value is multiplied by the unit x**offset."""
        return self.value(text, R).poly

    def element(self, text: str, R: RingDescriptor):
        return parse_element(text, R, self._env(R))


def _space_detail(space) -> dict:
    w = space.witness
    return {"size": space.size, "witness": list(w) if w is not None else None}


def _zero(claim, ctx):
    v = ctx.value(claim["expr"], ctx.ring_of(claim))
    return v.is_zero(), {"value": str(v)}


def _equal(claim, ctx):
    R = ctx.ring_of(claim)
    lhs, rhs = ctx.value(claim["lhs"], R), ctx.value(claim["rhs"], R)
    return lhs == rhs, {"lhs": str(lhs), "rhs": str(rhs)}


def _sandwich_zero(claim, ctx):
    R = ctx.ring_of(claim)
    f, g = ctx.poly(claim["f"], R), ctx.poly(claim["g"], R)
    s = sandwich(f, g)
    return s.is_zero(), {"value": str(s)}


def _space(claim, ctx):
    R = ctx.ring_of(claim)
    f = ctx.poly(claim["f"], R)
    space = partner_space(f, claim["side"], int(claim.get("degree", 0)))
    detail = _space_detail(space)
    if space.meta.get("restricted"):
        detail["max_unknown_grade"] = space.meta["max_unknown_grade"]
    return space, detail


def _space_zero(claim, ctx):
    space, detail = _space(claim, ctx)
    return space.is_zero, detail


def _space_nonzero(claim, ctx):
    space, detail = _space(claim, ctx)
    holds = not space.is_zero
    if holds and "witness" in claim:
        R = ctx.ring_of(claim)
        want = ctx.poly(claim["witness"], R)
        got = Polynomial(R, np.asarray(space.witness).reshape(-1, R.basis_size))
        holds = got == want
        detail["witness_text"] = str(got)
    return holds, detail


def _sampled_inner(claim, ctx):
    R = ctx.ring_of(claim)
    d = ctx.element(claim["element"], R)
    rng = np.random.default_rng(int(claim.get("seed", 0)))
    samples = int(claim.get("samples", 200))
    deg = int(claim.get("max_degree", 3))
    top = R.cap - 1 if R.cap is not None else 0
    pool = np.flatnonzero((R.grades >= 1) & (R.grades <= top)) if R.grades is not None else np.array([])
    if len(pool) == 0:
        raise WorkbenchError(f"{R.id} has no positive-degree basis words below the cap")
    dpoly = Polynomial.constant(d)
    violations = []
    for t in range(samples):
        coeffs = np.zeros((deg + 1, R.basis_size), dtype=np.int64)
        while not coeffs.any():
            coeffs[:, pool] = rng.integers(0, R.orders[pool], size=(deg + 1, len(pool)))
        Q = Polynomial(R, coeffs)
        if not sandwich(Q, dpoly).is_zero():
            violations.append(t)
    return not violations, {"samples": samples, "violations": violations[:5]}


def _idempotents(claim, ctx):
    R = ctx.ring_of(claim)
    found = sorted(str(e) for e in idempotent_scan(R))
    return found == sorted(claim["expected"]), {"idempotents": found}


def _confluent(claim, ctx):
    P = lookup_presentation(claim["presentation"])
    report = check_confluence(P, int(claim["bound"]))
    return not report, {"unresolved": len(report), "first": report[0]["word"] if report else None}


def _normal_form(claim, ctx):
    P = lookup_presentation(claim["presentation"])
    nf = P.show(P.normal_form(P.parse(claim["input"])))
    return nf == claim["expected"], {"normal_form": nf}


def _property(claim, ctx):
    R = ctx.ring_of(claim)
    prop = claim["property"]
    if prop in ELEMENTWISE:
        rep = check_elementwise(R, prop, claim.get("mode", "exhaustive"))
    else:
        rep = check_mccoy_like(R, prop, int(claim.get("d_f", 2)), int(claim.get("d_g", 2)))
    detail = {"verdict": rep.verdict}
    if rep.witness:
        detail["witness"] = {k: v for k, v in rep.witness.items()
                             if not k.endswith("_coeffs") and k != "scalar_space"}
    return rep.verdict == claim["verdict"], detail


def _lift_t2(claim, ctx):
    R = ctx.ring_of(claim)
    D, case = lift_inner_witness_t2(ctx.poly(claim["F"], R), ctx.poly(claim["G"], R), with_case=True)
    holds = D == ctx.element(claim["expected"], R) and claim.get("case", case) == case
    return holds, {"D": str(D), "case": case}


def _lift_dut(claim, ctx):
    R = ctx.ring_of(claim)
    base = R.meta["base"]
    d = ctx.element(claim["d"], base) if "d" in claim else None
    G = ctx.poly(claim["G"], R) if "G" in claim else None
    D, case = lift_inner_witness_dut(ctx.poly(claim["F"], R), d, G, with_case=True)
    holds = D == ctx.element(claim["expected"], R) and claim.get("case", case) == case
    return holds, {"D": str(D), "case": case}


def _extract_dut(claim, ctx):
    R = ctx.ring_of(claim)
    d = extract_scalar_dut(ctx.poly(claim["F"], R), ctx.element(claim["D"], R))
    return d == ctx.element(claim["expected"], R.meta["base"]), {"d": str(d)}


def _componentwise(claim, ctx):
    R = ctx.ring_of(claim)
    w = componentwise_inner_witness(ctx.poly(claim["f"], R))
    return w is not None, {"witness": None if w is None else str(w)}


CLAIM_OPS: dict[str, Callable] = {
    "zero": _zero,
    "equal": _equal,
    "sandwich_zero": _sandwich_zero,
    "space_zero": _space_zero,
    "space_nonzero": _space_nonzero,
    "sampled_inner_annihilator": _sampled_inner,
    "idempotents": _idempotents,
    "confluent": _confluent,
    "normal_form": _normal_form,
    "property": _property,
    "lift_t2": _lift_t2,
    "lift_dut": _lift_dut,
    "extract_dut": _extract_dut,
    "componentwise_witness": _componentwise,
}


def evaluate_claim(claim: dict, ctx: _Context) -> tuple[bool, dict]:
    try:
        op = CLAIM_OPS[claim["op"]]
    except KeyError:
        raise ValueError(f"unknown claim op {claim.get('op')!r}") from None
    holds, detail = op(claim, ctx)
    return bool(holds), detail


# verification -------------------------------------------------------------


@dataclass
class CertificateResult:
    id: str
    expected: str
    result: str  # "pass", "fail" or "error"
    recorded_status: str | None
    claims: list[dict]
    reproduced: bool
    met: bool
    seconds: float
    error: str | None = None

    def to_json(self) -> dict:
        return {
            "kind": "certificate_result",
            "id": self.id,
            "expected": self.expected,
            "result": self.result,
            "recorded_status": self.recorded_status,
            "reproduced": self.reproduced,
            "met": self.met,
            "claims": self.claims,
            "seconds": round(self.seconds, 3),
            "error": self.error,
        }

    def summary(self) -> str:
        mark = "met" if self.met else ("ERROR" if self.result == "error" else "UNEXPECTED")
        head = f"{self.id}: {self.result} (expected {self.expected}, {mark}, {self.seconds:.2f}s)"
        lines = [head]
        for i, c in enumerate(self.claims):
            flag = "ok" if c["holds"] else "--"
            drift = "" if c["matches_record"] else "  [differs from record]"
            lines.append(f"  [{flag}] {i}: {c['op']}{drift}")
        if self.error:
            lines.append(f"  error: {self.error}")
        return "\n".join(lines)


def _evaluate(cert: Certificate) -> tuple[str, list[dict], list[dict]]:
    ctx = _Context(cert)
    outcomes, witnesses = [], []
    for i, claim in enumerate(cert.claims):
        holds, detail = evaluate_claim(claim, ctx)
        outcomes.append({"op": claim["op"], "holds": holds})
        witnesses.append({"claim": i, **detail})
    result = "pass" if all(o["holds"] for o in outcomes) else "fail"
    return result, outcomes, witnesses


def _jsonable(obj):
    return json.loads(json.dumps(obj))


def verify_certificate(cert: Certificate | dict) -> CertificateResult:
    if isinstance(cert, dict):
        cert = Certificate.from_json(cert)
    start = time.perf_counter()
    try:
        result, outcomes, witnesses = _evaluate(cert)
    except (WorkbenchError, ValueError, KeyError) as exc:
        return CertificateResult(cert.id, cert.expected, "error", cert.status, [], False, False,
                                 time.perf_counter() - start, f"{type(exc).__name__}: {exc}")
    witnesses = _jsonable(witnesses)
    recorded = {w.get("claim"): w for w in cert.witnesses}
    claims = []
    reproduced = result == cert.status
    for i, (claim, out) in enumerate(zip(cert.claims, outcomes)):
        same = out["holds"] == claim.get("holds") and (i not in recorded or recorded[i] == witnesses[i])
        reproduced &= same
        claims.append({**out, "recorded": claim.get("holds"), "matches_record": same, "detail": witnesses[i]})
    wanted = "pass" if cert.expected == "pass" else "fail"
    met = reproduced and result == wanted
    return CertificateResult(cert.id, cert.expected, result, cert.status, claims, reproduced, met,
                             time.perf_counter() - start)


def record_certificate(cert: Certificate) -> Certificate:
    """Fill ``status`` and ``witnesses`` from a fresh evaluation.

    Claim ``holds`` values are left as authored, so a record never hides a
    disagreement between the stated claim and the computation.
    """
    result, _, witnesses = _evaluate(cert)
    cert.status = result
    cert.witnesses = _jsonable(witnesses)
    return cert


# corpus -------------------------------------------------------------------


def load_corpus(directory: str | Path | None = None) -> list[Certificate]:
    directory = Path(directory) if directory is not None else CORPUS_DIR
    return [Certificate.load(p) for p in sorted(directory.glob("*.json"))]


def find_certificate(cert_id: str, directory: str | Path | None = None) -> Certificate:
    for cert in load_corpus(directory):
        if cert.id == cert_id:
            return cert
    raise KeyError(f"no certificate with id {cert_id!r}")


@dataclass
class CorpusSummary:
    results: list[CertificateResult]

    @property
    def exit_code(self) -> int:
        if any(r.result == "error" for r in self.results):
            return 2
        return 0 if all(r.met for r in self.results) else 1

    def counts(self) -> dict:
        out = {"total": len(self.results), "met": 0, "unexpected": 0, "errors": 0,
               "pass": 0, "fail": 0, "paper_discrepancy": 0}
        for r in self.results:
            out["met"] += r.met
            out["errors"] += r.result == "error"
            out["unexpected"] += (not r.met) and r.result != "error"
            out[r.expected] += 1
        return out

    def to_json(self) -> dict:
        return {"kind": "corpus_summary", "counts": self.counts(), "exit_code": self.exit_code,
                "results": [r.to_json() for r in self.results]}

    def summary(self) -> str:
        c = self.counts()
        lines = [r.summary().splitlines()[0] for r in self.results]
        lines.append(
            f"{c['total']} certificates: {c['met']} met, {c['unexpected']} unexpected, {c['errors']} errors "
            f"(expected pass {c['pass']}, fail {c['fail']}, paper_discrepancy {c['paper_discrepancy']})"
        )
        return "\n".join(lines)


def run_corpus(directory: str | Path | None = None, select: str | None = None) -> CorpusSummary:
    """Verify every certificate; ``select`` keeps ids containing it or carrying it as a tag."""
    certs = load_corpus(directory)
    if select:
        certs = [c for c in certs if select in c.id or select in c.tags]
    return CorpusSummary([verify_certificate(c) for c in certs])
