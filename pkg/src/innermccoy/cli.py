"""``innermccoy`` command line.

Exit codes: 0 success (or all expectations met), 1 a property fails or a
certificate is unexpected, 2 bad input or construction error, 3 budget
exceeded.  Budgets come from the ``INNERMCCOY_*`` environment variables
(see :mod:`innermccoy.config`).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from innermccoy.annihilators import SIDES, apply_side, partner_space, space_witness, vector_to_polynomial
from innermccoy.certificates import find_certificate, run_corpus, verify_certificate
from innermccoy.dsl import build_ring_spec, lookup_presentation, parse_polynomial
from innermccoy.errors import BudgetExceeded, WorkbenchError
from innermccoy.graded import check_confluence, parse_presentation_file
from innermccoy.poly import LaurentPolynomial
from innermccoy.properties import ELEMENTWISE, MCCOY_LIKE, check_elementwise, check_mccoy_like

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3
SCHEMA_DIR = Path(__file__).with_name("schemas")


def load_schema(kind: str) -> dict:
    """JSON schema for a report ``kind`` (or ``certificate`` for corpus files)."""
    return json.loads((SCHEMA_DIR / f"{kind}.json").read_text())


def _presentation(name: str):
    path = Path(name)
    if path.is_file():
        return parse_presentation_file(path.read_text(), name=path.stem)
    return lookup_presentation(name)


def cmd_check(args) -> tuple[dict, str, int]:
    R = build_ring_spec(args.ring)
    if args.property in ELEMENTWISE:
        mode = "exhaustive" if args.mode == "exhaustive" else "randomized"
        rep = check_elementwise(R, args.property, mode, args.trials, args.seed)
    else:
        rep = check_mccoy_like(R, args.property, args.df, args.dg, args.mode, args.trials, args.seed)
    return rep.to_json(), rep.summary(), EXIT_FAIL if rep.fails else EXIT_OK


def cmd_annihilate(args) -> tuple[dict, str, int]:
    R = build_ring_spec(args.ring)
    f = parse_polynomial(args.poly, R)
    shift = 0
    if isinstance(f, LaurentPolynomial):
        shift, f = f.offset, f.poly
    space = partner_space(f, args.side, args.degree, args.method)
    g = space_witness(R, space)
    verified = g is not None and apply_side(f, g, args.side).is_zero()
    out = {
        "kind": "solution_space",
        "ring": R.id,
        "side": args.side,
        "f": str(f),
        "x_shift": shift,
        "degree": args.degree,
        "space": space.to_json(),
        "witness_text": None if g is None else str(g),
        "verified": verified,
    }
    lines = [f"{args.side} annihilators of {f} in {R.id}[x] (degree <= {args.degree})"]
    if shift:
        lines.append(f"  input multiplied by x^{shift} to clear negative powers")
    lines.append(f"  size: {space.size}")
    if space.meta.get("restricted"):
        lines.append(f"  unknowns restricted to grade <= {space.meta['max_unknown_grade']}")
    lines.append("  zero space" if g is None else f"  witness: {g} (replayed: {'ok' if verified else 'FAILED'})")
    for vec in space.generators:
        lines.append(f"  generator: {vector_to_polynomial(R, vec)}")
    return out, "\n".join(lines), EXIT_OK


def cmd_certify(args) -> tuple[dict, str, int]:
    cert = find_certificate(args.id, args.corpus_dir)
    res = verify_certificate(cert)
    code = EXIT_OK if res.met else (EXIT_INPUT if res.result == "error" else EXIT_FAIL)
    return res.to_json(), res.summary(), code


def cmd_corpus(args) -> tuple[dict, str, int]:
    summary = run_corpus(args.corpus_dir, args.select)
    return summary.to_json(), summary.summary(), summary.exit_code


def cmd_nf(args) -> tuple[dict, str, int]:
    P = _presentation(args.presentation)
    nf = P.show(P.normal_form(P.parse(args.text)))
    return {"kind": "normal_form", "presentation": P.name, "input": args.text, "normal_form": nf}, nf, EXIT_OK


def cmd_confluence(args) -> tuple[dict, str, int]:
    P = _presentation(args.presentation)
    report = check_confluence(P, args.bound)
    out = {"kind": "confluence_report", "presentation": P.name, "bound": args.bound,
           "rules": {P.rewrite_system.show_word(k): P.show(v) for k, v in P.rules.items()},
           "unresolved": report}
    lines = [f"{P.name}: {len(P.rules)} rules, overlaps checked up to degree {args.bound}"]
    lines += [f"  {k} -> {v}" for k, v in out["rules"].items()]
    lines.append("  confluent" if not report else f"  {len(report)} unresolved overlaps")
    lines += [f"  {r['word']}: {r['left']} != {r['right']}" for r in report]
    return out, "\n".join(lines), EXIT_OK if not report else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="innermccoy", description="Inner McCoy verification workbench.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit the JSON report instead of text")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="run a class-membership check")
    p.add_argument("property", choices=ELEMENTWISE + MCCOY_LIKE)
    p.add_argument("ring")
    p.add_argument("--df", type=int, default=2, help="degree bound for f (default 2)")
    p.add_argument("--dg", type=int, default=2, help="degree bound for the partner (default 2)")
    p.add_argument("--mode", choices=("exhaustive", "randomized"), default="exhaustive")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("annihilate", parents=[common], help="solve an annihilator space")
    p.add_argument("side", choices=SIDES)
    p.add_argument("ring")
    p.add_argument("poly")
    p.add_argument("--degree", type=int, default=0, help="partner degree (0 = scalars)")
    p.add_argument("--method", choices=("auto", "eliminate", "enumerate"), default="auto")
    p.set_defaults(func=cmd_annihilate)

    for name, func, helptext in (("certify", cmd_certify, "verify one certificate"),
                                 ("corpus", cmd_corpus, "verify the certificate corpus")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        if name == "certify":
            p.add_argument("id")
        else:
            p.add_argument("--select", help="keep certificates whose id contains this text or that carry this tag")
        p.add_argument("--corpus-dir", type=Path, default=None, help="directory of certificate JSON files")
        p.set_defaults(func=func)

    p = sub.add_parser("nf", parents=[common], help="normal form in a presented algebra")
    p.add_argument("presentation", help="built-in name (EX1, EX2) or presentation file")
    p.add_argument("text")
    p.set_defaults(func=cmd_nf)

    p = sub.add_parser("confluence", parents=[common], help="overlap report for a presentation")
    p.add_argument("presentation")
    p.add_argument("--bound", type=int, default=6)
    p.set_defaults(func=cmd_confluence)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        data, text, code = args.func(args)
    except BudgetExceeded as exc:
        data, text, code = {"kind": "error", "error": type(exc).__name__, "message": str(exc)}, f"budget: {exc}", EXIT_BUDGET
    except (WorkbenchError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        data, text, code = {"kind": "error", "error": type(exc).__name__, "message": msg}, f"error: {msg}", EXIT_INPUT
    if args.json:
        print(json.dumps(data, indent=2))
    else:
        print(text, file=sys.stdout if code in (EXIT_OK, EXIT_FAIL) else sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
