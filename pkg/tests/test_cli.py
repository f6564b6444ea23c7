import json
import subprocess
import sys

import pytest

from innermccoy.cli import main
from innermccoy.dsl import build_ring_spec, parse_element


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


def test_check_inner_mccoy_m2_fails(capsys, validate):
    code, data = run_json(capsys, "check", "inner_mccoy", "M2(Z2)", "--df", "4", "--dg", "2")
    assert code == 1 and data["verdict"] == "fails"
    validate("property_report", data)
    assert data["witness"]["f"] == "E22 + E21*x + E12*x^2 + E11*x^3"


def test_check_holds_exits_zero(capsys, validate):
    code, data = run_json(capsys, "check", "inner_mccoy", "T2(Z2)")
    assert code == 0 and data["verdict"] == "holds_at_bound"
    validate("property_report", data)
    code, data = run_json(capsys, "check", "reversible", "Z12")
    assert code == 0 and data["verdict"] == "holds_exhaustive"
    validate("property_report", data)


def test_check_text_output(capsys):
    code, out, _ = run(capsys, "check", "semicommutative", "T2(Z2)")
    assert code == 1 and "fails" in out and "E11" in out


def test_annihilate_t2_z4(capsys, validate):
    code, data = run_json(capsys, "annihilate", "inner", "T2(Z4)", "[[2+2*x, 0],[0, 2+2*x]]")
    assert code == 0
    validate("solution_space", data)
    space = data["space"]
    assert not space["is_zero"] and data["verified"]
    # the reported witness is the lexicographically least solution
    assert data["witness_text"] == "E22"
    R = build_ring_spec("T2(Z4)")
    assert list(parse_element("2*E12", R).coeffs) in [list(v) for v in _all_vectors(space)]


def _all_vectors(space):
    from itertools import product

    gens = space["generators"]
    n = space["modulus"]
    seen = set()
    for cs in product(range(n), repeat=len(gens)):
        v = tuple(sum(c * g[i] for c, g in zip(cs, gens)) % n for i in range(len(gens[0])))
        seen.add(v)
    return seen


def test_annihilate_laurent_and_methods(capsys):
    code, data = run_json(capsys, "annihilate", "inner", "Z8", "2*x^-1 + 2", "--method", "enumerate")
    assert code == 0 and data["x_shift"] == 1 and data["space"]["size"] == 4
    code, out, _ = run(capsys, "annihilate", "right", "EX2@D=4", "c0 + c1*x")
    assert code == 0 and "zero space" in out


def test_nf_and_confluence(capsys, validate, tmp_path):
    code, data = run_json(capsys, "nf", "EX2", "c1*d0")
    assert code == 0 and data["normal_form"] == "c0*d1"
    validate("normal_form", data)
    code, data = run_json(capsys, "confluence", "EX2", "--bound", "6")
    assert code == 0 and data["unresolved"] == []
    validate("confluence_report", data)
    p = tmp_path / "twisted.txt"
    p.write_text("generators: x y\nrelations: y*x + x*x; x*y\n")
    code, data = run_json(capsys, "confluence", str(p), "--bound", "4")
    assert code == 1 and data["unresolved"][0]["word"] == "x*y*x"
    validate("confluence_report", data)


def test_certify_and_corpus(capsys, validate):
    code, data = run_json(capsys, "certify", "CERT-Z8")
    assert code == 0 and data["met"]
    validate("certificate_result", data)
    code, data = run_json(capsys, "corpus", "--select", "matrix-ring")
    assert code == 0 and data["counts"]["total"] >= 3
    validate("corpus_summary", data)


def test_flipped_corpus_exits_one(capsys, tmp_path):
    from innermccoy.certificates import CORPUS_DIR

    src = json.loads((CORPUS_DIR / "mn2-z2.json").read_text())
    src["expected"] = "fail"
    (tmp_path / "c.json").write_text(json.dumps(src))
    code, _, _ = run(capsys, "corpus", "--corpus-dir", str(tmp_path))
    assert code == 1


@pytest.mark.parametrize("argv", [
    ["check", "inner_mccoy", "Q3"],
    ["annihilate", "inner", "Z4", "2 + y"],
    ["nf", "EX7", "c0"],
    ["certify", "CERT-DOES-NOT-EXIST"],
    ["annihilate", "inner", "T2(Z2)", "[[1, 0],[1, 1]]"],
])
def test_input_errors_exit_two(capsys, validate, argv):
    code, out, _ = run(capsys, *argv, "--json")
    assert code == 2
    data = json.loads(out)
    validate("error", data)
    code, out, err = run(capsys, *argv)
    assert code == 2 and err.startswith("error:")


def test_unknown_flag_exits_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["check", "inner_mccoy", "Z2", "--bogus"])
    assert exc.value.code == 2


def test_budget_exceeded_exits_three(capsys, monkeypatch, validate):
    monkeypatch.setenv("INNERMCCOY_ENUM_BUDGET", "100")
    code, data = run_json(capsys, "check", "inner_mccoy", "M2(Z2)", "--df", "3")
    assert code == 3 and data["kind"] == "error"
    validate("error", data)
    code, out, err = run(capsys, "annihilate", "inner", "EX2@D=4", "c0^3*x")
    assert code == 3 and err.startswith("budget:")


def test_console_script_runs():
    proc = subprocess.run([sys.executable, "-m", "innermccoy.cli", "nf", "EX2", "c0*d0"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.strip() == "0"
