import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from einsteinwarp import catalog, serialize as S
from einsteinwarp.ansatz import FiberData
from einsteinwarp.cli import exit_code
from einsteinwarp.solver import ConstructionSpec

GOLDEN = Path(__file__).parent / "golden"


def run(*args, cwd=None):
    p = subprocess.run([sys.executable, "-m", "einsteinwarp.cli", *args], capture_output=True, text=True,
                       cwd=cwd)
    return p.returncode, p.stdout, p.stderr


def ex1_spec(tmp_path, name="spec.json", fiber=None, dh0=math.sqrt(2)):
    a = catalog.get("ex1").ansatz
    s = ConstructionSpec(a.base, a.f, a.params, 2, (0.0, 0.0, dh0), (-2.0, 2.0, 401))
    path = tmp_path / name
    path.write_text(S.dumps(S.spec_to_dict(s, fiber or FiberData(2))))
    return path


def test_verify_ex1():
    code, out, _ = run("verify", "ex1")
    assert code == 0
    d = json.loads(out)
    assert d["verdict"] == "pass"
    assert all(d["per_equation"][k]["sup_abs_residual"] < 1e-9 for k in ("ode1", "ode2", "ode3"))


def test_verify_ex5_literal():
    code, out, _ = run("verify", "ex5", "--literal-prop2")
    assert code == 0 and json.loads(out)["fiber_in_scalar"] is False


def test_verify_negative_control_exit_2():
    assert run("verify", "ex1-tanh")[0] == 2


def test_verify_bad_file(tmp_path):
    bad = tmp_path / "badfile.json"
    bad.write_text("{not json")
    code, _, err = run("verify", str(bad))
    assert code == 1 and "ParseError" in err


def test_verify_unknown_id():
    code, _, err = run("verify", "ex99")
    assert code == 1 and "UnknownId" in err


def test_verify_csv_and_out(tmp_path):
    out = tmp_path / "r.csv"
    assert run("verify", "ex4", "--csv", "--grid", "0.2:4:50", "--out", str(out))[0] == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("xi,ode1") and len(lines) == 51


def test_construct_round_trip(tmp_path):
    spec = ex1_spec(tmp_path)
    out = tmp_path / "built.json"
    code, _, _ = run("construct", str(spec), "--out", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["report"]["verdict"] == "pass"
    ans = tmp_path / "ansatz.json"
    ans.write_text(json.dumps(doc["ansatz"]))
    code, o, _ = run("verify", str(ans))
    assert code == 0 and json.loads(o)["verdict"] == "pass"


def test_construct_fiber_mismatch(tmp_path):
    code, out, _ = run("construct", str(ex1_spec(tmp_path, fiber=FiberData(2, 1.0, "sphere"))))
    assert code == 4
    assert json.loads(out)["implied_theta"] == pytest.approx(2 / 3, abs=1e-9)


def test_construct_blow_up(tmp_path):
    code, out, _ = run("construct", str(ex1_spec(tmp_path, dh0=-3.0)))
    assert code == 3
    assert json.loads(out)["last_xi"] == pytest.approx(0.5118746, abs=1e-6)


def test_classify_golden():
    code, out, _ = run("classify", "--preset", "ricci", "--steady", "--fiber-scalar", "1")
    assert code == 0
    assert json.loads(out) == json.loads((GOLDEN / "classify_ricci_steady.json").read_text())


def test_classify_expanding_rigid():
    code, out, _ = run("classify", "--preset", "ricci", "--expanding", "--fiber-scalar", "-1",
                       "--ricci-w-nonneg")
    assert code == 0 and json.loads(out)["verdict"] == "Rigid"


def test_classify_missing_sign():
    code, _, err = run("classify", "--sign-sigma", "+", "--sign-A", "-")
    assert code == 1 and "IncompleteHypotheses" in err


def test_classify_hypotheses_file(tmp_path):
    p = tmp_path / "h.json"
    p.write_text(json.dumps({"sign_sigma": "-", "sign_A": "+", "sign_BF": "+", "ricci_w_nonneg": "verified",
                             "growth_ok": "asserted", "gradient_decay": "asserted"}))
    code, out, _ = run("classify", "--hypotheses", str(p))
    assert code == 0 and json.loads(out)["clause"] == "rigid-b"


def test_estimate_csv():
    code, out, _ = run("estimate", "ex1-lich", "--R", "4")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "xi,u,grad_log_u,bracket,local_C"
    assert all(math.isfinite(float(x.split(",")[-1])) for x in lines[1:])


def test_estimate_unsupported_base():
    code, _, err = run("estimate", "ex2", "--R", "4")
    assert code == 1 and "UnsupportedBase" in err


def test_export_row_count():
    code, out, _ = run("export", "ex2", "--grid", "0.1:10:400")
    assert code == 0 and len(out.splitlines()) == 401


def test_list():
    code, out, _ = run("list", "--json")
    assert code == 0
    assert {r["id"] for r in json.loads(out)} == set(catalog.ids())


@pytest.mark.parametrize("verdict,code", [("pass", 0), ("fail", 2)])
def test_exit_code_table(verdict, code):
    assert exit_code(verdict) == code


@pytest.mark.parametrize("entry", catalog.ids())
def test_exit_code_follows_verdict(entry):
    code, out, _ = run("verify", entry)
    assert code == exit_code(json.loads(out)["verdict"])
    assert json.loads(out)["verdict"] == catalog.get(entry).expected_verdict
