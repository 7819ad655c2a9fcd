import io
import json
import subprocess
import sys

import pytest
from hypothesis import given, settings
from strategies import z_modules

from pidsubcat.cli import run
from pidsubcat.modstruct import FgModule
from pidsubcat.ring import ZZ

Z4_Z3 = {"ring": "Z", "rank": 0, "torsion": {"2": [2], "3": [1]}}
Z2_Z2_Z3 = {"ring": "Z", "rank": 0, "torsion": {"2": [1, 1], "3": [1]}}


def call(*argv, stdin=None):
    out, err = io.StringIO(), io.StringIO()
    old = sys.stdin
    if stdin is not None:
        sys.stdin = io.StringIO(stdin)
    try:
        code = run(list(argv), stdout=out, stderr=err)
    finally:
        sys.stdin = old
    return code, out.getvalue(), err.getvalue()


def ok_json(*argv, stdin=None):
    code, out, err = call(*argv, stdin=stdin)
    assert code == 0, err
    return json.loads(out)


def test_generate_rational_example():
    code, out, _ = call("generate", "-m", '[{"ring":"field:Q","rank":2,"torsion":{}}]')
    assert code == 0
    assert out.strip() == '{"kind":"rank_mod","k":2}'


def test_classify_full():
    out = ok_json("classify", "-d", '{"kind":"rank_mod","k":1}')
    assert out == {"triangulated": True, "thick": True, "wide": True, "serre": True, "spec_subset": "full"}
    out = ok_json("classify", "-d", '{"kind":"rank_mod","k":2}')
    assert out["thick"] is False and "spec_subset" not in out


def test_certify_then_verify():
    cert = ok_json("certify", "-g", json.dumps([Z4_Z3]), "-t", json.dumps([Z2_Z2_Z3]))
    assert ok_json("verify", "-c", json.dumps(cert)) == {"ok": True}
    assert ok_json("verify", stdin=json.dumps(cert)) == {"ok": True}


def test_certify_not_member():
    code, out, err = call("certify", "-g", json.dumps([Z4_Z3]), "-t", json.dumps(FgModule(ZZ, 0, {2: [1]}).to_json()))
    assert code == 1 and out == ""
    assert json.loads(err)["error"] == "not_in_subcategory"


def test_verify_rejects_tampered():
    cert = ok_json("certify", "-g", json.dumps([Z4_Z3]), "-t", json.dumps(Z2_Z2_Z3))
    cert["steps"][0]["seq"]["f"]["matrix"][0][0] = "0"
    code, out, err = call("verify", "-c", json.dumps(cert))
    assert code == 1
    report = json.loads(out)
    assert report["ok"] is False and report["failing_step"] == 0
    assert "message" in json.loads(err)


def test_canon_chi_member_spec_subset():
    assert ok_json("canon", "-p", '{"ring":"Z","rows":2,"cols":2,"entries":["4","0","0","6"]}') == \
        {"ring": "Z", "rank": 0, "torsion": {"2": [1, 2], "3": [1]}}
    assert ok_json("chi", "-m", json.dumps(Z4_Z3)) == {"chi0": 0, "components": {"2": 2, "3": 1}}
    d = ok_json("generate", "-m", json.dumps([Z4_Z3]))
    assert d == {"kind": "torsion_lattice", "support": ["2", "3"], "gens": [[2, 1]]}
    assert ok_json("member", "-d", json.dumps(d), "-m", json.dumps(Z2_Z2_Z3)) == {"member": True, "witness": [1]}
    assert ok_json("member", "-d", json.dumps(d), "-m", '{"torsion":{"2":[2],"3":[2]}}') == {"member": False}
    assert ok_json("spec-subset", "-s", '"full"') == {"kind": "rank_mod", "k": 1}
    assert ok_json("spec-subset", "-s", "[]") == {"kind": "zero"}
    assert ok_json("spec-subset", "-s", "[3, 2]") == {"kind": "torsion_on_support", "support": ["2", "3"]}


def test_oracle_closure():
    out = ok_json("oracle-closure", "-g", '[{"torsion":{"2":[2]}}]', "--primes", "2", "--max-length", "4")
    assert all(sum(m["torsion"].get("2", [])) % 2 == 0 for m in out)
    assert len(out) == 1 + 2 + 5  # partitions of 0, 2 and 4


def test_file_input(tmp_path):
    path = tmp_path / "mods.json"
    path.write_text(json.dumps([Z4_Z3]))
    assert ok_json("generate", "-m", f"@{path}")["kind"] == "torsion_lattice"


def test_ring_flag_and_mismatch():
    out = ok_json("chi", "--ring", "Fp[x]:2", "-m", '{"torsion":{"[1,1]@2":[2]}}')
    assert out == {"chi0": 0, "components": {"[1,1]@2": 2}}
    code, _, err = call("generate", "-m", json.dumps([Z4_Z3, {"ring": "field:Q", "rank": 1}]))
    assert code == 1 and json.loads(err)["error"] == "RingError"


def test_domain_errors_exit_one():
    code, _, err = call("classify", "-d", '{"kind":"torsion_lattice","support":["4"],"gens":[[1]]}')
    assert code == 1
    code, _, _ = call("chi", "-m", '{"torsion":{"7":[1]}}', "-s", "[2]", "--strict")
    assert code == 1
    code, _, _ = call("oracle-closure", "-g", "[]", "--primes", "2", "--max-length", "12")
    assert code == 1


@pytest.mark.parametrize("argv", [
    ["generate", "-m", "[{"],
    ["generate", "-m", '"nope"'],
    ["member", "-d", "[]", "-m", "{}"],
    ["frobnicate"],
    [],
    ["verify", "-c", '{"ring":"Z"}'],
    ["canon", "-p", '{"rows":2,"cols":2,"entries":[1]}'],
    ["generate", "-m", "@/nonexistent/file.json"],
])
def test_malformed_input_exit_two(argv):
    code, out, err = call(*argv)
    assert code == 2 and out == ""
    assert json.loads(err)["error"] == "malformed_input"


def test_pretty_output():
    code, out, _ = call("classify", "--pretty", "-d", '{"kind":"zero"}')
    assert code == 0 and "\n  " in out
    assert json.loads(out)["spec_subset"] == []


@settings(max_examples=30, deadline=None)
@given(z_modules())
def test_module_round_trip_through_cli(M):
    mj = json.dumps(M.to_json())
    assert ok_json("chi", "-m", mj)["chi0"] == M.rank
    d = ok_json("generate", "-m", f"[{mj}]")
    cls = ok_json("classify", "-d", json.dumps(d))
    assert ok_json("member", "-d", json.dumps(d), "-m", mj)["member"] is True
    if cls["thick"]:
        assert ok_json("spec-subset", "-s", json.dumps(cls["spec_subset"])) == d
    cert = ok_json("certify", "-g", f"[{mj}]", "-t", mj)
    assert ok_json("verify", "-c", json.dumps(cert)) == {"ok": True}


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "pidsubcat", "generate", "-m", '[{"ring":"Z","rank":4}]'],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout) == {"kind": "rank_mod", "k": 4}
