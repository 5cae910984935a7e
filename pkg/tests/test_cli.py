import json
import subprocess
import sys

import pytest

from cqmkit.cli import main, report_format


def run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr().out


def _spec(tmp_path, name, **kw):
    p = tmp_path / name
    p.write_text(json.dumps(kw))
    return str(p)


def test_verify_complex_z2(capsys):
    code, out = run(["verify", "--theory", "complex", "--group", "Z2", "--laws", "all"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert all(c["ok"] for c in rep["checks"])
    assert any(c["name"] == "strong_complementarity.bialgebra" for c in rep["checks"])


def test_verify_bool_z3_lacks_phases(capsys):
    code, out = run(["verify", "--theory", "bool", "--group", "Z3"], capsys)
    assert code == 1
    phases = [c for c in json.loads(out)["checks"] if c["name"] == "phases"]
    assert phases and not phases[0]["ok"]


def test_verify_unrealizable(capsys):
    code, _ = run(["verify", "--theory", "ff:3^1:2", "--group", "Z3"], capsys)
    assert code == 1


def test_usage_errors(capsys):
    assert main(["verify", "--theory", "complex"]) == 2
    assert main(["verify", "--theory", "octonion", "--group", "Z2"]) == 2
    assert main(["nonsense"]) == 2
    assert main(["verify", "--theory", "complex", "--group", "Z2", "--bogus"]) == 2
    capsys.readouterr()


def test_mermin_worked_example(tmp_path, capsys):
    spec = _spec(tmp_path, "z4.json", group="Z4", system=[{"coeffs": [2], "rhs": 1}], N=5, theory="complex")
    model = str(tmp_path / "model.json")
    code, out = run(["mermin", "run", spec, "--out", model, "--checks", "all"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["contextual"] and rep["avn"] and rep["strongly_contextual"]
    code, out = run(["ctx", "check", model, "--strong"], capsys)
    assert code == 0 and json.loads(out)["strongly_contextual"]


def test_ctx_avn_file(tmp_path, capsys):
    spec = _spec(tmp_path, "z2.json", group="Z2", system=[{"coeffs": [2], "rhs": 1}], N=3)
    model = str(tmp_path / "m.json")
    run(["mermin", "run", spec, "--out", model, "--checks", "none"], capsys)
    eqs = str(tmp_path / "eqs.json")
    with open(eqs, "w") as f:
        json.dump([{"context": 0, "coeffs": [1, 1, 1], "rhs": 0}] +
                  [{"context": c, "coeffs": [1, 1, 1], "rhs": 1} for c in (1, 2, 3)], f)
    code, out = run(["ctx", "check", model, "--lhv", "--avn", eqs], capsys)
    rep = json.loads(out)
    assert rep["avn"] is True and rep["lhv"] is None
    assert code == 1  # "local" check fails: the model is contextual


def test_hsp_run(capsys):
    code, out = run(["hsp", "run", "--theory", "complex", "--group", "Z2^3", "--subgroup", "1,1,0"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert len(rep["distribution"]) == 16
    assert rep["reconstructed_subgroup"] == [[0, 0, 0], [1, 1, 0]]


def test_dyn_clock(tmp_path, capsys):
    spec = _spec(tmp_path, "clk.json", alpha={"T": 4, "levels": [0, 2]}, beta={"T": 4, "levels": [0, 1, 2, 3]})
    code, out = run(["dyn", "clock", "--spec", spec], capsys)
    assert code == 0 and json.loads(out)["T_internal"] == 2
    spec = _spec(tmp_path, "bad.json", alpha={"T": 4, "levels": [0, 1]})
    code, _ = run(["dyn", "clock", "--spec", spec], capsys)
    assert code == 1


def test_hbb_attack_and_precondition(tmp_path, capsys):
    z3 = _spec(tmp_path, "z3.json", group="Z3", system=[{"coeffs": [2], "rhs": 1}], N=4)
    z4 = _spec(tmp_path, "z4.json", group="Z4", system=[{"coeffs": [2], "rhs": 1}], N=5)
    code, out = run(["hbb", "run", z3, "--rounds", "100", "--attack", "noncontextual"], capsys)
    rep = json.loads(out)
    assert rep["eve"]["plaintexts_known"] == "1.0"
    assert rep["summary"].startswith("verdict=")
    code, _ = run(["hbb", "run", z4, "--rounds", "10", "--attack", "noncontextual"], capsys)
    assert code == 1


def test_text_summary_line(tmp_path, capsys):
    z4 = _spec(tmp_path, "z4.json", group="Z4", system=[{"coeffs": [2], "rhs": 1}], N=5)
    main(["--format", "text", "hbb", "run", z4, "--rounds", "20"])
    last = capsys.readouterr().out.strip().splitlines()[-1]
    assert last.startswith("verdict=") and "eps=" in last and "decoded=ok" in last


def test_deterministic_bytes(tmp_path):
    z2 = _spec(tmp_path, "z2.json", group="Z2", system=[{"coeffs": [2], "rhs": 1}], N=3)
    cmd = [sys.executable, "-m", "cqmkit", "hbb", "run", z2, "--rounds", "30", "--seed", "3"]
    a = subprocess.run(cmd, capture_output=True).stdout
    b = subprocess.run(cmd, capture_output=True).stdout
    assert a == b and a


def test_empty_report():
    assert json.loads(report_format([])) == {"checks": []}


def test_inline_json_spec(capsys):
    spec = '{"group": "Z2", "system": [{"coeffs": [2], "rhs": 1}], "N": 3}'
    assert main(["mermin", "run", spec]) == 0
    assert main(["mermin", "run", "{not json"]) == 2
