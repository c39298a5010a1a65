import json
from pathlib import Path

import pytest

from collatz_lab.cli import main

GOLDEN = Path(__file__).parent / "data" / "cert_13.json"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_run_text(capsys):
    code, out, _ = run(capsys, "run", "--n", "13")
    assert code == 0
    states = [l for l in out.splitlines() if l[0].isdigit()]
    assert [l.split()[-1] for l in states] == \
           ["13", "40", "20", "10", "5", "16", "8", "4", "2", "1"]


def test_run_json_gr3(capsys):
    code, out, _ = run(capsys, "run", "--algo", "gr3", "--n", "13", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["outcome"]["kind"] == "halted"


def test_run_jaskowski_fuel(capsys):
    code, out, _ = run(capsys, "run", "--domain", "jaskowski", "--k", "8", "--w", "1/2",
                       "--fuel", "8")
    assert code == 2
    states = [l for l in out.splitlines() if l[0].isdigit()]
    assert states[-1] == "8 D 2+9/128"


def test_run_zero_is_a_cycle(capsys):
    assert run(capsys, "run", "--n", "0")[0] == 1


@pytest.mark.parametrize("argv", [
    ["run"],
    ["run", "--n", "-4"],
    ["run", "--n", "1.5"],
    ["run", "--domain", "jaskowski", "--k", "-1", "--w", "0"],
    ["run", "--algo", "gr2", "--domain", "jaskowski", "--k", "8", "--w", "1/2"],
    ["certify", "--n", "0"],
    ["frobnicate"],
    ["sweep", "--from", "5", "--to", "2"],
    ["sweep", "--from", "1", "--to", "2", "--checks", "bogus"],
])
def test_input_errors_exit_3(capsys, argv):
    with pytest.raises(SystemExit) as info:
        code = main(argv)
        raise SystemExit(code)
    assert info.value.code == 3


def test_certify_golden(capsys):
    code, out, _ = run(capsys, "certify", "--n", "13")
    assert code == 0 and out == GOLDEN.read_text()


def test_certify_fuel(capsys):
    assert run(capsys, "certify", "--n", "27", "--fuel", "5")[0] == 2


def test_verify_cert(capsys, tmp_path):
    assert run(capsys, "verify-cert", str(GOLDEN)) == (0, "valid\n", "")
    bad = tmp_path / "bad.json"
    bad.write_text('{"n":"13","x":2,"y":"12","z":7,"k":[0,3,4]}')
    code, out, _ = run(capsys, "verify-cert", str(bad))
    assert code == 1 and out.startswith("invalid: y-direct:")
    bad.write_text("{")
    assert run(capsys, "verify-cert", str(bad))[0] == 3
    assert run(capsys, "verify-cert", str(tmp_path / "missing.json"))[0] == 3


def test_verify_cert_stdin(capsys, monkeypatch):
    import io
    monkeypatch.setattr("sys.stdin", io.StringIO(GOLDEN.read_text()))
    assert run(capsys, "verify-cert", "-")[0] == 0


def test_reverse(capsys):
    code, out, _ = run(capsys, "reverse", "--x", "2", "--y", "11", "--z", "7")
    rows = [json.loads(l) for l in out.splitlines()]
    assert code == 0 and rows[-1]["consumed_ks"] == [3, 4]
    assert run(capsys, "reverse", "--x", "0", "--y", "3", "--z", "2")[0] == 1
    assert run(capsys, "reverse", "--x", "4", "--y", "133", "--z", "10", "--fuel", "1")[0] == 2


def test_tree_and_env_limit(capsys, monkeypatch):
    code, out, _ = run(capsys, "tree", "--depth", "5", "--format", "json")
    assert code == 0 and json.loads(out)["levels"][5] == ["5", "32"]
    monkeypatch.setenv("COLLATZ_LAB_MAX_DEPTH", "3")
    assert run(capsys, "tree", "--depth", "5")[0] == 3


def test_hotel(capsys):
    code, out, _ = run(capsys, "hotel", "--max", "10")
    assert code == 0 and '"5" -> "16" [color=red];' in out


def test_strata_csv(capsys):
    code, out, _ = run(capsys, "strata", "--max", "6")
    assert code == 0
    assert out.splitlines()[:4] == ["n,stratum,tower,floor", "1,0,0,0", "2,0,0,1", "3,2,1,0"]


def test_sweep_deterministic(capsys):
    code, a, err = run(capsys, "sweep", "--from", "1", "--to", "300", "--workers", "1")
    assert code == 0 and a.splitlines()[-1] == "PASS" and "wall time" in err
    assert run(capsys, "sweep", "--from", "1", "--to", "300", "--workers", "1")[1] == a
    code, j, _ = run(capsys, "sweep", "--from", "1", "--to", "300", "--workers", "1",
                     "--format", "json", "--checks", "halting,strata")
    doc = json.loads(j)
    assert doc["ok"] and doc["passed"] == {"halting": 300, "strata": 300}
    assert doc["max_trajectory_n"] == "231"
