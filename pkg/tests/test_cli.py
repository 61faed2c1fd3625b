import csv
import io
import json

import pytest

from higgs_verlinde import bethe
from higgs_verlinde.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_su2(capsys):
    code, out, _ = run(capsys, "solve", "--group", "su2", "--level", "3", "--t", "0.1")
    assert code == 0
    roots = json.loads(out)
    assert len(roots) == 4
    assert all(r["residual"] <= 1e-12 for r in roots)
    assert [r["branch"] for r in roots] == [[0], [1], [2], [3]]


def test_solve_t0_angles(capsys):
    code, out, _ = run(capsys, "solve", "--level", "1", "--t", "0")
    assert code == 0
    th = [float(r["theta"]) for r in json.loads(out)]
    assert th == pytest.approx([1.0471975511965976, 2.0943951023931953], abs=1e-15)


def test_index_genus0(capsys):
    code, out, _ = run(capsys, "index", "--group", "su2", "--level", "3", "--genus", "0", "--t", "0.1")
    assert code == 0
    data = json.loads(out)
    assert data["value"] == pytest.approx(0.999, abs=1e-12)
    assert len(data["per_root_contributions"]) == 4


def test_index_punctures_and_csv(capsys):
    code, out, _ = run(capsys, "index", "--group", "su3", "--level", "2", "--t", "0.1",
                       "--puncture", "1,0", "--puncture", "0,1", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["branch", "contribution"]
    assert rows[-1][0] == "total" and len(rows) == 2 + 6


def test_index_r0(capsys):
    code, out, _ = run(capsys, "index", "--level", "2", "--genus", "2", "--R", "0", "--t", "0")
    assert code == 0
    # at t = 0 every twist gives the classical number
    assert json.loads(out)["value"] == pytest.approx(10, abs=1e-12)


def test_tqft(capsys):
    code, out, _ = run(capsys, "tqft", "--level", "2", "--punctures", "1,1,1,1", "--order", "8",
                       "--format", "table")
    assert code == 0
    assert out.strip() == "2 + 2*t^2 + 2*t^4 + 2*t^6 + 2*t^8"
    code, out, _ = run(capsys, "tqft", "--level", "4", "--genus", "2", "--twisted", "1", "--order", "4")
    assert code == 0
    assert json.loads(out)["series"][:2] == ["19/1", "75/1"]


def test_tqft_dump_algebra(capsys):
    code, out, _ = run(capsys, "tqft", "--level", "2", "--order", "4", "--dump-algebra")
    assert code == 0
    assert json.loads(out)["level"] == 2


def test_usage_errors(capsys):
    code, _, err = run(capsys, "solve", "--group", "su7", "--level", "1", "--t", "0.1")
    assert code == 2 and "Weyl enumeration too large" in err
    code, _, err = run(capsys, "solve", "--level", "1", "--t", "0.9")
    assert code == 2 and "continuation guard" in err
    code, _, err = run(capsys, "index", "--group", "su3", "--level", "2", "--t", "0.1", "--puncture", "1,0:1")
    assert code == 2 and "not compatible" in err
    code, _, _ = run(capsys, "tqft", "--group", "su3", "--level", "1")
    assert code == 2
    code, _, _ = run(capsys, "solve", "--level", "1")
    assert code == 2
    code, _, _ = run(capsys, "bogus")
    assert code == 2


def test_numeric_failure_exit(capsys, monkeypatch):
    monkeypatch.setattr(bethe, "COLLISION_DIST", 10.0)
    code, _, err = run(capsys, "solve", "--level", "2", "--t", "0.1")
    assert code == 3 and "collide" in err


def test_config_merge(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"group": "su2", "level": 3, "t": "0.1", "genus": 0}))
    code, out, _ = run(capsys, "index", "--config", str(cfg))
    assert code == 0 and json.loads(out)["value"] == pytest.approx(0.999, abs=1e-12)
    # flags win over the file
    code, out, _ = run(capsys, "index", "--config", str(cfg), "--level", "1")
    assert code == 0 and json.loads(out)["level"] == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, "index", "--config", str(bad))
    assert code == 2 and "not valid JSON" in err


def test_deterministic_output(capsys):
    argv = ["index", "--group", "su3", "--level", "2", "--genus", "1", "--t", "0.05", "--puncture", "1,1"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b


def test_verify_pass_and_injected_failure(capsys):
    argv = ["verify", "--checks", "closed_forms_exact,twisted_split", "--quick", "--order", "12"]
    code, out, _ = run(capsys, *argv)
    assert code == 0
    data = json.loads(out)
    assert data["passed"] is True
    _, again, _ = run(capsys, *argv)
    assert again == out
    code, _, _ = run(capsys, "verify", "--checks", "frobenius_and_gluing", "--quick", "--order", "8",
                     "--inject-failure")
    assert code == 1


def test_verify_bad_config(capsys):
    code, _, _ = run(capsys, "verify", "--checks", "no_such_check")
    assert code == 2
