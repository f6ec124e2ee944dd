import csv
import io
import json
import subprocess
import sys

import pytest

from haarshift.cli import main
from haarshift.haar import load_function


def run(capsys, *argv):
    capsys.readouterr()
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--json")
    assert code == 0, err
    return json.loads(out)


def test_constant_covering(capsys):
    doc = run_json(capsys, "constant", "--i", "0:0", "--k", "1:0")
    assert list(doc) == ["I", "K", "case", "form", "exact_constant", "paper_bound", "rule"]
    assert doc["case"] == "covering"
    assert doc["form"] == {"K": "1:0", "constant": "-1/4", "haar": "1/4√2",
                           "inner": [{"L": "1:0", "coef": "-1/2√2"}], "norm2": "3/4"}
    assert (doc["exact_constant"], doc["paper_bound"]) == ("3/4", "5/8")
    doc = run_json(capsys, "constant", "--i", "0:0", "--k", "2:0")
    assert (doc["exact_constant"], doc["paper_bound"]) == ("7/8", "13/16")


def test_constant_gap_zero(capsys):
    doc = run_json(capsys, "constant", "--i", "1:1", "--k", "0:0")
    assert doc["case"] == "gap" and doc["form"]["norm2"] == "0" and doc["exact_constant"] == "0"


def test_constant_negative_intervals(capsys):
    doc = run_json(capsys, "constant", "--i", "0:-1", "--k", "-1:-1")
    assert doc["case"] == "interior"
    assert run_json(capsys, "constant", "--i=0:0", "--k=-1:0")["case"] == "interior"


def test_decimal(capsys):
    doc = run_json(capsys, "constant", "--i", "0:0", "--k", "1:0", "--decimal", "5")
    assert doc["form"]["haar"] == round(2 ** 0.5 / 4, 5)
    assert doc["I"] == "0:0" and doc["rule"] == "covering"


def test_human_output(capsys):
    code, out, _ = run(capsys, "constant", "--i", "0:0", "--k", "1:0")
    assert code == 0 and "exact_constant: 3/4" in out


def test_extremal_then_norm(capsys, tmp_path):
    path = str(tmp_path / "f.json")
    doc = run_json(capsys, "extremal", "--i", "2:0", "--k", "0:0", "--out", path)
    assert (doc["norm2_f"], doc["norm2"]) == ("2", "0")
    doc = run_json(capsys, "norm", "--i", "2:0", "--k", "0:0", "--f", path)
    assert doc["norm2"] == "0" and doc["identity_agrees"] is True
    assert load_function(path).root.scale == 2


def test_extremal_witness(capsys):
    assert run_json(capsys, "extremal", "--i", "2:0", "--k", "0:3")["norm2"] == "1/4"
    assert run_json(capsys, "extremal", "--i", "2:0", "--k", "0:3", "--witness")["norm2"] == "0"


def test_apply(capsys, tmp_path):
    src = tmp_path / "f.json"
    src.write_text(json.dumps({"root": "0:0", "depth": 1, "mode": "exact", "leaves": ["-1", "1"]}))
    out = tmp_path / "g.json"
    doc = run_json(capsys, "apply", "--f", str(src), "--window", "0:0", "--out", str(out))
    assert doc["norm2"] == "1"
    g = json.loads(out.read_text())
    assert g["root"] == "0:0" and g["depth"] == 2 and g["leaves"] == ["1", "-1", "-1", "1"]


def test_svd_csv(capsys):
    code, out, _ = run(capsys, "svd", "--i", "0:0", "--k", "2:0", "--depth", "4")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["I", "K", "depth", "constraint", "sigma_min", "sigma_max", "rank_numeric"]
    assert rows[1][:4] == ["0:0", "2:0", "4", "none"] and float(rows[1][4]) >= 0.5
    code, out, _ = run(capsys, "svd", "--i", "0:0", "--k", "1:1", "--depth", "3", "--zero-mean")
    assert list(csv.reader(io.StringIO(out)))[1][6] == "0"


def test_pw(capsys, tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"0": 2, "1": [0.5, 0], "-1": [0.5, 0]}))
    doc = run_json(capsys, "pw", "--i", "0:0", "--coeffs", str(path), "--depth", "8", "--k", "1:1")
    assert doc["eta"] == pytest.approx(1 / 3) and doc["holds"]
    assert doc["gap"]["holds"] and doc["gap"]["rule"] == "gap-far"


def test_audit(capsys, tmp_path):
    out = tmp_path / "r.json"
    args = ("audit", "--scales", "-1..1", "--indices", "0..3", "--oracle-scales", "0..0",
            "--oracle-indices", "0..1", "--depth", "2", "--out", str(out))
    code, text, _ = run(capsys, *args)
    assert code == 0 and "discrepancy" in text
    first = out.read_bytes()
    assert main(list(args)) == 0
    assert out.read_bytes() == first
    doc = json.loads(first)
    assert doc[-1]["claim"] == "ORACLE" and doc[-1]["status"] == "verified"


def test_audit_mismatch_exit_code(capsys, monkeypatch):
    import haarshift.audit as audit

    real = audit.agreement_sweep

    def broken(*a, **k):
        rep = real(*a, **k)
        rep.failures.append(("0:0", "0:0", 1.0))
        return rep

    monkeypatch.setattr(audit, "agreement_sweep", broken)
    code, _, _ = run(capsys, "audit", "--scales", "0..0", "--indices", "0..1",
                     "--oracle-scales", "0..0", "--oracle-indices", "0..0", "--depth", "1")
    assert code == 1


@pytest.mark.parametrize("argv", [
    [],
    ["bogus"],
    ["constant", "--i", "0:0"],
    ["constant", "--i", "x", "--k", "0:0"],
    ["svd", "--i", "0:0", "--k", "0:0", "--depth", "-1"],
    ["svd", "--i", "0:0", "--k", "0:0", "--depth", "20"],
    ["extremal", "--i", "1:0", "--k", "0:0"],
    ["norm", "--k", "0:0", "--f", "/nonexistent.json"],
    ["audit", "--scales", "3..1"],
    ["constant", "--i", "0:0", "--k", "0:0", "--decimal", "x"],
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err


def test_bad_function_file(capsys, tmp_path):
    path = tmp_path / "f.json"
    path.write_text("{not json")
    assert run(capsys, "norm", "--k", "0:0", "--f", str(path))[0] == 2
    path.write_text(json.dumps({"root": "0:0", "depth": 1, "leaves": ["1"]}))
    assert run(capsys, "norm", "--k", "0:0", "--f", str(path))[0] == 2
    path.write_text(json.dumps({"root": "0:0", "depth": 0, "leaves": ["1"]}))
    assert run(capsys, "norm", "--i", "1:0", "--k", "0:0", "--f", str(path))[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "haarshift", "constant", "--i", "0:0", "--k", "0:3", "--json"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["exact_constant"] == "1/16"
