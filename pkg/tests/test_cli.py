import csv
import json
import subprocess
import sys

import pytest

from veriroot.cli import main

WILK = "(x-1)*(x-2)*(x-3)*(x-4)*(x-5)"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_wilkinson_json(capsys):
    code, out, _ = run(
        capsys, "solve", "--expr", WILK, "--lo", "1", "--hi", "5",
        "--tau-x", "1e-6", "--tau-w", "1e-6", "--tau-c", "1e-3", "--format", "json",
    )
    assert code == 0
    doc = json.loads(out)
    roots = doc["roots"]
    assert len(roots) == 5
    for i, r in enumerate(roots, start=1):
        lo, hi = float(r["lo"]), float(r["hi"])
        assert lo <= i <= hi
        # decimal and hex forms name the same double
        assert float.fromhex(r["lo_hex"]) == lo and float.fromhex(r["hi_hex"]) == hi
        assert r["status"] in ("certified", "possible", "cluster")
        assert r["sign_lo"] in (-1, 0, 1)
    interior = [r["status"] for r in roots[1:4]]
    assert interior == ["certified"] * 3
    assert set(doc["stats"]) >= {"evaluations", "contractions", "bisections", "handoffs", "elapsed_ms"}


def test_defaults_echoed(capsys):
    code, out, _ = run(capsys, "solve", "--expr", "x-0.5", "--lo", "0", "--hi", "1", "--format", "json")
    assert code == 0
    cfg = json.loads(out)["config"]
    assert cfg["tau_x"] == 1e-6 and cfg["tau_w"] == 1e-6
    assert cfg["tau_c"] == pytest.approx(1e-3)


def test_no_roots_exit_zero(capsys):
    code, out, _ = run(capsys, "solve", "--expr", "x^2+1", "--lo", "-1", "--hi", "1", "--format", "json")
    assert code == 0
    assert json.loads(out)["roots"] == []


def test_text_output(capsys):
    code, out, _ = run(capsys, "solve", "--expr", "x^2-2", "--lo", "0", "--hi", "2")
    assert code == 0
    assert out.startswith("1 candidate(s)")
    assert "certified" in out


def test_syntax_error_offset(capsys):
    code, _, err = run(capsys, "solve", "--expr", "x^", "--lo", "0", "--hi", "1")
    assert code == 2
    assert "offset 2" in err
    assert err.rstrip().endswith("^")


@pytest.mark.parametrize(
    "argv",
    [
        ["solve", "--lo", "0", "--hi", "1"],
        ["solve", "--expr", "x", "--lo", "1", "--hi", "0"],
        ["solve", "--expr", "x", "--lo", "0", "--hi", "inf"],
        ["solve", "--expr", "x", "--lo", "0", "--hi", "1", "--tau-x", "-1"],
        ["bogus"],
        [],
        ["family", "--m", "0", "--max-degree", "2"],
    ],
)
def test_usage_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_budget_exit_code(capsys):
    code, out, err = run(
        capsys, "solve", "--expr", WILK, "--lo", "0", "--hi", "6", "--max-iter", "3", "--format", "json",
    )
    assert code == 3
    doc = json.loads(out)
    assert doc["stats"]["complete"] is False
    assert doc["roots"]
    assert "partial" in err


def test_family_csv(tmp_path, capsys):
    path = tmp_path / "fam.csv"
    code, _, err = run(capsys, "family", "--m", "1", "--max-degree", "2", "--out", str(path))
    assert code == 0
    rows = list(csv.DictReader(path.open()))
    assert len(rows) == 24 + 48
    assert rows[0].keys() == {"spec_id", "d", "missed_roots", "candidate_count", "elapsed_us"}
    assert all(r["missed_roots"] == "0" for r in rows)
    assert json.loads(err.strip().splitlines()[-1])["missed_roots"] == 0


def test_family_json(tmp_path, capsys):
    path = tmp_path / "fam.json"
    code, _, _ = run(capsys, "family", "--m", "1", "--max-degree", "1", "--out", str(path))
    assert code == 0
    doc = json.loads(path.read_text())
    assert doc["summary"]["specs"] == 24


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "veriroot", "solve", "--expr", "x", "--lo", "-1", "--hi", "1", "--format", "json"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert len(json.loads(proc.stdout)["roots"]) == 1


def test_help_mentions_grammar(capsys):
    code, out, _ = run(capsys, "solve", "--help")
    assert code == 0
    assert "grammar" in out
