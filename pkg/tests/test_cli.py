import io
import json
import subprocess
import sys

import pytest

from fungi import corpus
from fungi.cli import main


def path(name):
    return str(corpus.path(name))


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_dedup(capsys):
    code, out, _ = run(capsys, "check", path("dedup.fg"))
    assert code == 0
    assert "ok def dedup" in out


def test_check_emits_a_typing_derivation(capsys, tmp_path):
    target = tmp_path / "d.json"
    code, _, _ = run(capsys, "check", path("dedup_3439.fg"), "--emit-derivation", str(target))
    doc = json.loads(target.read_text())
    assert code == 0
    assert doc["schema"] == "fungi-derivation/1" and doc["kind"] == "typing"
    assert doc["derivations"]


def test_check_reports_a_static_failure(capsys):
    code, _, err = run(capsys, "check", path("mistakes/missing_r.fg"))
    assert code == 1
    assert "missing_r.fg:" in err and ": error: " in err and "obligation:" in err


def test_run_prints_terminal_store_and_log(capsys, tmp_path):
    target = tmp_path / "e.json"
    code, out, _ = run(capsys, "run", "--hash", "example", path("dedup_3439.fg"),
                       "--emit-derivation", str(target))
    assert code == 0
    assert out.startswith("terminal: ret ptr('r * 'n1)")
    assert "Overwrite" not in out
    doc = json.loads(target.read_text())
    assert doc["kind"] == "evaluation" and doc["store"][0]["kind"] == "Extend"


def test_audit_precise(capsys):
    code, out, _ = run(capsys, "audit", "--hash", "example", path("dedup_3439.fg"))
    assert code == 0
    assert out.splitlines()[0] == "PRECISE"
    assert "diff: none" in out


def test_audit_with_seed_randomizes_inputs(capsys):
    code, out, _ = run(capsys, "audit", "--seed", "4", path("dedup_1439.fg"))
    assert code == 0 and out.startswith("PRECISE")


def test_audit_missing_dd(capsys):
    code, out, err = run(capsys, "audit", path("mistakes/missing_dd.fg"))
    assert code == 1
    assert out.startswith("IMPRECISE")
    assert "dynamic: input" in out and "written twice" in out
    assert "obligation:" in err


def test_audit_overlapping_primes(capsys):
    code, out, _ = run(capsys, "audit", path("mistakes/overlapping_primes.fg"))
    assert code == 1 and out.startswith("IMPRECISE")


def test_missing_file_is_usage(capsys):
    code, _, err = run(capsys, "check", "nope.fg")
    assert code == 2 and "cannot read" in err


def test_unknown_subcommand_is_usage(capsys):
    assert run(capsys, "bogus")[0] == 2


def test_negative_depth_is_usage(capsys):
    assert run(capsys, "solve", "--search-depth", "-1")[0] == 2


def test_parse_error(capsys, tmp_path):
    f = tmp_path / "bad.fg"
    f.write_text("main : (F Unit) |> <0; 0> =\n  ret (;\n")
    code, _, err = run(capsys, "check", str(f))
    assert code == 1
    assert err.startswith(str(f) + ":2:")


def test_solve_empty_input(capsys, monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.StringIO(""))
    assert run(capsys, "solve") == (0, "", "")


def test_solve_one_verdict_per_line(capsys, tmp_path):
    target = tmp_path / "s.json"
    code, out, _ = run(capsys, "solve", path("obligations/mistakes.txt"), "--emit-derivation", str(target))
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 6 and all(l.startswith("refuted ") for l in lines)
    doc = json.loads(target.read_text())
    assert doc["schema"] == "fungi-derivation/1" and len(doc["derivations"]) == 6


def test_solve_bad_line(capsys, monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.StringIO("|- () == () : Nm\n|- () ==\n"))
    code, out, err = run(capsys, "solve")
    assert code == 1
    assert out.startswith("proven")
    assert err.startswith("<stdin>:2:")


def test_solve_flags(capsys, monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.StringIO("|- (#x. 'dd * x) ## (#x. x) : Nm -> Nm\n"))
    code, out, _ = run(capsys, "solve", "--oracle-depth", "0")
    assert code == 0 and out.startswith("unknown")


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "fungi.cli", "check", path("dedup.fg")],
                          capture_output=True, text=True)
    assert proc.returncode == 0
