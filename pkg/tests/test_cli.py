"""Command-line behaviour: outputs, exit codes, determinism."""

import json

import pytest

from anrec.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_constants_text(capsys):
    code, out, _ = run(capsys, "constants", "--h", "4", "--tuple", "1,2")
    assert code == 0
    assert "C(1,2) = 1/2" in out
    assert "SymC(1,2) = 1" in out


def test_constants_triple(capsys):
    code, out, _ = run(capsys, "constants", "--h", "4", "--tuple", "1,1,1")
    assert code == 0
    assert "C(1,1,1) = -1/4" in out


def test_constants_empty_tuple(capsys):
    code, out, _ = run(capsys, "constants", "--h", "3", "--tuple", "")
    assert code == 0
    assert "C() = 1" in out


def test_constants_malformed_exit_2(capsys):
    code, _, err = run(capsys, "constants", "--h", "4", "--tuple", "1,x")
    assert code == 2
    code, _, err = run(capsys, "constants", "--h", "4", "--tuple", "9")
    assert code == 2


def test_potential_golden_json(capsys):
    code, out, _ = run(capsys, "potential", "--n", "3", "--genus", "0",
                       "--degree", "5", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["checks"]["wdvv"]["pass"] and data["checks"]["euler"]["pass"]
    from anrec.series import SparsePoly
    from anrec.genus0 import Profile, solve
    from anrec.rootsys import RootData
    expect = solve(RootData(3), Profile(N=3, m_in=0, D=5)).F
    assert SparsePoly.from_json(data["f"]) == expect


def test_potential_rank_one_cubic(capsys):
    code, out, _ = run(capsys, "potential", "--n", "1", "--genus", "0",
                       "--degree", "3", "--format", "json")
    assert code == 0
    data = json.loads(out)
    from anrec.series import SparsePoly, Var
    from fractions import Fraction
    got = SparsePoly.from_json(data["f"])
    assert got == (SparsePoly.variable(Var(0, 1)) ** 3).scale(Fraction(1, 6))


def test_potential_degree_too_low_is_zero(capsys):
    code, out, _ = run(capsys, "potential", "--n", "1", "--genus", "0",
                       "--degree", "2", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["f"]["terms"] == []


def test_verify_exit_codes(capsys):
    code, out, _ = run(capsys, "verify", "remove-n", "--h", "6",
                       "--trials", "25", "--seed", "42", "--format", "json")
    assert code == 0
    code, _, err = run(capsys, "verify", "no-such-suite")
    assert code == 2
    code, _, err = run(capsys, "verify", "remove-n")  # missing --h
    assert code == 2


def test_verify_symstate(capsys):
    code, out, _ = run(capsys, "verify", "symstate", "--h", "4",
                       "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["pass"] and len(data["results"]) == 4


def test_verify_wdvv(capsys):
    code, out, _ = run(capsys, "verify", "wdvv", "--n", "3", "--degree", "5",
                       "--format", "json")
    assert code == 0


def test_seeded_reports_are_byte_identical(capsys):
    _, out1, _ = run(capsys, "verify", "vandermonde", "--h", "7",
                     "--trials", "12", "--seed", "9", "--format", "json")
    _, out2, _ = run(capsys, "verify", "vandermonde", "--h", "7",
                     "--trials", "12", "--seed", "9", "--format", "json")
    assert out1 == out2
    data = json.loads(out1)
    assert data["config"]["prng"].startswith("mersenne-twister")
    assert "content_hash" in data


def test_verify_wconstraint(capsys):
    code, out, _ = run(capsys, "verify", "wconstraint", "--n", "2",
                       "--degree", "5", "--genus", "1", "--cap", "3",
                       "--m-max", "1", "--m-in", "1", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["pass"] and len(data["results"]) == 4


def test_report_written_to_file(tmp_path, capsys):
    path = tmp_path / "report.json"
    code, out, _ = run(capsys, "verify", "symstate", "--h", "3",
                       "--format", "json", "--out", str(path))
    assert code == 0
    data = json.loads(path.read_text())
    assert data["pass"]
