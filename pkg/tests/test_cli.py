from __future__ import annotations

import io
import subprocess
import sys

import pytest

from ttsec.cli import main

from .conftest import CORPUS

CONCAT = str(CORPUS / "concat.ttsec")
READ42 = str(CORPUS / "read_pure42.ttsec")


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_typecheck_concat():
    code, out, _ = cli("typecheck", CONCAT)
    assert code == 0
    assert out.strip() == ("forall (l : Label) (l' : Label) . Labeled l Str -> "
                           "Labeled l' Str -> DIO (join l l') Str")


def test_run_with_store_override():
    code, out, _ = cli("run", "--store", "H=[9]", "--ambient", "L", READ42)
    assert code == 0
    assert out.splitlines() == ["#store H = [9]", "MkDIO 42"]


def test_erase_at_low():
    code, out, _ = cli("erase", "--attacker", "L", READ42)
    assert code == 0
    assert out.splitlines() == [
        "#store H = •",
        "readRef • >>= fun (s : Labeled H Int) => pure 42"]
    _, ascii_out, _ = cli("erase", "--attacker", "L", "--ascii", READ42)
    assert "_hole_" in ascii_out and "•" not in ascii_out


def test_parse_and_ast():
    code, out, _ = cli("parse", READ42)
    assert code == 0 and out.strip() == \
        "readRef (MkRef@H 0) >>= fun (s : Labeled H Int) => pure 42"
    code, out, _ = cli("parse", "--ast", READ42)
    assert code == 0 and out.startswith("Bind(")


def test_trace_lines():
    code, out, _ = cli("run", "--trace", READ42)
    lines = out.splitlines()
    assert code == 0
    assert lines[0].startswith("Bind2/Read2 | Bind |")
    assert lines[-1] == "MkDIO 42"


def test_check_line_format():
    code, out, _ = cli("check", "--property", "pini", "--count", "20",
                       "--attacker", "L")
    assert code == 0
    assert out.strip() == "pini,20,0,0"


def test_check_table_format():
    code, out, _ = cli("check", "--property", "determinacy", "--count", "5",
                       "--format", "table")
    assert code == 0
    assert out.splitlines()[0].split() == ["property", "determinacy"]


def test_syntax_error_exit_code(tmp_path):
    f = tmp_path / "bad.ttsec"
    f.write_text("fun (x : Int => x")
    code, _, err = cli("parse", str(f))
    assert code == 1
    assert err.strip() == f"{f}:1:14: syntax error: expected ')', found '=>'"


def test_type_error_exit_code(tmp_path):
    f = tmp_path / "bad.ttsec"
    f.write_text("\n(fun (x : Int) => x) true")
    code, _, err = cli("typecheck", str(f))
    assert code == 1
    assert err.startswith(f"{f}:2:") and "mismatch" in err


def test_run_needs_a_computation(tmp_path):
    f = tmp_path / "v.ttsec"
    f.write_text("add 1 2")
    code, _, err = cli("run", str(f))
    assert code == 1 and "not a computation" in err


@pytest.mark.parametrize("argv", [
    ["erase", READ42],
    ["run", "--lattice", "compartment", READ42],
    ["run", "--ambient", "Q", READ42],
    ["typecheck", "/nonexistent.ttsec"],
    ["frobnicate"],
    [],
])
def test_usage_errors(argv, capsys):
    code, _, _ = cli(*argv)
    assert code == 2


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "ttsec", "typecheck", CONCAT],
                       capture_output=True, text=True)
    assert r.returncode == 0
    assert "DIO (join l l') Str" in r.stdout
