from contextlib import nullcontext
import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from koszulcat.cli import main
from koszulcat.examples import chain_square_zero
from koszulcat.serialize import dump

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("argv, golden", [
    (["bar", "--example", "kfi", "--window", "4", "--format", "json"], "bar_kfi_w4.json"),
    (["dual", "--example", "square_zero", "--window", "2", "--format", "json"], "dual_sqz_w2.json"),
    (["operad-check", "--example", "operad_unit", "--arity", "3", "--format", "json"], "operad_unit_a3.json"),
    (["bar", "--example", "square_zero", "--window", "2", "--format", "csv"], "bar_sqz_w2.csv"),
])
def test_golden(capsys, argv, golden):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert out == (GOLDEN / golden).read_text()


def rows(out, table, i, j):
    return [(r["degree"], r["dim"]) for r in json.loads(out)["tables"][table] if (r["i"], r["j"]) == (i, j)]


def test_bar_kfi_row(capsys):
    code, out, _ = run(capsys, "bar", "--example", "kfi", "--window", "4", "--format", "json")
    assert rows(out, "bar_homology", 1, 3) == [(2, 3)]


def test_dual_square_zero_row(capsys):
    code, out, _ = run(capsys, "dual", "--example", "square_zero", "--window", "2", "--format", "json")
    assert rows(out, "dual_homology", 0, 1) == [(-1, 1)]


def test_verify_kfi_passes(capsys):
    code, out, _ = run(capsys, "verify", "--example", "kfi", "--window", "3")
    assert code == 0
    assert "FAIL" not in out


def test_table_format(capsys):
    code, out, _ = run(capsys, "bar", "--example", "square_zero", "--window", "1")
    assert code == 0
    assert "[bar_homology]" in out and "weight" in out


def test_double_dual_tables(capsys):
    code, out, _ = run(capsys, "double-dual", "--example", "square_zero", "--window", "1", "--trunc", "4",
                       "--format", "json")
    assert code == 0
    t = json.loads(out)["tables"]
    assert t["KK_T3_stable"] == t["KK_T4_stable"]


def test_compare_models_and_operad_verify(capsys):
    assert run(capsys, "compare-models", "--example", "free", "--window", "2")[0] == 0
    code, out, _ = run(capsys, "verify", "--example", "operad_binary", "--arity", "3", "--seed", "2",
                       "--samples", "3")
    assert code == 0
    assert out.count("random monoidality") == 3


def test_broken_input_fails_verdict(capsys):
    code, out, _ = run(capsys, "verify", "--example", "custom", "--input", str(GOLDEN / "broken_algebra.json"))
    assert code == 1
    assert "FAIL  algebra sqz1" in out


def test_custom_round_trip(capsys, tmp_path):
    p = tmp_path / "a.json"
    dump(chain_square_zero(2, degree=1), p)
    code, out, _ = run(capsys, "compare-models", "--example", "custom", "--input", str(p), "--format", "json")
    assert code == 0
    assert json.loads(out)["ok"] is True


@pytest.mark.parametrize("argv, kind", [
    (["bar", "--example", "nope"], "precondition"),
    (["bar", "--window", "9"], "precondition"),
    (["bar", "--field", "p=4"], "precondition"),
    (["bar", "--field", "r"], "precondition"),
    (["operad-check", "--example", "operad_unit", "--field", "p=3"], "precondition"),
    (["operad-check", "--example", "kfi"], "precondition"),
    (["double-dual", "--example", "kfi"], "precondition"),
    (["double-dual", "--example", "square_zero", "--trunc", "7"], "precondition"),
    (["dual", "--example", "square_zero", "--window", "2", "--dims", "1"], "precondition"),
    (["bar", "--example", "custom"], "precondition"),
    (["bar", "--example", "custom", "--input", "/nonexistent.json"], "precondition"),
    (["bar", "--format", "xml"], "usage"),
    (["frobnicate"], "usage"),
    ([], "usage"),
])
def test_usage_errors_exit_2(capsys, argv, kind):
    with pytest.raises(SystemExit) if kind == "usage" else nullcontext() as e:
        code = main(argv)
    if kind == "usage":
        code = e.value.code
    assert code == 2
    diag = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert diag["error"] == kind


def test_malformed_input_names_location(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"format": "koszulcat",\n  oops}')
    code, _, err = run(capsys, "bar", "--example", "custom", "--input", str(p))
    assert code == 2
    assert json.loads(err)["where"] == "line 2 col 3"


def test_out_file(capsys, tmp_path):
    p = tmp_path / "r.csv"
    code, out, _ = run(capsys, "bar", "--example", "square_zero", "--window", "2", "--format", "csv", "--out", str(p))
    assert code == 0 and out == ""
    assert p.read_text() == (GOLDEN / "bar_sqz_w2.csv").read_text()


def test_timing_only_on_request(capsys):
    _, out, _ = run(capsys, "dual", "--example", "square_zero", "--window", "1", "--format", "json")
    assert json.loads(out)["metrics"] == {"size": json.loads(out)["metrics"]["size"]}
    _, out, _ = run(capsys, "dual", "--example", "square_zero", "--window", "1", "--format", "json", "--timing")
    assert json.loads(out)["metrics"]["seconds"] >= 0


def test_output_independent_of_threads():
    argv = [sys.executable, "-m", "koszulcat", "bar", "--example", "kfi", "--window", "3", "--format", "json"]
    outs = set()
    for threads in ("1", "4"):
        env = dict(os.environ, KOSZULCAT_THREADS=threads)
        r = subprocess.run(argv, capture_output=True, text=True, env=env, check=True)
        outs.add(r.stdout)
    assert len(outs) == 1


def test_seeded_verify_is_deterministic(capsys):
    argv = ["verify", "--example", "square_zero", "--window", "2", "--seed", "7", "--format", "json"]
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]
