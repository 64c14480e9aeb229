"""Command line behavior: report schema, exit codes, and byte determinism."""

from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

from weylift.cli import main

SPEC_DIR = Path(__file__).resolve().parent.parent / "specs"


def _run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_analyze_bkk_report(capsys):
    code, out, err = _run(
        capsys, ["analyze", "--input", str(SPEC_DIR / "bkk_p3.spec"), "--task", "analyze"]
    )
    assert code == 0
    rep = json.loads(out)
    assert rep["schema"] == 1
    assert rep["params"]["field"]["p"] == 3 and rep["params"]["n"] == 2
    ana = rep["analyze"]
    assert ana["liftable"] is False and ana["poisson"] is False
    C = ana["C"]
    assert C[0][3] == [[[0, 0, 0, 0], 2]]
    assert C[3][0] == [[[0, 0, 0, 0], 1]]
    for i in range(4):
        for j in range(4):
            if (i, j) not in ((0, 3), (3, 0)):
                assert C[i][j] == []


def test_full_pipeline_and_gate(capsys):
    code, out, err = _run(
        capsys,
        [
            "gamma",
            "--input",
            str(SPEC_DIR / "bkk_p3.spec"),
            "--task",
            "validate,analyze,lift,trace-check",
        ],
    )
    assert code == 0
    rep = json.loads(out)
    assert rep["validate"]["valid"] is True
    assert rep["gamma"]["gamma"] == [[], [], [[[0, 1, 0, 0], 1]], []]
    assert rep["gamma"]["symmetric"] is False
    assert rep["lift"]["liftable"] is False
    assert rep["lift"]["harmonic"] == [[1, 4, [[[0, 0, 0, 0], 2]]]]
    assert rep["trace_check"]["agree"] is True
    assert rep["trace_check"]["samples"] == 8


def test_lift_on_liftable_input(capsys):
    code, out, err = _run(capsys, ["lift", "--input", str(SPEC_DIR / "etale_i0.spec")])
    assert code == 0
    rep = json.loads(out)
    assert rep["lift"]["liftable"] is True
    assert rep["lift"]["verified"] is True
    assert rep["lift"]["Phi"]  # 2n images with W_2 coefficients [a1, a2]
    for img in rep["lift"]["Phi"]:
        for exps, coeff in img:
            assert len(coeff) == 2


def test_invalid_endomorphism_exits_2(capsys, tmp_path):
    bad = _write(tmp_path, "bad.spec", "p = 3\nn = 1\nphi.1 = z1\nphi.2 = z1\n")
    code, out, err = _run(capsys, ["validate", "--input", bad])
    assert code == 2
    rep = json.loads(out)
    assert rep["validate"]["valid"] is False
    v = rep["validate"]["violation"]
    assert (v["i"], v["j"]) == (1, 2)
    assert v["residual"] == [[[0, 0], 1]]


def test_syntax_error_exits_2(capsys, tmp_path):
    bad = _write(tmp_path, "syn.spec", "p = 3\nn = 1\nphi.1 = z1 +\nphi.2 = z2\n")
    code, out, err = _run(capsys, ["validate", "--input", bad])
    assert code == 2
    assert "error" in err.lower()


def test_missing_file_exits_2(capsys, tmp_path):
    code, out, err = _run(capsys, ["analyze", "--input", str(tmp_path / "nope.spec")])
    assert code == 2


def test_budget_exits_3(capsys):
    code, out, err = _run(
        capsys, ["analyze", "--input", str(SPEC_DIR / "bkk_p3.spec"), "--budget", "10"]
    )
    assert code == 3


def test_unknown_task_exits_2(capsys):
    code, out, err = _run(
        capsys, ["analyze", "--input", str(SPEC_DIR / "etale_i0.spec"), "--task", "fly"]
    )
    assert code == 2


def test_reports_are_byte_identical(capsys):
    argv = ["gamma", "--input", str(SPEC_DIR / "etale_i1.spec"), "--task", "validate,analyze,lift"]
    code1, out1, _ = _run(capsys, argv)
    code2, out2, _ = _run(capsys, argv)
    assert code1 == code2 == 0
    assert out1 == out2
    assert "timings" not in json.loads(out1)


def test_timings_flag_adds_section(capsys):
    code, out, _ = _run(
        capsys, ["analyze", "--input", str(SPEC_DIR / "etale_i0.spec"), "--timings"]
    )
    assert code == 0
    assert "timings" in json.loads(out)


def test_json_out_writes_file(capsys, tmp_path):
    target = tmp_path / "report.json"
    code, out, _ = _run(
        capsys,
        ["analyze", "--input", str(SPEC_DIR / "etale_i0.spec"), "--json-out", str(target)],
    )
    assert code == 0
    assert out == ""
    rep = json.loads(target.read_text())
    assert rep["schema"] == 1


def test_corpus_subcommand_deterministic(capsys):
    argv = ["corpus", "--p", "3", "--n", "1", "--count", "8", "--seed", "7"]
    code1, out1, _ = _run(capsys, argv)
    code2, out2, _ = _run(capsys, argv)
    assert code1 == code2 == 0
    assert out1 == out2
    rep = json.loads(out1)
    assert len(rep["entries"]) == 8
    assert rep["all_consistent"] is True
    for entry in rep["entries"]:
        assert entry["liftable"] == entry["poisson"] == entry["symmetric"]


def test_selftest_subcommand(capsys):
    code, out, err = _run(capsys, ["selftest"])
    assert code == 0
    rep = json.loads(out)
    assert rep["all_ok"] is True
    names = {f["name"] for f in rep["fixtures"]}
    assert {"witt-ring", "normal-order", "bkk", "etale-family"} <= names


def test_console_script_entry():
    r = subprocess.run(
        [sys.executable, "-m", "weylift.cli", "validate", "--input", str(SPEC_DIR / "identity_p3.spec")],
        capture_output=True,
        text=True,
    )
    assert r.returncode == 0
    assert json.loads(r.stdout)["validate"]["valid"] is True
