import subprocess
import sys

import pytest

from treecut.cli import run
from conftest import CORPUS

SAMPLE = str(CORPUS / "sample8.bn")


def test_analyze_sample8_records():
    code, out, _ = run(["analyze", SAMPLE, "--format", "records"])
    assert code == 0
    lines = out.splitlines()
    assert "problem kind=belief vars=8 edges=14 ordering=min-fill fill_edges=0 width=3" in lines
    assert "cutset size=3 exact=1 vars=B,E,F" in lines
    levels = [ln for ln in lines if ln.startswith("level=")]
    assert [tuple(ln.split()[1:3]) for ln in levels] == [("s=3", "r=3"), ("s=2", "r=4"), ("s=1", "r=6")]
    assert "dominating time=4 space=2 space_label=k^2" in lines
    assert "dominating time=5 space=1 space_label=linear" in lines


def test_analyze_text_table():
    code, out, _ = run(["analyze", SAMPLE])
    assert code == 0
    assert "dominating tradeoffs: (k^4, k^2), (k^5, linear)" in out
    assert "T2 (s=1): {A,B} {B,C,D,E,F,G,H}" in out


def test_bad_sep_bound_lists_levels():
    code, _, err = run(["infer", "belief", SAMPLE, "--query", "A", "--sep-bound", "5"])
    assert code == 1
    assert "{3, 2, 1}" in err


@pytest.mark.parametrize("strategy", ["elim", "brute", "cutset"])
@pytest.mark.parametrize("bound", ["3", "2", "1"])
def test_belief_oracle_pass(strategy, bound):
    code, out, _ = run(["infer", "belief", SAMPLE, "--query", "A", "--evidence", "H=1,C=0",
                        "--sep-bound", bound, "--strategy", strategy, "--oracle", "--format", "records"])
    assert code == 0
    assert "oracle_check PASS" in out


def test_mpe_oracle_pass():
    code, out, _ = run(["infer", "mpe", SAMPLE, "--evidence", "H=1", "--oracle"])
    assert code == 0 and "PASS" in out


def test_solve_count():
    code, out, _ = run(["solve", str(CORPUS / "random_csp_0.csp"), "--count", "--oracle", "--format", "records"])
    assert code == 0
    assert "count n=208" in out and "oracle_check PASS" in out


def test_inconsistent_exit_code():
    code, out, _ = run(["solve", str(CORPUS / "random_csp_2.csp"), "--format", "records"])
    assert code == 2 and "result inconsistent" in out


def test_impossible_evidence_exit_code(tmp_path):
    p = tmp_path / "det.bn"
    p.write_text("var A 2\nvar B 2\ncpt A\n0.5 0.5\ncpt B | A\n1 0\n1 0\n")
    code, out, _ = run(["infer", "belief", str(p), "--query", "A", "--evidence", "B=1", "--oracle"])
    assert code == 2
    assert "impossible evidence" in out and "PASS" in out


def test_optimize_with_criterion_file():
    code, out, _ = run(["optimize", str(CORPUS / "sample8.csp"), "--criterion", str(CORPUS / "sample8.crit"),
                        "--oracle", "--format", "records"])
    assert code == 0
    assert "optimum value=2.0" in out and "oracle_check PASS" in out


def test_optimize_needs_criterion():
    code, _, err = run(["optimize", str(CORPUS / "sample8.csp")])
    assert code == 1 and "no criterion" in err


def test_meu():
    code, out, _ = run(["meu", str(CORPUS / "decision_0.id"), "--oracle", "--format", "records"])
    assert code == 0
    assert "decisions D0=0 D1=2" in out and "oracle_check PASS" in out


def test_bench_records():
    code, out, _ = run(["bench", SAMPLE, "--format", "records", "--oracle"])
    assert code == 0
    rows = [ln for ln in out.splitlines() if ln.startswith("bench ")]
    assert len(rows) == 9
    assert all(("law=-" if "strategy=elim" in r else "law=ok") in r for r in rows)
    assert "agreement PASS" in out and "space_laws PASS" in out and "oracle_check PASS" in out


@pytest.mark.parametrize("argv, message", [
    (["infer", "belief", SAMPLE, "--query", "Z"], "unknown variable"),
    (["infer", "belief", SAMPLE, "--query", "A", "--evidence", "B=7"], "outside"),
    (["infer", "belief", SAMPLE, "--query", "A", "--evidence", "A=0"], "part of the evidence"),
    (["solve", SAMPLE], "needs a constraint file"),
    (["meu", SAMPLE], "needs a influence file"),
    (["analyze", "/nonexistent.bn"], "cannot read"),
    (["analyze", SAMPLE, "--ordering", "given"], "--order"),
])
def test_usage_errors(argv, message):
    code, _, err = run(argv)
    assert code == 1 and message in err


def test_given_ordering():
    code, out, _ = run(["analyze", SAMPLE, "--ordering", "given", "--order", "H,G,F,E,D,C,B,A", "--format", "records"])
    assert code == 0 and "order H,G,F,E,D,C,B,A" in out


def test_argparse_errors_exit_1():
    proc = subprocess.run([sys.executable, "-m", "treecut.cli", "infer", "belief", SAMPLE], capture_output=True)
    assert proc.returncode == 1
    proc = subprocess.run([sys.executable, "-m", "treecut.cli", "infer", "belief", SAMPLE, "--query", "A",
                           "--strategy", "magic"], capture_output=True)
    assert proc.returncode == 1


def test_parse_error_exit_1(tmp_path):
    p = tmp_path / "bad.bn"
    p.write_text("var A 2\ncpt A\n0.5 0.4\n")
    code, _, err = run(["analyze", str(p)])
    assert code == 1 and "bad.bn:3:1" in err


def test_records_are_deterministic():
    argv = ["bench", SAMPLE, "--format", "records"]
    first = run(argv)[1]
    assert first == run(argv)[1]
