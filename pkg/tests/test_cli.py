import json
import subprocess
import sys

import pytest

from nefcone.cli import main

SIXTH_SPEC = json.dumps({"characteristics": [["1/6", "1/6"]], "level": 72, "variable": "T2", "box_radius": 3})


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(argv, capsys):
    code, out, _ = run(argv + ["--json"], capsys)
    return code, json.loads(out)


def test_nef_check_example(capsys):
    code, rep = run_json(["nef-check", "--g", "2", "--n", "5", "--a", "3", "--b", "1"], capsys)
    assert code == 0
    assert rep["outputs"]["is_nef"] is True and rep["citations"] and rep["exact"]


def test_nef_check_failure_exit_code(capsys):
    code, rep = run_json(["nef-check", "--g", "2", "--n", "1", "--a", "11", "--b", "1"], capsys)
    assert code == 1
    assert rep["outputs"]["witness_value"] == "-1/12"


def test_usage_errors_exit_two(capsys):
    assert run(["nef-check", "--g", "2", "--n", "0", "--a", "1", "--b", "1"], capsys)[0] == 2
    assert run(["general-type"], capsys)[0] == 2
    assert run(["cusps", "--g", "3", "--n", "11"], capsys)[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["nef-check", "--g", "2"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        main(["reproduce", "no-such-target"])


def test_rational_flags(capsys):
    code, rep = run_json(["nef-check", "--g", "3", "--n", "4", "--a", "3/2", "--b", "1/2"], capsys)
    assert code == 0 and rep["outputs"]["margin"] == "0"


def test_theta_order_example(capsys):
    code, rep = run_json(["theta", "order", "--input", SIXTH_SPEC], capsys)
    assert code == 0 and rep["outputs"]["valuation"] == "1"


def test_theta_order_from_file(tmp_path, capsys):
    f = tmp_path / "spec.json"
    f.write_text(SIXTH_SPEC)
    code, rep = run_json(["theta", "order", "--input", f"@{f}"], capsys)
    assert code == 0 and rep["outputs"]["valuation"] == "1"


def test_charts_verify(capsys):
    code, rep = run_json(["charts", "--verify"], capsys)
    assert code == 0 and rep["passed"]


def test_k_class_and_general_type(capsys):
    code, rep = run_json(["k-class", "--g", "2", "--n", "4"], capsys)
    assert code == 0 and rep["outputs"]["strictly_positive"] is False
    code, rep = run_json(["general-type", "--g", "7", "--n", "1"], capsys)
    assert rep["outputs"]["coefficient"] == "-1/16" and rep["outputs"]["positive"] is False
    code, rep = run_json(["general-type", "--table"], capsys)
    assert code == 0


def test_strata_shioda_fiber_cusps(capsys):
    assert run_json(["strata", "--g", "3", "--n", "3"], capsys)[0] == 0
    code, rep = run_json(["shioda", "--n", "3"], capsys)
    assert code == 0 and rep["outputs"]["minus_nD"]["fiber_degree"] == "18"
    code, rep = run_json(["fiber-type", "IIIb", "--n", "3"], capsys)
    assert rep["outputs"]["total"] == 27
    code, rep = run_json(["cusps", "--g", "2", "--n", "3"], capsys)
    assert rep["outputs"]["primitive_vectors"] == 80 and "convention" in rep["outputs"]


def test_theta_numeric_is_marked_inexact(capsys):
    code, rep = run_json(["theta", "numeric", "--tau", "1j,0;0,1j"], capsys)
    assert code == 0 and rep["exact"] is False


def test_theta_quasi_passes(capsys):
    code, rep = run_json(["theta", "quasi", "--samples", "20", "--seed", "1"], capsys)
    assert code == 0 and rep["outputs"]["worst_residual"] < 1e-8


def test_theta_extension(capsys):
    code, rep = run_json(["theta", "extension", "--p", "1", "--charts", "1"], capsys)
    assert code == 0 and len(rep["outputs"]["reports"]) == 4


@pytest.mark.parametrize(
    "target, extra",
    [
        ("thm1.1-table", []),
        ("prop2.4-counts", ["--n", "3"]),
        ("thm0.2-boundary", ["--g", "2", "--n", "4"]),
        ("g2-proof-ledger", []),
        ("general-type-table", []),
        ("fiber-counts", []),
        ("nef-boundary", []),
        ("genus2-ledger", []),
        ("prop2.5-certificate", []),
        ("extension-certificate", []),
    ],
)
def test_reproduce_targets(target, extra, capsys):
    code, rep = run_json(["reproduce", target] + extra, capsys)
    assert code == 0 and rep["passed"] and rep["citations"]


def test_reproduce_fiber_counts_at_three(capsys):
    _, rep = run_json(["reproduce", "prop2.4-counts", "--n", "3"], capsys)
    text = json.dumps(rep["outputs"])
    assert "27" in text and "9" in text


def test_json_output_is_deterministic(capsys):
    argv = ["reproduce", "general-type-table", "--json"]
    first = run(argv, capsys)[1]
    assert first == run(argv, capsys)[1]


def test_text_output(capsys):
    code, out, _ = run(["fiber-type", "IIIa", "--n", "4"], capsys)
    assert code == 0 and "P1xP1" in out


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "nefcone", "nef-check", "--g", "2", "--n", "4", "--a", "3", "--b", "1", "--json"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["outputs"]["is_nef"]
