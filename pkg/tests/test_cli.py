import io
import json
import subprocess
import sys

import pytest

from rankone.cli import EXIT_FLAGGED, EXIT_INPUT, EXIT_OK, main


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def run_json(*argv):
    code, out, err = run(*argv)
    return code, json.loads(out) if out else None, err


def test_group_info():
    code, rec, _ = run_json("group", "info", "--family", "so", "--n", "3")
    assert code == EXIT_OK
    assert (rec["deltaG"], rec["m1"], rec["m2"]) == (2, 2, 0)
    assert "tolerances" in rec


def test_spherical_eval():
    code, rec, _ = run_json("spherical", "eval", "--family", "so", "--n", "3", "--x", "0.5",
                            "--t", "2")
    assert code == EXIT_OK
    assert rec["value"] == pytest.approx(0.6480543, abs=1e-7)
    assert rec["tolerances"]


def test_cusp_criterion_divergent_is_not_an_error():
    code, rec, _ = run_json("cusp", "criterion", "--space", "rhn", "--n", "3")
    assert code == EXIT_OK
    assert rec["exponent"] == 0 and rec["converges"] is False


def test_lp_commands_are_exact():
    code, rec, _ = run_json("lp", "quotient", "--delta-g", "2", "--delta-gamma", "3/2")
    assert code == EXIT_OK
    assert "4" in json.dumps(rec)
    code, rec, _ = run_json("lp", "combine", "--p", "4", "--q", "4")
    assert code == EXIT_OK and "2" in json.dumps(rec)


def test_tree_commands():
    code, rec, _ = run_json("tree", "distance", "--spec", "free:2", "--word", "a b A")
    assert code == EXIT_OK and rec["distance"] == 3
    code, rec, _ = run_json("tree", "probe", "--spec", "free:2")
    assert code == EXIT_OK and rec["verdict"] == "unbounded"


def test_input_errors_exit_one():
    assert run("group", "info", "--family", "so", "--n", "0")[0] == EXIT_INPUT
    assert run("group", "info", "--family", "octonion", "--n", "2")[0] == EXIT_INPUT
    assert run("nonsense")[0] == EXIT_INPUT
    code, out, err = run("spherical", "eval", "--family", "so", "--n", "3", "--x", "5", "--t", "1")
    assert code == EXIT_INPUT and out == "" and "error" in err


def test_failed_check_exits_two():
    code, rec, _ = run_json("spherical", "check-bounds", "--family", "so", "--n", "3",
                            "--p", "4", "--curve", "one")
    assert code == EXIT_FLAGGED
    assert rec["passed"] is False


def test_provenance_on_stderr():
    _, _, err = run("group", "info", "--family", "su", "--n", "2")
    prov = json.loads(err.strip().splitlines()[0])
    assert prov["command"] == "group info" and prov["seed"] == 0


def test_deterministic_output():
    argv = ("walk", "radius", "--target", "free:2", "--steps", "200", "--trials", "50",
            "--seed", "7")
    a, b = run(*argv), run(*argv)
    assert a[0] == b[0] and a[1] == b[1]
    argv = ("orbit", "enumerate", "--spec", "modular", "--radius", "6", "--no-cache")
    assert run(*argv)[1] == run(*argv)[1]


def test_csv_output():
    code, out, _ = run("spherical", "eval", "--family", "so", "--n", "3", "--x", "0.5",
                       "--t-grid", "0:2:0.5", "--output", "csv")
    assert code == EXIT_OK
    rows = out.strip().splitlines()
    assert len(rows) >= 4


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "rankone.cli", "lp", "threshold",
                           "--family", "so", "--n", "3", "--x", "0"],
                          capture_output=True, text=True)
    assert proc.returncode == EXIT_OK
    assert json.loads(proc.stdout)["tolerances"] == {}
