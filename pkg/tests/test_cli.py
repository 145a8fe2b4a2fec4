import json
import subprocess
import sys

import pytest

from floerpot.cli import EXIT_DOMAIN, EXIT_OK, EXIT_PARSE, main


def call(capsys, *argv):
    status = main(list(argv))
    out, err = capsys.readouterr()
    return status, out, err


def test_potential_table(capsys):
    status, out, _ = call(capsys, "potential", "tstar_s3", "--no-bulk")
    assert status == EXIT_OK
    assert out.startswith("PO = ")
    assert "T^(1/4)*y^-1" in out


def test_potential_json_has_facet_terms(capsys):
    status, out, _ = call(capsys, "potential", "quadric", "--format", "json")
    d = json.loads(out)
    assert status == EXIT_OK and len(d["terms"]) == 5
    assert {t["energy"] for t in d["terms"]} == {"1/3"}


def test_critical_exact(capsys):
    status, out, _ = call(capsys, "critical", "synthetic_outside", "--format", "json")
    d = json.loads(out)
    assert status == EXIT_OK
    (sol,) = d["solutions"]
    assert sol["leading"] == {"w": "0", "y": "1", "z": "-1"}
    assert sol["leading_jacobian_det"] == "1"
    assert sol["lift"]["residual_valuation"] == "5/4"


def test_critical_degenerate_refused(capsys):
    status, out, _ = call(capsys, "critical", "tstar_s3", "--no-bulk", "--format", "json")
    d = json.loads(out)
    assert status == EXIT_OK and d["degenerate_locus"]
    assert all(s["lift"] == "refused: DegenerateJacobian" for s in d["solutions"])


def test_critical_numeric_quadric(capsys):
    status, out, _ = call(capsys, "critical", "quadric", "--mode", "numeric", "--format", "json")
    assert status == EXIT_OK and len(json.loads(out)["solutions"]) == 3


def test_torsion_command(capsys):
    status, out, _ = call(capsys, "torsion", "tstar_s3", "--point", "1,1,-1", "--format", "json")
    d = json.loads(out)
    assert status == EXIT_OK
    assert d["module"] == "(Λ0/T^(7/8))^8" and d["bounds"] == {"hofer_X": "7/8"}


def test_displacement_command(capsys):
    status, out, _ = call(capsys, "displacement", "synthetic_outside", "--limit-lambda",
                          "--format", "json")
    d = json.loads(out)
    assert status == EXIT_OK
    assert d["bounds"] == {"hofer_X": "7/8", "hofer_mixed": "5/4"}
    assert d["limit"]["hofer_mixed_limit"] == "7/4"


def test_hofer_table(capsys):
    status, out, _ = call(capsys, "hofer", "flag")
    assert status == EXIT_OK
    assert out.splitlines()[0] == "‖H‖_X = 10π, ‖H‖_S = 0"
    assert "(2, 1, 1)" in out


def test_hofer_parameter_override(capsys):
    status, out, _ = call(capsys, "hofer", "flag", "--a", "1", "--b", "0", "--format", "json")
    d = json.loads(out)
    assert status == EXIT_OK and d["norm_X"] == d["floor"] == "4π"


def test_malformed_json_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    status, out, err = call(capsys, "potential", str(bad))
    assert status == EXIT_PARSE and out == "" and err.startswith("error: ParseError")


def test_missing_input_exit_code(capsys):
    status, out, _ = call(capsys, "potential", "no_such_fixture")
    assert status == EXIT_PARSE and out == ""


def test_domain_error_exit_code_and_no_partial_output(capsys):
    status, out, err = call(capsys, "potential", "tstar_s3", "--precision", "1/8")
    assert status == EXIT_DOMAIN and out == "" and "PrecisionTooLow" in err


def test_underdetermined_system_exit_code(capsys):
    status, out, err = call(capsys, "critical", "tstar_s3")
    assert status == EXIT_DOMAIN and out == "" and "InvalidArgument" in err


def test_bad_precision_text(capsys):
    status, _, _ = call(capsys, "potential", "tstar_s3", "--precision", "abc")
    assert status == EXIT_PARSE


def test_json_output_is_deterministic(capsys):
    _, a, _ = call(capsys, "critical", "quadric", "--mode", "numeric", "--format", "json")
    _, b, _ = call(capsys, "critical", "quadric", "--mode", "numeric", "--format", "json")
    assert a == b


def test_potential_json_feeds_critical(capsys, tmp_path):
    _, out, _ = call(capsys, "potential", "synthetic_outside", "--format", "json")
    path = tmp_path / "pf.json"
    path.write_text(out)
    status, out, _ = call(capsys, "critical", str(path), "--format", "json")
    d = json.loads(out)
    assert status == EXIT_OK
    assert d["solutions"][0]["lift"]["assignment"]["w"] == "-1*T^(5/8) + O(T^(1))"


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "floerpot.cli", "hofer", "flag", "--format", "json"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["holds"] is True


@pytest.mark.parametrize("cmd", ["potential", "critical", "torsion", "displacement"])
def test_every_command_runs_on_synthetic(capsys, cmd):
    status, out, _ = call(capsys, cmd, "synthetic_outside")
    assert status == EXIT_OK and out.strip()
