import csv
import io
import json
import math

import numpy as np
import pytest

from expbern.cli import main, parse_grid, parse_int_range
from expbern.errors import ParseError


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_parse_grid():
    assert np.allclose(parse_grid("0:1:0.25"), [0, 0.25, 0.5, 0.75, 1])
    for bad in ["0:1", "a:1:0.1", "0:1:0", "1:1:0.5"]:
        with pytest.raises(ParseError):
            parse_grid(bad)
    assert parse_int_range("3:5") == [3, 4, 5]
    assert parse_int_range("7") == [7]


def test_phi_csv(capsys):
    code, out, err = run(capsys, "phi", "--lambdas", "1,-1", "--grid", "0:2:0.5")
    assert code == 0
    r = rows(out)
    assert float(r[2]["re"]) == pytest.approx(math.sinh(1.0), rel=1e-15)


def test_phi_json_and_output_file(capsys, tmp_path):
    path = tmp_path / "phi.json"
    code, out, _ = run(capsys, "phi", "--lambdas", "1i,-1i", "--grid", "0:3:1", "--format", "json", "-o", str(path))
    assert code == 0 and out == ""
    doc = json.loads(path.read_text())
    assert doc["command"] == "phi" and doc["violations"] == []


def test_taylor(capsys):
    code, out, err = run(capsys, "taylor", "--lambdas", "1,1,-1,-1", "--K", "6")
    assert code == 0
    r = rows(out)
    assert [float(x["re"]) for x in r] == [0, 0, 0, 1, 0, 2, 0]
    assert "# ok" in err


def test_pfam(capsys):
    code, out, _ = run(capsys, "pfam", "--s-max", "2")
    assert code == 0
    r = rows(out)
    assert (r[0]["numerator"], r[0]["denominator"]) == ("1", "2")


def test_genfun(capsys):
    code, out, _ = run(capsys, "genfun", "--kind", "odd", "--x", "1", "--y", "0.5i")
    assert code == 0
    assert float(rows(out)[0]["abs_diff"]) < 1e-8


def test_basis_both(capsys):
    code, out, err = run(capsys, "basis", "--lambdas", "0,0,0", "--method", "both", "--grid", "0:1:0.25", "--shape")
    assert code == 0
    assert "constructions agree" in err


def test_cheb_scan(capsys):
    code, out, err = run(capsys, "cheb", "--lambdas", "1i,-1i", "--b", "3.141592653589793", "--scan", "0.1:4:0.01")
    assert code == 0
    bs = [float(r["b"]) for r in rows(out)]
    assert bs[0] == pytest.approx(math.pi, abs=1e-5)


def test_operator_json(capsys):
    code, out, _ = run(capsys, "operator", "--lambdas", "0,1", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    knots = [r[1] for r in doc["results"]["rows"]]
    assert knots == pytest.approx([0, 1], abs=1e-12)


def test_operator_violation_exit(capsys):
    code, _, err = run(capsys, "operator", "--lambdas", "0,1,-1,0.5", "--b", "2", "--tol-repro", "1e-40")
    assert code == 1
    assert "FAIL" in err


def test_converge_pm(capsys):
    code, out, err = run(capsys, "converge", "--family", "pm", "--s-max", "4")
    assert code == 0
    assert "even ratio" in err


def test_converge_experiment(capsys):
    code, out, _ = run(capsys, "converge", "--s-max", "2", "--experiment")
    assert code == 0
    assert {r["function"] for r in rows(out)} >= {"x", "cos", "exp"}


@pytest.mark.parametrize(
    "argv",
    [
        ["phi", "--lambdas", "1,x", "--grid", "0:1:1"],
        ["phi", "--lambdas", "1,1"],
        ["phi", "--lambdas", "1", "--grid", "0:1:1", "--bogus"],
        ["nosuch"],
        ["phi", "--lambdas", "1", "--grid", "0:1:1", "--tol", "-1"],
    ],
)
def test_parse_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2


def test_library_error_exit_1(capsys):
    code, out, _ = run(capsys, "operator", "--lambdas", "0,0", "--format", "json")
    assert code == 1
    assert json.loads(out)["error"]["kind"] == "ValueError"
