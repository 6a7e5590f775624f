import csv
import io
import json

import numpy as np
import pytest

from maternfield.cli import main

MATERN_HALF = {"model": "rank0", "measures": [{"type": "matern", "nu": 0.5, "a": 1.0}]}
RANK1 = {
    "model": "rank1",
    "measures": [{"type": "matern", "nu": 1.5, "a": 1.0, "sigma2": 0.7}, {"type": "dual_matern", "nu": 1.0}],
}
PARSIMONIOUS = {
    "parsimonious": {"nu": [0.5, 1.0, 1.5], "a": 1.0, "sigma2": [1, 1, 1], "beta": [[1, 0.9, 0.81], [0.9, 1, 0.9], [0.81, 0.9, 1]]}
}


@pytest.fixture
def files(tmp_path):
    def write(name, content):
        p = tmp_path / name
        p.write_text(content if isinstance(content, str) else json.dumps(content))
        return str(p)

    return write


def _csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], [[float(v) for v in r] for r in rows[1:]]


def test_validate_parsimonious(files, capsys):
    assert main(["validate", files("s.json", PARSIMONIOUS)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["status"] == "valid" and out["rule"] == "parsimonious"


def test_validate_invalid_and_undetermined(files, capsys):
    bad = {"nu": [[0.5, 1.0], [1.0, 1.5]], "a": [[1, 1], [1, 1]], "sigma": [[1, 0.99], [0.99, 1]]}
    assert main(["validate", files("b.json", bad)]) == 2
    out = json.loads(capsys.readouterr().out)
    assert out["status"] == "invalid" and out["witness"]["eigenvalue"] < 0
    und = {"nu": [[1, 1], [1, 1]], "a": [[1, 1.5], [1.5, 2]], "sigma": [[1, 0.5], [0.5, 1]]}
    assert main(["validate", files("u.json", und)]) == 4


def test_kernel_eval_rank0(files, capsys):
    pairs = files("p.csv", "x_-1,x_0,x_1,y_-1,y_0,y_1\n0,0,0,0,1,0\n1,1,1,1,1,1\n")
    assert main(["kernel-eval", files("m.json", MATERN_HALF), pairs, "--threads", "1"]) == 0
    header, rows = _csv(capsys.readouterr().out)
    assert header == ["B"]
    assert rows[0][0] == pytest.approx(np.exp(-1), abs=1e-5)
    assert rows[1][0] == pytest.approx(1.0, abs=1e-8)


def test_kernel_eval_rank1_columns_and_determinism(files, tmp_path):
    pairs = files("p.csv", "x_-1,x_0,x_1,y_-1,y_0,y_1\n0,0,0,0.2,1,0\n0,0,0,0,0,0\n")
    model = files("m.json", RANK1)
    out1, out2 = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
    assert main(["kernel-eval", model, pairs, "-o", out1, "--threads", "1"]) == 0
    assert main(["kernel-eval", model, pairs, "-o", out2, "--threads", "2"]) == 0
    text = open(out1).read()
    assert text == open(out2).read()
    header, rows = _csv(text)
    assert header[:3] == ["B_{-1,-1}", "B_{-1,0}", "B_{-1,1}"] and len(header) == 9
    np.testing.assert_allclose(np.array(rows[1]).reshape(3, 3), (0.7 / 3 + 2 / 3) * np.eye(3), atol=1e-6)


def test_kernel_eval_simplex_columns(files, capsys):
    model = {"model": "rank2_simplex", "measures": [{"type": "point_mass", "lambda0": 1.3}] + [{"type": "point_mass", "lambda0": 1.0, "mass": 0}] * 4}
    pairs = files("p.csv", "x_-1,x_0,x_1,y_-1,y_0,y_1\n0,0,0,0,0,0\n")
    assert main(["kernel-eval", files("m.json", model), pairs]) == 0
    header, rows = _csv(capsys.readouterr().out)
    assert len(header) == 21 and header[0] == "B_{-1-1,-1-1}"
    # E[T_00 T_00] at the origin for component 1 only
    from maternfield.tensor_bases import isotropic_average, simplex_vertex

    assert rows[0][header.index("B_{00,00}")] == pytest.approx(isotropic_average(simplex_vertex(1))[1, 1], abs=1e-14)


def test_simulate_csv(files, capsys):
    pts = files("pts.csv", "x_-1,x_0,x_1\n0,0,0\n1,0,0\n")
    model = files("m.json", RANK1)
    args = ["simulate", model, pts, "--samples", "3", "--modes", "64", "--seed", "9"]
    assert main(args) == 0
    first = capsys.readouterr().out
    assert main(args + ["--threads", "3"]) == 0
    assert capsys.readouterr().out == first
    header, rows = _csv(first)
    assert header == ["sample_id", "point_id", "T_{-1}", "T_{0}", "T_{1}"]
    assert len(rows) == 6 and rows[-1][:2] == [2, 1]


def test_gg_coeffs(capsys):
    assert main(["gg-coeffs", "--ell-max", "2"]) == 0
    header, rows = _csv(capsys.readouterr().out)
    assert header == ["ell", "ell1", "ell2", "m", "m1", "m2", "value"]
    vals = {tuple(int(v) for v in r[:6]): r[6] for r in rows}
    assert vals[(0, 0, 0, 0, 0, 0)] == 1.0
    assert abs(vals[(0, 1, 1, 0, 1, 1)]) == pytest.approx(1 / np.sqrt(3), abs=1e-15)


def test_selftest_subset(capsys):
    assert main(["selftest", "--skip", "2", "3", "4", "5", "6", "8", "9", "10", "11", "12"]) == 0
    out = capsys.readouterr().out
    assert "2/2 checks passed" in out


@pytest.mark.parametrize(
    "argv, code",
    [
        (["bogus"], 1),
        (["gg-coeffs", "--ell-max", "-1"], 1),
        (["validate", "/nonexistent.json"], 1),
    ],
)
def test_usage_errors(argv, code, capsys):
    assert main(argv) == code
    err = capsys.readouterr().err
    assert err.startswith("maternfield:") and err.count("\n") == 1


def test_input_errors(files, capsys):
    pairs = files("p.csv", "x_-1,x_0,x_1,y_-1,y_0,y_1\n0,0,0,0,1,0\n")
    bad_schema = files("bad.json", {"model": "rank0", "measures": [{"type": "matern", "nu": -1, "a": 1}]})
    assert main(["kernel-eval", bad_schema, pairs]) == 1
    wrong_count = files("wc.json", {"model": "rank1", "measures": MATERN_HALF["measures"]})
    assert main(["kernel-eval", wrong_count, pairs]) == 1
    bad_header = files("h.csv", "a,b,c,d,e,f\n0,0,0,0,0,0\n")
    assert main(["kernel-eval", files("m.json", MATERN_HALF), bad_header]) == 1
    atom = files("at.json", {"model": "rank0", "measures": [{"type": "matern", "nu": 1.5, "a": 1, "atom0": 0.2}]})
    assert main(["simulate", atom, files("pts.csv", "x_-1,x_0,x_1\n0,0,0\n")]) == 1
    assert main(["validate", files("bj.json", "{not json")]) == 1


def test_constraint_violation_exit(files):
    model = {"model": "rank1", "measures": [{"type": "matern", "nu": 1.5, "a": 1, "atom0": 0.2}, {"type": "matern", "nu": 1.5, "a": 1, "atom0": 0.1}]}
    pairs = files("p.csv", "x_-1,x_0,x_1,y_-1,y_0,y_1\n0,0,0,0,1,0\n")
    assert main(["kernel-eval", files("m.json", model), pairs]) == 2


def test_numerical_failure_exit(files):
    model = {"model": "rank0", "measures": [{"type": "matern", "nu": 0.1, "a": 1}]}
    pairs = files("p.csv", "x_-1,x_0,x_1,y_-1,y_0,y_1\n0,0,0,0,1,0\n")
    assert main(["kernel-eval", files("m.json", model), pairs]) == 3


def test_log_env(files, monkeypatch, capsys):
    monkeypatch.setenv("MATERNFIELD_LOG", "debug")
    assert main(["gg-coeffs", "--ell-max", "0"]) == 0
