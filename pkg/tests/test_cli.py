import csv
import io
import json
import math
import shutil
import subprocess

import numpy as np
import pytest

from psgeo.cli import RunRecord, main, parse_assignments, parse_value


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_tensor_json_gho(capsys):
    code, out, err = run(capsys, "tensor", "--model", "gho", "--params", "X=1,Y=0,Z=1",
                         "--actions", "I=1", "--backend", "harmonic", "--out", "json")
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {"model", "params", "actions", "backend", "metric", "curvature", "meta"}
    expected = np.array([[1, 0, -1], [0, 4, 0], [-1, 0, 1]]) / 32
    np.testing.assert_allclose(doc["metric"], expected, atol=1e-15)
    assert "wall time" in err and "wall" not in out


def test_tensor_spin_spherical(capsys):
    code, out, _ = run(capsys, "tensor", "--model", "spin", "--params",
                       "B=1,theta=1.5707963,phi=0", "--actions", "I1=1,I2=1")
    assert code == 0
    np.testing.assert_allclose(json.loads(out)["metric"], np.diag([0, -0.5, -0.5]), atol=1e-12)


def test_output_is_deterministic(capsys):
    argv = ["tensor", "--model", "lco", "--params", "A=2,B=1,C=1"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b


def test_run_record_round_trip(capsys):
    _, out, _ = run(capsys, "tensor", "--model", "singular", "--relations")
    rec = RunRecord.from_json(out)
    assert rec.to_json() == out.strip()
    assert rec.relation is not None and rec.model == "singular"


def test_params_order_controls_indexing(capsys):
    _, a, _ = run(capsys, "tensor", "--model", "gho", "--params", "X=1.2,Y=0.1,Z=0.9")
    _, b, _ = run(capsys, "tensor", "--model", "gho", "--params", "Z=0.9,X=1.2,Y=0.1")
    ga, gb = np.array(json.loads(a)["metric"]), np.array(json.loads(b)["metric"])
    perm = [2, 0, 1]
    np.testing.assert_allclose(gb, ga[np.ix_(perm, perm)])


def test_csv_output(capsys):
    code, out, _ = run(capsys, "tensor", "--model", "sco", "--out", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 8
    assert {r["kind"] for r in rows} == {"metric", "curvature"}


@pytest.mark.parametrize("argv, code", [
    (["tensor", "--model", "gho", "--params", "X=1,Y=0,Z=-1", "--actions", "I=1"], 2),
    (["tensor", "--model", "gho", "--params", "X=1,Y=0"], 2),
    (["tensor", "--model", "gho", "--params", "X"], 2),
    (["tensor", "--model", "singular", "--backend", "sampler"], 2),
    (["tensor", "--model", "nope"], 2),
    (["tensor", "--model", "gho", "--actions", "I=-1"], 2),
])
def test_error_exit_codes(capsys, argv, code):
    got, _, err = run(capsys, *argv)
    assert got == code
    assert err


def test_precondition_named_in_message(capsys):
    _, _, err = run(capsys, "tensor", "--model", "gho", "--params", "X=1,Y=0,Z=-1")
    assert "omega^2 = XZ - Y^2 must be positive" in err


def test_numerical_error_exit_code(capsys, monkeypatch):
    from psgeo.core import DivergentDCError
    import psgeo.cli as cli

    def boom(*a, **k):
        raise DivergentDCError("zero-frequency component")
    monkeypatch.setattr(cli, "compute_tensors", boom)
    code, _, err = run(capsys, "tensor", "--model", "gho")
    assert code == 3 and "numerical" in err


def test_verify_harmonic(capsys):
    code, out, _ = run(capsys, "verify", "--models", "gho", "--tol", "1e-8")
    assert code == 0
    assert out.count("PASS") == 4


def test_verify_failure_exit(capsys):
    code, out, _ = run(capsys, "verify", "--models", "gho", "--tol", "0")
    assert code == 1 and "FAIL" in out


def test_verify_singular(capsys):
    code, out, _ = run(capsys, "verify", "--models", "singular")
    assert code == 0
    assert "dilogarithm" in out and "order-hbar agreement" in out


def test_verify_sampler_marks_unsupported(capsys):
    code, out, _ = run(capsys, "verify", "--models", "gho,singular,spin", "--backend", "sampler",
                       "--tol", "1e-4")
    assert code == 0
    assert out.count("unsupported backend") == 2


def _sweep(capsys, *argv):
    code, out, _ = run(capsys, "sweep", *argv)
    assert code == 0
    return list(csv.DictReader(io.StringIO(out)))


def test_sweep_spin_curvature_column(capsys, monkeypatch):
    monkeypatch.setenv("PSGEO_THREADS", "3")
    rows = _sweep(capsys, "--model", "spin", "--params", "B=1,phi=0", "--param-grid",
                  "theta=0:pi:50", "--actions", "I1=1,I2=0")
    assert len(rows) == 50
    th = np.array([float(r["theta"]) for r in rows])
    np.testing.assert_allclose(th, np.linspace(0, np.pi, 50))
    F = np.array([float(r["F_12"]) for r in rows])
    np.testing.assert_allclose(F, np.sin(th) / 2, atol=1e-12)


def test_sweep_skips_inadmissible_rows(capsys):
    rows = _sweep(capsys, "--model", "gho", "--params", "X=1,Z=1", "--param-grid",
                  "Y=0:2:5", "--actions", "I=1")
    status = [r["status"] for r in rows]
    assert status[0] == "ok"
    assert all(s.startswith("skipped:") and "XZ - Y^2" in s for s in status[2:])


def test_sweep_sco_determinant(capsys):
    rows = _sweep(capsys, "--model", "sco", "--params", "k=1", "--param-grid", "kp=0:2:5",
                  "--actions", "I1=1,I2=0.5")
    for r in rows:
        w1, w2 = 1.0, math.sqrt(1 + 2 * float(r["kp"]))
        expected = 0.25 / (256 * w1 ** 4 * w2 ** 4)
        assert float(r["det"]) == pytest.approx(expected, rel=1e-10)


def test_parsers():
    assert parse_value("pi/2") == pytest.approx(math.pi / 2)
    assert parse_value("2*pi") == pytest.approx(2 * math.pi)
    assert parse_value("-pi") == pytest.approx(-math.pi)
    assert parse_value("1e-3") == 1e-3
    with pytest.raises(ValueError):
        parse_value("e")
    assert list(parse_assignments(["a=1,b=2", "c=3"])) == ["a", "b", "c"]


@pytest.mark.skipif(shutil.which("psgeo") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["psgeo", "tensor", "--model", "gho"], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["model"] == "gho"
