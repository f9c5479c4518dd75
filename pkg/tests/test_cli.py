import csv
import json
import math

import numpy as np
import pytest

from enskog_rigid import geometry
from enskog_rigid.cli import EXIT_CONFIG, EXIT_NOT_CONVERGED, EXIT_OK, EXIT_VERIFY_FAILED, main
from enskog_rigid.profile import read_csv


def rows(path):
    with open(path) as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = np.array([[float(x) for x in row] for row in reader])
    return header, data


def test_boltzmann_csv_matches_closed_form(tmp_path):
    out = tmp_path / "b.csv"
    code = main(["solve", "--model", "boltzmann", "--omega", "0.05", "--eta-axis", "0.1", "--pmax", "20", "--out", str(out)])
    assert code == EXIT_OK
    header, data = rows(out)
    assert header == ["P", "eta", "dln_eta_dP", "integral_term"]
    P, eta = data[:, 0], data[:, 1]
    assert P[-1] == pytest.approx(20.0)
    np.testing.assert_allclose(eta, 0.1 * np.exp(0.0025 * P**2), rtol=1e-12, atol=0)
    doc = json.loads(out.with_suffix(".json").read_text())
    assert doc["converged"] and doc["far_field"]["applicable"]


def test_rotating_cylinder_run(tmp_path):
    out = tmp_path / "fig.csv"
    argv = ["solve", "--model", "enskog-be", "--geometry", "cylinder", "--radius", "10.5"]
    argv += ["--radius-convention", "surface", "--omega", "0.05", "--eta-mean", "0.2", "--out", str(out)]
    assert main(argv) == EXIT_OK
    doc = json.loads(out.with_suffix(".json").read_text())
    assert doc["accessible_radius"] == 10.0
    assert doc["converged"]
    assert abs(doc["mean_fraction"] - 0.2) < 1e-12
    assert doc["packing_margin"] > 0
    assert read_csv(out).nodes[-1] == pytest.approx(10.0)


def test_too_small_radius_rejected(tmp_path, capsys):
    assert main(["solve", "--geometry", "cylinder", "--radius", "0.5", "--out", str(tmp_path / "x.csv")]) == EXIT_CONFIG
    assert "radius" in capsys.readouterr().err


def test_oracle_without_rotation_is_constant(tmp_path):
    out = tmp_path / "o.csv"
    assert main(["oracle", "--omega", "0", "--eta0", "0.3", "--pmax", "5", "--out", str(out)]) == EXIT_OK
    _, data = rows(out)
    np.testing.assert_allclose(data[:, 1], 0.3, rtol=1e-15)


def test_oracle_row_value(tmp_path):
    out = tmp_path / "o.csv"
    assert main(["oracle", "--omega", "0.05", "--eta0", "0.1", "--pmax", "20", "--out", str(out)]) == EXIT_OK
    _, data = rows(out)
    row = data[np.argmin(np.abs(data[:, 0] - 10.0))]
    assert row[0] == pytest.approx(10.0)
    assert abs(row[1] - 0.1145) < 1e-4


def test_oracle_rejects_packing(tmp_path, capsys):
    assert main(["oracle", "--omega", "0.05", "--eta0", "0.8", "--out", str(tmp_path / "o.csv")]) == EXIT_CONFIG
    assert "eta0" in capsys.readouterr().err


def test_verify_passes_and_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["verify", "--seed", "42", "--out", str(a)]) == EXIT_OK
    assert main(["verify", "--seed", "42", "--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    report = json.loads(a.read_text())
    names = {c["name"] for c in report["checks"]}
    assert len(names) == 7
    assert all(c["passed"] for c in report["checks"])


def test_verify_catches_broken_mask(tmp_path, monkeypatch):
    original = geometry.phi_cutoff_cylinder

    def flipped(domain, P, theta):
        return math.pi - original(domain, P, theta)

    monkeypatch.setattr(geometry, "phi_cutoff_cylinder", flipped)
    out = tmp_path / "v.json"
    assert main(["verify", "--seed", "1", "--out", str(out)]) == EXIT_VERIFY_FAILED
    checks = {c["name"]: c for c in json.loads(out.read_text())["checks"]}
    assert not checks["mask_soundness"]["passed"]


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# boltzmann reference\nmodel = boltzmann\nomega = 0.05\neta-axis = 0.1\npmax = 4\n")
    out = tmp_path / "c.csv"
    assert main(["solve", "--config", str(cfg), "--pmax", "2", "--out", str(out)]) == EXIT_OK
    _, data = rows(out)
    assert data[-1, 0] == pytest.approx(2.0)


def test_config_file_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    assert main(["solve", "--config", str(cfg), "--out", str(tmp_path / "x.csv")]) == EXIT_CONFIG
    assert "colour" in capsys.readouterr().err


def test_bad_values_name_the_key(tmp_path, capsys):
    out = str(tmp_path / "x.csv")
    assert main(["solve", "--geometry", "cylinder", "--radius", "5", "--eta-mean", "0.9", "--out", out]) == EXIT_CONFIG
    assert "eta" in capsys.readouterr().err
    assert main(["solve", "--geometry", "sphere", "--radius", "5", "--omega", "0.1", "--out", out]) == EXIT_CONFIG
    assert "omega" in capsys.readouterr().err


def test_non_convergence_exit(tmp_path):
    out = tmp_path / "n.csv"
    argv = ["solve", "--geometry", "cylinder", "--radius", "10", "--omega", "0.05", "--max-iter", "3", "--out", str(out)]
    assert main(argv) == EXIT_NOT_CONVERGED
    assert json.loads(out.with_suffix(".json").read_text())["converged"] is False


def test_solve_is_deterministic(tmp_path):
    outs = []
    for name in ("a", "b"):
        out = tmp_path / f"{name}.csv"
        assert main(["solve", "--geometry", "sphere", "--radius", "4", "--eta-mean", "0.1", "--out", str(out)]) == EXIT_OK
        outs.append(out)
    assert outs[0].read_bytes() == outs[1].read_bytes()
    back = read_csv(outs[0])
    _, data = rows(outs[0])
    np.testing.assert_array_equal(back.values, data[:, 1])
