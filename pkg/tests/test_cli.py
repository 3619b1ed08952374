"""Command-line front door: outputs, manifests, determinism, exit codes."""

import json
import os

import numpy as np
import pytest

from solistab.cli import (
    EXIT_FAIL,
    EXIT_OK,
    EXIT_USAGE,
    _parse_points,
    _parse_range,
    run,
)


def _read(path):
    with open(path) as fh:
        return fh.read()


def test_parse_range():
    assert _parse_range("10:14:2") == [10.0, 12.0, 14.0]
    assert _parse_range("1,2.5,3") == [1.0, 2.5, 3.0]
    assert _parse_range("7") == [7.0]
    with pytest.raises(ValueError):
        _parse_range("1:2:3:4")
    with pytest.raises(ValueError):
        _parse_range("1:5:-1")


def test_parse_points():
    pts = _parse_points("1,2;3,4")
    assert np.array_equal(pts, [[1.0, 2.0], [3.0, 4.0]])


def test_ground_state_command(tmp_path):
    out = str(tmp_path / "gs.json")
    cache = str(tmp_path / "cache")
    code = run(["--cache", cache, "ground-state", "--d", "1", "--p", "3",
                "--out", out])
    assert code == EXIT_OK
    doc = json.loads(_read(out))
    assert abs(doc["q0"] - 2.0**0.5) < 1e-8
    assert doc["ode_residual"] < 1e-8
    assert doc["pohozaev_error"] < 1e-6
    # manifest sits next to the output and records the configuration
    man = json.loads(_read(out + ".manifest.json"))
    assert man["tool"] == "solistab"
    assert man["config"]["cmd"] == "ground-state"
    # cache hit on rerun produces an identical document
    code = run(["--cache", cache, "ground-state", "--d", "1", "--p", "3",
                "--out", out])
    assert code == EXIT_OK
    assert json.loads(_read(out)) == doc


def test_special_fn_command_deterministic(tmp_path):
    out1 = str(tmp_path / "f1.csv")
    out2 = str(tmp_path / "f2.csv")
    argv = ["special-fn", "--d", "2", "--p", "2", "--log10s=-8:-2:1"]
    assert run(argv + ["--out", out1]) == EXIT_OK
    assert run(argv + ["--out", out2]) == EXIT_OK
    assert _read(out1) == _read(out2)  # byte-identical rerun
    lines = _read(out1).strip().split("\n")
    assert lines[0] == "s,F,branch"
    assert len(lines) == 8


def test_special_fn_branches_table(tmp_path):
    out = str(tmp_path / "branches.csv")
    assert run(["special-fn", "--branches", "--log10s=-6:-2:2",
                "--out", out]) == EXIT_OK
    header = _read(out).split("\n")[0].split(",")
    assert header[0] == "s"
    assert set(header[1:]) == {"linear", "log_d1", "psi_d2", "psi_d3",
                               "subquadratic"}


def test_interaction_scan_with_fit(tmp_path):
    out = str(tmp_path / "scan.csv")
    cache = str(tmp_path / "cache")
    code = run(["--cache", cache, "interaction-scan", "--d", "1", "--p", "3",
                "--kind", "overlap", "--alpha", "4", "--beta", "2",
                "--R", "10:24:1", "--fit", "--out", out])
    assert code == EXIT_OK
    fit = json.loads(_read(out + ".fit.json"))
    assert fit["rate_rel_err"] < 0.01
    lines = _read(out).strip().split("\n")
    assert lines[0] == "R,log_integral,predicted_log,residual"
    assert len(lines) == 16


def test_sharp_example_and_decompose_roundtrip(tmp_path):
    cache = str(tmp_path / "cache")
    out = str(tmp_path / "sharp.json")
    code = run(["--cache", cache, "sharp-example", "--d", "1", "--p", "3",
                "--R", "12", "--save-fields", "--out", out])
    assert code == EXIT_OK
    reports = json.loads(_read(out))
    assert len(reports) == 1
    assert 0.5 < reports[0]["rho_to_linear_ratio"] < 2.0
    field_path = str(tmp_path / "sharp_R12.0_u.bin")
    assert os.path.exists(field_path)

    dec = str(tmp_path / "dec.json")
    code = run(["--cache", cache, "decompose", "--d", "1", "--p", "3",
                "--field", field_path, "--centers=-5.9;6.1", "--out", dec])
    assert code == EXIT_OK
    doc = json.loads(_read(dec))
    centers = np.asarray(doc["centers"], dtype=float)
    assert np.max(np.abs(centers.ravel() - [-6.0, 6.0])) < 1e-6


def test_verify_sharp_passes(tmp_path):
    cache = str(tmp_path / "cache")
    out = str(tmp_path / "verify.json")
    code = run(["--cache", cache, "verify", "--d", "1", "--p", "3",
                "--case", "sharp", "--R", "12:16:2", "--out", out])
    assert code == EXIT_OK
    doc = json.loads(_read(out))
    assert doc["pass"] and doc["identity_ok"]
    csv = _read(os.path.splitext(out)[0] + ".csv")
    assert csv.split("\n")[0].startswith("R,Gamma_u,dist,F_of_Gamma")


def test_project_points_command(tmp_path):
    out = str(tmp_path / "proj.json")
    code = run(["project-points", "--points", "0,0;1,2;3,-1", "--out", out])
    assert code == EXIT_OK
    doc = json.loads(_read(out))
    t = np.asarray(doc["transformed"])
    assert np.all(t[1:, 0] > 0)
    assert doc["c_achieved"] > 0


def test_spectrum_command(tmp_path):
    cache = str(tmp_path / "cache")
    out = str(tmp_path / "spec.json")
    code = run(["--cache", cache, "spectrum", "--d", "1", "--p", "3",
                "--n", "4096", "--out", out])
    assert code == EXIT_OK
    doc = json.loads(_read(out))
    assert abs(doc["kappa"] - 3.0) < 1e-3

    out2 = str(tmp_path / "sector.json")
    code = run(["--cache", cache, "spectrum", "--d", "1", "--p", "3",
                "--ell", "0", "--n", "4096", "--out", out2])
    assert code == EXIT_OK
    doc = json.loads(_read(out2))
    assert abs(doc["eigenvalues"][0] - 1.0) < 1e-4
    assert os.path.exists(str(tmp_path / "sector_vectors.csv"))


def test_usage_errors(tmp_path):
    assert run([]) == EXIT_USAGE
    assert run(["ground-state", "--d", "1"]) == EXIT_USAGE  # missing args
    out = str(tmp_path / "x.json")
    # invalid parameters reach the library and map to the usage exit code
    assert run(["ground-state", "--d", "3", "--p", "9",
                "--out", out]) == EXIT_USAGE
