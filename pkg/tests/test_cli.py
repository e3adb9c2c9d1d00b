"""Command-line interface: output formats, determinism, exit codes."""

import json
from math import pi

import numpy as np
import pytest

from csapprox import b3_states, qubit_from_params, QubitParams
from csapprox.cli import CliError, main, parse_angle


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# --- angle parsing --------------------------------------------------------

def test_parse_angle():
    assert parse_angle("0.5") == 0.5
    assert parse_angle("pi") == pytest.approx(pi)
    assert parse_angle("pi/3") == pytest.approx(pi / 3)
    assert parse_angle("2pi/3") == pytest.approx(2 * pi / 3)
    assert parse_angle("-pi/4") == pytest.approx(-pi / 4)
    assert parse_angle("2/3") == pytest.approx(2 / 3)
    with pytest.raises(CliError):
        parse_angle("one")


# --- approx ---------------------------------------------------------------

def test_approx_b1_paper_value(capsys, tmp_path):
    out_path = tmp_path / "res.json"
    code, out, _ = run(capsys, "approx", "--a", "0.25", "--k", "1",
                       "--phi", "0", "--set", "B1", "--out", str(out_path))
    assert code == 0
    doc = json.loads(out_path.read_text())
    assert doc == json.loads(out)
    assert doc["distance"] == pytest.approx(np.sqrt(3) / 2, abs=1e-4)
    assert np.allclose(doc["weights"], [0.75, 0.25], atol=1e-3)
    assert doc["helstrom_probability"] == pytest.approx(0.7165, abs=1e-3)
    assert doc["analytic"]["agrees"]
    assert doc["analytic"]["distance"] == pytest.approx(np.sqrt(3) / 2)


def test_approx_maximally_mixed_b3(capsys):
    code, out, _ = run(capsys, "approx", "--a", "0.5", "--k", "0",
                       "--phi", "0", "--set", "B3")
    assert code == 0
    doc = json.loads(out)
    assert doc["distance"] == pytest.approx(0.0, abs=1e-8)
    assert doc["analytic"]["case_label"] == "exact"


def test_approx_custom_matrix_and_set(capsys, tmp_path):
    rho = qubit_from_params(QubitParams(0.3, 0.7, 0.5))
    flat = [[float(z.real), float(z.imag)] for z in rho.data.ravel()]
    mat_path = tmp_path / "f.json"
    mat_path.write_text(json.dumps({"dimension": 2, "matrix": flat}))
    set_path = tmp_path / "set.json"
    set_path.write_text(json.dumps(b3_states().to_dict()))
    code, out, _ = run(capsys, "approx", "--matrix", str(mat_path),
                       "--set", str(set_path))
    assert code == 0
    doc = json.loads(out)
    assert doc["converged"]
    assert "analytic" not in doc  # only emitted for builtin qubit targets


def test_approx_invalid_input_exit_1(capsys):
    code, _, err = run(capsys, "approx", "--a", "2", "--k", "0",
                       "--phi", "0", "--set", "B1")
    assert code == 1
    assert "error" in err
    code, _, _ = run(capsys, "approx", "--a", "0.3", "--k", "0.5",
                     "--phi", "0", "--set", "/nonexistent.json")
    assert code == 1


# --- sweep ----------------------------------------------------------------

def test_sweep_csv_format_and_determinism(capsys, tmp_path):
    args = ("sweep", "--fix", "k=0.6667", "--grid", "7x7")
    code, out1, _ = run(capsys, *args)
    assert code == 0
    code, out2, _ = run(capsys, *args)
    assert out1 == out2
    lines = out1.strip().split("\n")
    assert lines[0] == ("a,phi,k,D_oracle,D_analytic,case_label,"
                       "p0,p1,p2,p3,p4,p5,flags")
    assert len(lines) == 1 + 49
    assert "\r" not in out1
    # row-major: a constant across each inner block of 7
    a_vals = [line.split(",")[0] for line in lines[1:]]
    assert a_vals[:7] == ["0"] * 7


def test_sweep_exact_rows_have_zero_oracle(capsys):
    code, out, _ = run(capsys, "sweep", "--fix", "phi=pi/3",
                       "--grid", "9x9")
    assert code == 0
    for line in out.strip().split("\n")[1:]:
        cells = line.split(",")
        if cells[5] == "exact":
            assert float(cells[3]) <= float(cells[4]) + 2e-3
            assert float(cells[3]) <= 1e-4
            assert cells[12] == ""


def test_sweep_degenerate_corners(capsys):
    code, out, _ = run(capsys, "sweep", "--fix", "phi=pi/3", "--grid", "2x2")
    assert code == 0
    rows = out.strip().split("\n")[1:]
    assert len(rows) == 4
    for line in rows:
        assert np.isfinite(float(line.split(",")[3]))


def test_sweep_bad_arguments(capsys):
    assert run(capsys, "sweep", "--fix", "b=1", "--grid", "5x5")[0] == 1
    assert run(capsys, "sweep", "--fix", "k=0.5", "--grid", "1x5")[0] == 1
    assert run(capsys, "sweep", "--fix", "k=2", "--grid", "5x5")[0] == 1


# --- audit ----------------------------------------------------------------

def test_audit_schema_and_summary(capsys, tmp_path):
    out_path = tmp_path / "audit.json"
    code, out, err = run(capsys, "audit", "--grid", "5",
                         "--out", str(out_path))
    assert code == 0
    doc = json.loads(out_path.read_text())
    assert doc["schema"] == 1
    assert doc["n_points"] == 125
    for name in ("weights_infeasible", "inconsistent", "suboptimal"):
        assert f"{name}: {doc['counts'][name]}" in err


def test_audit_zero_region_clean(capsys):
    code, out, err = run(capsys, "audit", "--grid", "6",
                         "--a-range", "0.3:0.5", "--k-range", "0:0.3")
    assert code == 0
    doc = json.loads(out)
    assert sum(doc["counts"].values()) == 0


def test_audit_grid_too_small(capsys):
    assert run(capsys, "audit", "--grid", "4")[0] == 1


# --- multicopy ------------------------------------------------------------

def test_multicopy_single_copy_degenerates(capsys):
    code, out, err = run(capsys, "multicopy", "--a", "0.25", "--k", "1",
                         "--phi", "0", "--set", "B1", "--copies", "1")
    assert code == 0
    doc = json.loads(out)
    assert doc["d_corr"] == pytest.approx(doc["d_prod"], abs=1e-6)
    assert doc["d_fact"] == pytest.approx(doc["d_prod"], abs=1e-6)
    assert "d_corr=" in err


def test_multicopy_diagonal_target(capsys):
    code, out, _ = run(capsys, "multicopy", "--a", "0.3", "--k", "0",
                       "--phi", "0", "--set", "B1", "--copies", "2")
    assert code == 0
    doc = json.loads(out)
    assert max(doc["d_corr"], doc["d_fact"], doc["d_prod"]) \
        == pytest.approx(0.0, abs=1e-6)


def test_multicopy_budget_violation(capsys):
    code, _, err = run(capsys, "multicopy", "--a", "0.3", "--k", "0.5",
                       "--phi", "0", "--set", "B3", "--copies", "5")
    assert code == 1
    assert "error" in err
