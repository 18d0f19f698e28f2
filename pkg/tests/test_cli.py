"""End-to-end CLI runs: file outputs, manifest contents, exit codes."""
import csv
import json

import numpy as np
import pytest

from halmotor import cli, laplace, quantities
from halmotor.config import load_design
from halmotor.halbach import fourier_coefficients

from conftest import CONFIG_TEXT

from test_quantities import MEAN_FORCE_OPEN, NET_PULL


def _read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return rows


def _column(rows, key):
    return np.array([float(r[key]) for r in rows])


def _manifest(out_dir):
    with open(out_dir / "manifest.json") as fh:
        return json.load(fh)


def test_fields_default_grid(config_path, tmp_path):
    out = tmp_path / "out"
    assert cli.main(["fields", "--config", str(config_path),
                     "--out", str(out)]) == 0
    rows = _read_csv(out / "fields.csv")
    assert len(rows) == 256 * 128
    assert list(rows[0]) == ["x", "y", "region", "B_x", "B_y",
                             "H_x", "H_y", "psi", "A_z"]
    assert rows[0]["region"] == "I"
    assert rows[-1]["region"] == "II"
    # scalar-potential models report psi and no A_z
    assert rows[0]["A_z"] == "nan"
    assert rows[0]["psi"] != "nan"
    man = _manifest(out)
    assert man["command"] == "fields"
    assert man["outputs"] == ["fields.csv"]
    assert man["version"] == "0.1.0"
    assert man["params"]["design"]["lam"] == 0.04
    assert man["params"]["n_max_harmonic"] == 199
    assert man["params"]["grid"] == [256, 128]


@pytest.mark.parametrize("model", ["poisson-scalar", "poisson-vector"])
def test_fields_models_agree(config_path, tmp_path, model):
    ref_out = tmp_path / "ref"
    alt_out = tmp_path / "alt"
    base = ["--config", str(config_path), "--grid", "32x16"]
    assert cli.main(["fields", *base, "--out", str(ref_out)]) == 0
    assert cli.main(["fields", *base, "--out", str(alt_out),
                     "--model", model]) == 0
    ref = _read_csv(ref_out / "fields.csv")
    alt = _read_csv(alt_out / "fields.csv")
    for key in ("B_x", "B_y"):
        np.testing.assert_allclose(_column(alt, key), _column(ref, key),
                                   rtol=0, atol=1e-10)
    if model == "poisson-vector":
        assert alt[5]["psi"] == "nan"
        assert alt[5]["A_z"] != "nan"


def test_fields_ymax_outside_domain(tmp_path, capsys):
    cfg = tmp_path / "iron.cfg"
    cfg.write_text(CONFIG_TEXT.replace("back_iron          = false",
                                       "back_iron          = true"))
    rc = cli.main(["fields", "--config", str(cfg), "--out", str(tmp_path),
                   "--ymax", "0.02"])
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_force_outputs(config_path, tmp_path):
    out = tmp_path / "force"
    assert cli.main(["force", "--config", str(config_path), "--out", str(out),
                     "--x0", "0.004", "--nt", "36", "--nscan", "36"]) == 0
    design, trunc = load_design(str(config_path))
    coeffs = laplace.solve_coefficients(
        design, fourier_coefficients(design, trunc))
    want = quantities.thrust_time_series(design, coeffs, 0.004, 36)
    rows = _read_csv(out / "force_profile.csv")
    assert len(rows) == 36
    assert set(_column(rows, "ripple_pct")) == {want.ripple_pct}
    assert set(_column(rows, "f_mean")) == {want.mean}
    np.testing.assert_array_equal(_column(rows, "f_total"), want.total)
    angle = _read_csv(out / "force_angle.csv")
    assert len(angle) == 36
    assert list(angle[0]) == ["x_0", "f_total"]
    assert _manifest(out)["outputs"] == ["force_angle.csv",
                                         "force_profile.csv"]


def test_force_default_shift_hits_optimum(config_path, tmp_path, capsys):
    out = tmp_path / "force"
    assert cli.main(["force", "--config", str(config_path),
                     "--out", str(out)]) == 0
    rows = _read_csv(out / "force_profile.csv")
    assert _column(rows, "f_mean")[0] == pytest.approx(MEAN_FORCE_OPEN[2],
                                                       rel=1e-12)
    assert "x_0 = 0.03" in capsys.readouterr().out


def test_emf_outputs(config_path, tmp_path):
    out = tmp_path / "emf"
    assert cli.main(["emf", "--config", str(config_path), "--out", str(out),
                     "--nt", "24"]) == 0
    rows = _read_csv(out / "emf.csv")
    assert len(rows) == 24
    assert list(rows[0]) == (["t"] + [f"lambda_{m}" for m in (1, 2, 3)]
                             + [f"emf_{m}" for m in (1, 2, 3)]
                             + [f"i_{m}" for m in (1, 2, 3)]
                             + [f"thd_{m}" for m in (1, 2, 3)])
    design, trunc = load_design(str(config_path))
    coeffs = laplace.solve_coefficients(
        design, fourier_coefficients(design, trunc))
    want = quantities.emf_thd(design, coeffs, 0.0, 24)
    for m in (1, 2, 3):
        thd_col = set(_column(rows, f"thd_{m}"))
        assert len(thd_col) == 1
        assert thd_col.pop() == pytest.approx(want[m - 1], rel=1e-12)


def test_normal_zero_offset_single_row(config_path, tmp_path):
    out = tmp_path / "normal"
    assert cli.main(["normal", "--config", str(config_path),
                     "--out", str(out)]) == 0
    rows = _read_csv(out / "normal.csv")
    assert len(rows) == 1
    assert float(rows[0]["f_net"]) == 0.0


def test_normal_offset_sweep(config_path, tmp_path):
    out = tmp_path / "normal"
    assert cli.main(["normal", "--config", str(config_path), "--out", str(out),
                     "--g0", "3e-4"]) == 0
    rows = _read_csv(out / "normal.csv")
    assert len(rows) == 13
    # full-precision floats round-trip through the CSV
    assert float(rows[-1]["f_net"]) == pytest.approx(NET_PULL[3e-4], rel=1e-12)
    nets = _column(rows, "f_net")
    assert all(a < b for a, b in zip(nets, nets[1:]))


def test_verify_skip_fd(config_path, tmp_path, capsys):
    out = tmp_path / "verify"
    rc = cli.main(["verify", "--config", str(config_path), "--out", str(out),
                   "--skip-fd"])
    captured = capsys.readouterr().out
    assert rc == 0
    assert "48/48 checks passed" in captured
    rows = _read_csv(out / "verify_report.csv")
    assert len(rows) == 48
    assert all(r["status"] == "PASS" for r in rows)
    assert not any("fd-midgap" in r["name"] for r in rows)


def test_verify_catches_planted_sign_error(config_path, tmp_path, capsys,
                                           monkeypatch):
    original = laplace.assemble_system

    def flipped(design, src, n):
        A, rhs = original(design, src, n)
        A = A.copy()
        A[1] = -A[1]
        return A, rhs

    monkeypatch.setattr(laplace, "assemble_system", flipped)
    rc = cli.main(["verify", "--config", str(config_path),
                   "--out", str(tmp_path), "--skip-fd"])
    captured = capsys.readouterr().out
    assert rc == 1
    assert "FAIL boundary-rows" in captured


def test_sweep_outputs(config_path, tmp_path):
    out = tmp_path / "sweep"
    assert cli.main(["sweep", "--config", str(config_path), "--out", str(out),
                     "--axis", "h_c=0.003:0.005:3"]) == 0
    rows = _read_csv(out / "sweep.csv")
    assert len(rows) == 3
    scores = _column(rows, "score")
    with open(out / "summary.json") as fh:
        summary = json.load(fh)
    assert summary["points"] == 3
    assert summary["best_index"] == int(np.argmax(scores))
    assert summary["best_score"] == scores.max()
    assert summary["best_point"]["h_c"] == float(
        rows[summary["best_index"]]["h_c"])


def test_optimize_outputs(config_path, tmp_path):
    out = tmp_path / "opt"
    assert cli.main(["optimize", "--config", str(config_path),
                     "--out", str(out), "--bounds", "h_c=0.001:0.012",
                     "--coarse", "5", "--passes", "1"]) == 0
    rows = _read_csv(out / "optimize_trace.csv")
    with open(out / "summary.json") as fh:
        summary = json.load(fh)
    assert summary["evaluations"] == len(rows)
    scores = summary["incumbent_scores"]
    assert all(a <= b for a, b in zip(scores, scores[1:]))
    assert 0.001 <= summary["best_point"]["h_c"] <= 0.012
    assert summary["best_metrics"]["ripple_pct"] is not None


def test_sizing_outputs(config_path, tmp_path, capsys):
    out = tmp_path / "sizing"
    assert cli.main(["sizing", "--config", str(config_path), "--out", str(out),
                     "--b-av", "0.5"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 3
    assert lines[0].startswith("shear stress:")
    rows = _read_csv(out / "sizing.csv")
    assert len(rows) == 1
    assert float(rows[0]["tau_av_N_per_m2"]) == 20000.0
    assert float(rows[0]["f_av_N"]) == 32.0


def test_nmax_override_recorded(config_path, tmp_path):
    out = tmp_path / "o"
    assert cli.main(["fields", "--config", str(config_path), "--out", str(out),
                     "--grid", "8x4", "--nmax", "99"]) == 0
    man = _manifest(out)
    assert man["params"]["n_max_harmonic"] == 99
    assert man["params"]["nmax"] == 99


def test_missing_config_exits_2(tmp_path, capsys):
    rc = cli.main(["fields", "--config", str(tmp_path / "nope.cfg"),
                   "--out", str(tmp_path)])
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_bad_config_key_exits_2(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(CONFIG_TEXT + "voltage_V = 12\n")
    rc = cli.main(["emf", "--config", str(cfg), "--out", str(tmp_path)])
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_bad_sweep_axis_exits_2(config_path, tmp_path, capsys):
    rc = cli.main(["sweep", "--config", str(config_path),
                   "--out", str(tmp_path), "--axis", "g=0.001:0.002:2"])
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_malformed_grid_is_usage_error(config_path, tmp_path):
    with pytest.raises(SystemExit) as exc:
        cli.main(["fields", "--config", str(config_path),
                  "--out", str(tmp_path), "--grid", "256"])
    assert exc.value.code == 2


def test_malformed_axis_spec_is_usage_error(config_path, tmp_path):
    with pytest.raises(SystemExit) as exc:
        cli.main(["sweep", "--config", str(config_path),
                  "--out", str(tmp_path), "--axis", "h_c=1:2"])
    assert exc.value.code == 2
