import json
import shutil
import subprocess
import sys
from importlib import resources
from pathlib import Path

import pytest
import yaml

from glduality.cli import main
from glduality.report import read_table

SUITE = Path(str(resources.files("glduality") / "suites" / "acceptance"))


def scenario(tmp_path, name="s", **overrides):
    doc = {
        "name": name,
        "equation": {"type": "H", "k": 1.0},
        "drag": {"kind": "log", "alpha": 1.0},
        "initial": {"z": [1.0, 0.0], "v": [0.3, 0.6]},
        "run": {"radial_periods": 3.25},
    }
    doc.update(overrides)
    path = tmp_path / f"{name}.yaml"
    path.write_text(yaml.safe_dump(doc))
    return path


def run(args, out):
    return main([*args, "--output-dir", str(out)])


def test_simulate_writes_table_and_report(tmp_path):
    cfg = scenario(tmp_path)
    out = tmp_path / "out"
    out.mkdir()
    assert run(["simulate", str(cfg)], out) == 0
    header, data = read_table(out / "s_trajectory.csv")
    assert header == ["t", "s", "re_z", "im_z", "re_v", "im_v", "r", "L_pseudo", "E_pseudo", "re_T", "im_T"]
    assert data.shape[1] == len(header)
    report = json.loads((out / "s_report.json").read_text())
    assert report["trajectory_file"] == "s_trajectory.csv"
    assert set(report["drift"]) == {"L", "E", "T"}
    assert all(d["rel_drift"] < 1e-8 for d in report["drift"].values())


def test_kepler_header_and_tsv(tmp_path):
    cfg = scenario(tmp_path, "k", equation={"type": "K", "k": 1.0}, initial={"z": [1.0, 0.0], "v": [0.0, 0.8]})
    assert run(["simulate", str(cfg), "--format", "tsv"], tmp_path) == 0
    header, _ = read_table(tmp_path / "k_trajectory.tsv")
    assert header[-2:] == ["re_A", "im_A"]


def test_outputs_are_byte_identical(tmp_path):
    cfg = scenario(tmp_path)
    outputs = []
    for run_dir in ("a", "b"):
        out = tmp_path / run_dir
        out.mkdir()
        assert run(["simulate", str(cfg)], out) == 0
        assert run(["period", str(cfg)], out) == 0
        outputs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    assert outputs[0] == outputs[1]
    assert sorted(outputs[0]) == ["s_report.json", "s_report.period.json", "s_trajectory.csv"]


def test_period_report(tmp_path):
    cfg = scenario(tmp_path)
    assert run(["period", str(cfg)], tmp_path) == 0
    report = json.loads((tmp_path / "s_report.period.json").read_text())
    per = report["periods"]
    assert per["closed_form"] == pytest.approx(per["quadrature"], rel=1e-8)
    assert per["measured"] == pytest.approx(per["quadrature"], rel=1e-5)


def test_dualize_with_round_trip_and_figures(tmp_path):
    cfg = scenario(tmp_path, "d", drag={"kind": "none"}, run={"radial_periods": 2.25, "frame": "pseudo"})
    assert run(["dualize", str(cfg), "--round-trip", "--figures"], tmp_path) == 0
    report = json.loads((tmp_path / "d_report.dual.json").read_text())
    assert report["round_trip"]["within_budget"] is True
    assert report["hooke_kepler"]["kappa_match"] == "mu*B"
    assert report["residual"]["residual_fit"] < 1e-5
    header, _ = read_table(tmp_path / "d_trajectory.dual.csv")
    assert header == ["sigma", "re_w", "im_w", "rho"]
    assert (tmp_path / "d_report.dual.png").stat().st_size > 0


def test_simulate_figure(tmp_path):
    cfg = scenario(tmp_path)
    assert run(["simulate", str(cfg), "--figures"], tmp_path) == 0
    assert (tmp_path / "s_report.png").exists()


@pytest.mark.parametrize("overrides,code", [
    ({"equation": {"type": "Q"}}, 2),
    ({"run": {"rel_tol": 1.0}}, 2),
    ({"equation": {"type": "class", "nu": 0, "k": 1.0}}, 5),
])
def test_error_exit_codes_leave_no_files(tmp_path, overrides, code):
    cfg = scenario(tmp_path, **overrides)
    out = tmp_path / "out"
    out.mkdir()
    for cmd in ("simulate", "period", "dualize"):
        assert run([cmd, str(cfg)], out) == code
    assert list(out.iterdir()) == []


def test_unbound_orbit_exit_code(tmp_path):
    cfg = scenario(tmp_path, equation={"type": "K", "k": 1.0}, initial={"z": [1.0, 0.0], "v": [0.0, 1.5]},
                   drag={"kind": "none"})
    out = tmp_path / "out"
    out.mkdir()
    assert run(["period", str(cfg)], out) == 4
    assert list(out.iterdir()) == []


def test_missing_config_is_config_error(tmp_path):
    assert run(["simulate", str(tmp_path / "nope.yaml")], tmp_path) == 2


def test_verify_empty_directory(tmp_path):
    (tmp_path / "empty").mkdir()
    assert run(["verify", str(tmp_path / "empty")], tmp_path) == 2
    assert run(["verify", str(tmp_path / "absent")], tmp_path) == 2


def _small_suite(tmp_path):
    suite = tmp_path / "suite"
    suite.mkdir()
    for name in ("hooke_free", "kepler_B1", "closure_class3_control"):
        shutil.copy(SUITE / f"{name}.yaml", suite)
    return suite


def test_verify_failure_exit_code(tmp_path, capsys):
    suite = _small_suite(tmp_path)
    doc = yaml.safe_load((suite / "hooke_free.yaml").read_text())
    doc["verify"]["period"]["expected"] = 3.0
    (suite / "hooke_free.yaml").write_text(yaml.safe_dump(doc))
    assert run(["verify", str(suite)], tmp_path) == 1
    assert "FAIL hooke_free:" in capsys.readouterr().out
    assert json.loads((tmp_path / "verify_report.json").read_text())["passed"] is False


def test_verify_parallel_matches_serial(tmp_path, capsys):
    suite = _small_suite(tmp_path)
    serial, parallel = tmp_path / "serial", tmp_path / "parallel"
    serial.mkdir()
    parallel.mkdir()
    assert run(["verify", str(suite)], serial) == 0
    out_serial = capsys.readouterr().out
    assert run(["verify", str(suite), "--jobs", "2"], parallel) == 0
    out_parallel = capsys.readouterr().out
    assert out_serial.replace(str(serial), "") == out_parallel.replace(str(parallel), "")
    assert (serial / "verify_report.json").read_bytes() == (parallel / "verify_report.json").read_bytes()


def test_shipped_suite_passes(tmp_path):
    assert run(["verify", str(SUITE)], tmp_path) == 0
    report = json.loads((tmp_path / "verify_report.json").read_text())
    assert len(report["scenarios"]) == 18


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "glduality", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("glduality ")
