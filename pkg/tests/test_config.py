import pytest
import yaml

from glduality import DegenerateClass
from glduality.config import ConfigError, load_scenario, parse_scenario

BASE = {
    "name": "demo",
    "equation": {"type": "H", "k": 1.0},
    "drag": {"kind": "log", "alpha": 1.0},
    "initial": {"z": [1.0, 0.0], "v": [0.0, 0.8]},
}


def doc(**changes):
    d = {k: dict(v) if isinstance(v, dict) else v for k, v in BASE.items()}
    for key, value in changes.items():
        if value is None:
            d.pop(key, None)
        else:
            d[key] = value
    return d


def test_defaults():
    cfg = parse_scenario(doc())
    assert cfg.equation.nu == 2.0 and cfg.equation.k == 1.0
    assert cfg.z0 == 1 + 0j and cfg.v0 == 0.8j
    assert cfg.run.span is None and cfg.run.radial_periods == 10.25 and cfg.run.frame == "true"
    assert cfg.run.tolerances(1e-10, 1e-12) == (1e-10, 1e-12)
    assert cfg.output.trajectory_path == "demo_trajectory.csv"
    assert cfg.output.report_path == "demo_report.json"
    spec = cfg.equation_spec()
    assert spec.is_h_type and spec.drag.alpha_param == 1.0


def test_kepler_and_general_class():
    assert parse_scenario(doc(equation={"type": "K", "k": 2.0})).equation.nu == -1.0
    assert parse_scenario(doc(equation={"type": "class", "nu": 3, "k": 1.0})).equation.nu == 3.0


def test_yaml_unquoted_true_frame_and_string_floats(tmp_path):
    text = yaml.safe_dump(doc()) + "run: {frame: true, rel_tol: 1e-9}\n"
    path = tmp_path / "s.yaml"
    path.write_text(text)
    cfg = load_scenario(path)
    assert cfg.run.frame == "true" and cfg.run.rel_tol == 1e-9
    assert cfg.source == path


@pytest.mark.parametrize("bad", [
    doc(extra=1),
    doc(equation={"type": "Q"}),
    doc(equation={"type": "class"}),
    doc(equation={"type": "H", "nu": 3}),
    doc(equation={"type": "H", "k": "abc"}),
    doc(drag={"kind": "cubic"}),
    doc(initial={"z": [0.0, 0.0], "v": [0.0, 1.0]}),
    doc(initial={"z": [1.0], "v": [0.0, 1.0]}),
    doc(initial={"z": [1.0, 0.0]}),
    doc(initial=None),
    doc(run={"frame": "lab"}),
    doc(run={"rel_tol": 0.5}),
    doc(run={"abs_tol": 0.0}),
    doc(run={"span": -1.0}),
    doc(run={"radial_periods": 0}),
    doc(output={"sample_stride": 0}),
    doc(output={"colour": "red"}),
    doc(verify=[1, 2]),
    doc(equation={"type": "H", "k": 0.0}),
    [1, 2],
])
def test_invalid_configs(bad):
    with pytest.raises(ConfigError):
        parse_scenario(bad)


def test_degenerate_class_is_not_a_config_error():
    with pytest.raises(DegenerateClass):
        parse_scenario(doc(equation={"type": "class", "nu": 0, "k": 1.0}))


def test_unreadable_files(tmp_path):
    with pytest.raises(ConfigError):
        load_scenario(tmp_path / "missing.yaml")
    bad = tmp_path / "bad.yaml"
    bad.write_text("name: [unclosed\n")
    with pytest.raises(ConfigError):
        load_scenario(bad)
