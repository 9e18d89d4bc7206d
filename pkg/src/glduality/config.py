"""Scenario files for the command line tool.

Scenarios are YAML mappings::

    name: hooke-log-drag
    equation: {type: H, k: 1.0}          # type H | K | class (class needs nu)
    drag: {kind: log, alpha: 1.0}        # kind none | log
    initial: {z: [1.0, 0.0], v: [0.0, 0.8]}
    run: {span: 40.0, frame: "true", rel_tol: 1.0e-10, abs_tol: 1.0e-12}
    output: {trajectory_path: traj.csv, report_path: report.json, sample_stride: 1}
    verify: {...}                        # optional, read by ``glduality verify``

``run.span`` may be omitted for bound orbits; it then defaults to
``run.radial_periods`` (default 10.25) quadrature periods. Unset
tolerances default to 1e-10 / 1e-12, or 1e-12 / 1e-14 for ``dualize``,
whose finite-difference residual needs the tighter source.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import yaml

from .core import DragProfile, EquationSpec, TrueState, make_equation
from .errors import DegenerateClass, DomainError, GLError


class ConfigError(GLError, ValueError):
    pass


@dataclass(frozen=True)
class EquationConfig:
    type: str
    k: float
    nu: float


@dataclass(frozen=True)
class DragConfig:
    kind: str = "none"
    alpha: float = 0.0


@dataclass(frozen=True)
class RunConfig:
    span: Optional[float] = None
    radial_periods: float = 10.25
    frame: str = "true"
    rel_tol: Optional[float] = None
    abs_tol: Optional[float] = None

    def tolerances(self, rel_default: float, abs_default: float) -> tuple[float, float]:
        """Configured tolerances, or the caller's defaults where unset."""
        rel = self.rel_tol if self.rel_tol is not None else rel_default
        ab = self.abs_tol if self.abs_tol is not None else abs_default
        return rel, ab


@dataclass(frozen=True)
class OutputConfig:
    trajectory_path: str
    report_path: str
    sample_stride: int = 1


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    equation: EquationConfig
    drag: DragConfig
    z0: complex
    v0: complex
    run: RunConfig
    output: OutputConfig
    verify: dict = field(default_factory=dict)
    source: Optional[Path] = None

    def equation_spec(self) -> EquationSpec:
        drag = DragProfile.log_radial(self.drag.alpha) if self.drag.kind == "log" else DragProfile.none()
        return make_equation(self.equation.nu, self.equation.k, drag)

    def initial_state(self) -> TrueState:
        return TrueState(t=0.0, z=self.z0, v=self.v0, s=0.0)


_TOP_KEYS = {"name", "equation", "drag", "initial", "run", "output", "verify"}


def _section(doc: dict, key: str, allowed: set[str], required: bool = True) -> dict:
    value = doc.get(key)
    if value is None:
        if required:
            raise ConfigError(f"missing section '{key}'")
        return {}
    if not isinstance(value, dict):
        raise ConfigError(f"section '{key}' must be a mapping")
    unknown = set(value) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in '{key}': {', '.join(sorted(unknown))}")
    return value


def _real(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        # PyYAML reads 1e-10 (no dot) as a string
        if isinstance(value, str):
            try:
                value = float(value)
            except ValueError:
                raise ConfigError(f"{where} must be a number, got {value!r}") from None
        else:
            raise ConfigError(f"{where} must be a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{where} must be finite")
    return value


def _complex(value: Any, where: str) -> complex:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError(f"{where} must be a [re, im] pair")
    return complex(_real(value[0], where), _real(value[1], where))


def parse_scenario(doc: Any, source: Optional[Path] = None) -> ScenarioConfig:
    if not isinstance(doc, dict):
        raise ConfigError("scenario must be a mapping")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown top-level keys: {', '.join(sorted(unknown))}")
    name = str(doc.get("name") or (source.stem if source else "scenario"))

    eq = _section(doc, "equation", {"type", "k", "nu"})
    etype = str(eq.get("type", "")).strip()
    if etype not in ("H", "K", "class"):
        raise ConfigError("equation.type must be 'H', 'K' or 'class'")
    k = _real(eq.get("k", 1.0), "equation.k")
    if etype == "class":
        if "nu" not in eq:
            raise ConfigError("equation.nu is required when type is 'class'")
        nu = _real(eq["nu"], "equation.nu")
    else:
        nu = 2.0 if etype == "H" else -1.0
        if "nu" in eq and _real(eq["nu"], "equation.nu") != nu:
            raise ConfigError(f"type {etype} implies nu={nu:g}")

    dr = _section(doc, "drag", {"kind", "alpha"}, required=False)
    kind = str(dr.get("kind", "none"))
    if kind not in ("none", "log"):
        raise ConfigError("drag.kind must be 'none' or 'log'")
    alpha = _real(dr.get("alpha", 0.0), "drag.alpha")

    init = _section(doc, "initial", {"z", "v"})
    if "z" not in init or "v" not in init:
        raise ConfigError("initial needs both z and v")
    z0 = _complex(init["z"], "initial.z")
    v0 = _complex(init["v"], "initial.v")
    if z0 == 0:
        raise ConfigError("initial.z must be non-zero")

    rn = _section(doc, "run", {"span", "frame", "rel_tol", "abs_tol", "radial_periods"}, required=False)
    frame = rn.get("frame", "true")
    if frame is True:  # unquoted YAML true
        frame = "true"
    if frame not in ("true", "pseudo"):
        raise ConfigError("run.frame must be 'true' or 'pseudo'")
    span = None if rn.get("span") is None else _real(rn["span"], "run.span")
    if span is not None and span <= 0.0:
        raise ConfigError("run.span must be positive")
    run = RunConfig(
        span=span,
        radial_periods=_real(rn.get("radial_periods", 10.25), "run.radial_periods"),
        frame=frame,
        rel_tol=None if rn.get("rel_tol") is None else _real(rn["rel_tol"], "run.rel_tol"),
        abs_tol=None if rn.get("abs_tol") is None else _real(rn["abs_tol"], "run.abs_tol"),
    )
    for tol in (run.rel_tol, run.abs_tol):
        if tol is not None and not 0.0 < tol <= 1e-2:
            raise ConfigError("tolerances must lie in (0, 1e-2]")
    if run.radial_periods <= 0.0:
        raise ConfigError("run.radial_periods must be positive")

    out = _section(doc, "output", {"trajectory_path", "report_path", "sample_stride"}, required=False)
    stride = out.get("sample_stride", 1)
    if isinstance(stride, bool) or not isinstance(stride, int) or stride < 1:
        raise ConfigError("output.sample_stride must be a positive integer")
    output = OutputConfig(
        trajectory_path=str(out.get("trajectory_path", f"{name}_trajectory.csv")),
        report_path=str(out.get("report_path", f"{name}_report.json")),
        sample_stride=stride,
    )
    verify = doc.get("verify") or {}
    if not isinstance(verify, dict):
        raise ConfigError("verify must be a mapping")
    cfg = ScenarioConfig(
        name=name,
        equation=EquationConfig(type=etype, k=k, nu=nu),
        drag=DragConfig(kind=kind, alpha=alpha),
        z0=z0,
        v0=v0,
        run=run,
        output=output,
        verify=verify,
        source=source,
    )
    try:
        cfg.equation_spec()
    except DegenerateClass:
        raise
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def load_scenario(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path} is not valid YAML: {exc}") from exc
    return parse_scenario(doc, source=path)
