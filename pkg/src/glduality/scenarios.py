"""Scenario runs behind the command line tool.

Each ``run_*`` function takes a parsed :class:`ScenarioConfig` and returns
plain data (tables as column dictionaries, reports as nested dicts) so the
caller decides where and how to write it.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .config import ConfigError, ScenarioConfig
from .core import DragProfile, EquationSpec, TrueState
from .duality import (
    certify_hooke_kepler,
    dual_residual,
    dualize_trajectory,
    make_dual_map,
    round_trip,
)
from .dynamics import to_pseudo
from .errors import InsufficientEvents, Unbound
from .integrate import IntegratorConfig, Trajectory, check_closure, integrate, measure_radial_period
from .invariants import applicable_quantities, drift, invariant_set, pseudo_angular_momentum, pseudo_energy, series
from .periods import apsidal_radii, period_closed_form, period_legendre_form, period_quadrature, state_on_orbit

SIM_TOLERANCES = (1e-10, 1e-12)
DUAL_TOLERANCES = (1e-12, 1e-14)


@dataclass(frozen=True)
class Table:
    header: tuple[str, ...]
    columns: tuple[np.ndarray, ...]


def revolution_radial_periods(spec: EquationSpec) -> int:
    """Radial periods per revolution of a closed orbit (2 for centred ellipses)."""
    return 2 if spec.is_h_type else 1


def _describe(cfg: ScenarioConfig, spec: EquationSpec) -> dict:
    return {
        "name": cfg.name,
        "equation": {"type": cfg.equation.type, "nu": spec.nu, "k": spec.k, "label": spec.label},
        "drag": {"kind": cfg.drag.kind, "alpha": cfg.drag.alpha},
        "initial": {"z": cfg.z0, "v": cfg.v0},
    }


def _constants(spec: EquationSpec, state: TrueState) -> tuple[float, float]:
    return pseudo_energy(spec, state), pseudo_angular_momentum(spec, state)


def _default_span(cfg: ScenarioConfig, spec: EquationSpec, frame: str) -> float:
    if cfg.run.span is not None:
        return cfg.run.span
    E, L = _constants(spec, cfg.initial_state())
    try:
        if frame == "pseudo":
            period = period_quadrature(replace(spec, drag=DragProfile.none()), E, L)
        else:
            period = period_quadrature(spec, E, L)
    except Unbound as exc:
        raise ConfigError(f"run.span is required for unbound orbits ({exc})") from exc
    return cfg.run.radial_periods * period


def integrate_scenario(cfg: ScenarioConfig, frame: Optional[str] = None,
                       tolerances: tuple[float, float] = SIM_TOLERANCES) -> Trajectory:
    spec = cfg.equation_spec()
    frame = frame or cfg.run.frame
    rel, ab = cfg.run.tolerances(*tolerances)
    span = _default_span(cfg, spec, frame)
    init = cfg.initial_state()
    if frame == "pseudo":
        init = to_pseudo(spec, init)
    return integrate(spec, init, (0.0, span), IntegratorConfig(rel_tol=rel, abs_tol=ab))


def trajectory_table(traj: Trajectory, stride: int = 1) -> Table:
    spec = traj.spec
    idx = np.arange(0, len(traj), stride)
    if idx[-1] != len(traj) - 1:
        idx = np.append(idx, len(traj) - 1)
    z, v = traj.z[idx], traj.v[idx]
    header = ["t", "s", "re_z", "im_z", "re_v", "im_v", "r", "L_pseudo", "E_pseudo"]
    cols = [traj.t[idx], traj.s[idx], z.real, z.imag, v.real, v.imag, traj.r[idx],
            series(traj, "L")[idx], series(traj, "E")[idx]]
    for q in applicable_quantities(spec)[2:]:
        values = series(traj, q)[idx]
        header += [f"re_{q}", f"im_{q}"]
        cols += [values.real, values.imag]
    return Table(tuple(header), tuple(cols))


def _closure(traj: Trajectory, n: int, tol: float) -> Optional[dict]:
    try:
        rep = check_closure(traj, n, tol)
    except InsufficientEvents:
        return None
    return {"radial_periods": n, "tol": tol, "closed": rep.closed, "mismatch": rep.mismatch}


def _measured(traj: Trajectory) -> Optional[float]:
    try:
        return measure_radial_period(traj)
    except InsufficientEvents:
        return None


def run_simulate(cfg: ScenarioConfig, closure_tol: float = 1e-6) -> tuple[Table, dict, Trajectory]:
    traj = integrate_scenario(cfg)
    spec = traj.spec
    E, L = _constants(spec, cfg.initial_state())
    inv = invariant_set(spec, cfg.initial_state())
    drifts = {q: drift(traj, q) for q in applicable_quantities(spec)}
    report = _describe(cfg, spec)
    report.update({
        "command": "simulate",
        "frame": traj.frame.value,
        "span": float(traj.clocks[-1] - traj.clocks[0]),
        "steps": len(traj) - 1,
        "tolerances": dict(zip(("rel_tol", "abs_tol"), cfg.run.tolerances(*SIM_TOLERANCES))),
        "invariants": {"L_pseudo": inv.L_pseudo, "E_pseudo": inv.E_pseudo, "T": inv.fjh, "A": inv.lrl},
        "drift": {q: {"initial": d.initial, "max_abs_deviation": d.max_abs_deviation, "rel_drift": d.rel_drift}
                  for q, d in drifts.items()},
        "measured_radial_period": _measured(traj),
        "closure": _closure(traj, revolution_radial_periods(spec), closure_tol),
        "E_pseudo": E,
        "L_pseudo": L,
    })
    return trajectory_table(traj, cfg.output.sample_stride), report, traj


def _rel(a: Optional[float], b: Optional[float]) -> Optional[float]:
    if a is None or b is None:
        return None
    return abs(a - b) / abs(b)


def period_routes(spec: EquationSpec, state: TrueState, radial_periods: float = 10.25,
                  tolerances: tuple[float, float] = SIM_TOLERANCES) -> dict:
    """Measured, quadrature, closed-form and Legendre-form periods in true time."""
    E, L = _constants(spec, state)
    aps = apsidal_radii(spec, E, L)
    quad = period_quadrature(spec, E, L)
    closed = legendre = None
    if spec.is_h_type or spec.is_k_type:
        closed = period_closed_form(spec, E, L)
        legendre = period_legendre_form(spec, E, L)
    traj = integrate(spec, state, (0.0, radial_periods * quad),
                     IntegratorConfig(rel_tol=tolerances[0], abs_tol=tolerances[1]))
    measured = _measured(traj)
    return {
        "E_pseudo": E,
        "L_pseudo": L,
        "apsides": {"a": aps.a, "b": aps.b},
        "periods": {"measured": measured, "quadrature": quad, "closed_form": closed, "legendre_form": legendre},
        "relative_differences": {
            "measured_vs_quadrature": _rel(measured, quad),
            "measured_vs_closed_form": _rel(measured, closed),
            "quadrature_vs_closed_form": _rel(quad, closed),
            "legendre_vs_closed_form": _rel(legendre, closed),
        },
    }


def run_period(cfg: ScenarioConfig) -> dict:
    spec = cfg.equation_spec()
    report = _describe(cfg, spec)
    report["command"] = "period"
    report.update(period_routes(spec, cfg.initial_state(), cfg.run.radial_periods,
                                cfg.run.tolerances(*SIM_TOLERANCES)))
    return report


def run_dualize(cfg: ScenarioConfig, with_round_trip: bool = False,
                points_per_period: int = 10_000) -> tuple[Table, dict, Trajectory, Trajectory]:
    spec = cfg.equation_spec()
    E, L = _constants(spec, cfg.initial_state())
    dmap = make_dual_map(spec.nu, E)
    source = integrate_scenario(cfg, frame="pseudo", tolerances=DUAL_TOLERANCES)
    dual = dualize_trajectory(source, dmap, points_per_period)
    res = dual_residual(dual, dmap)
    report = _describe(cfg, spec)
    report.update({
        "command": "dualize",
        "source_span": float(source.clocks[-1] - source.clocks[0]),
        "tolerances": dict(zip(("rel_tol", "abs_tol"), cfg.run.tolerances(*DUAL_TOLERANCES))),
        "E_pseudo": E,
        "L_pseudo": L,
        "map": {"nu": dmap.nu, "mu": dmap.mu, "exponent": dmap.exponent, "prefactor": dmap.prefactor,
                "time_prefactor": dmap.time_prefactor, "time_power": dmap.time_power, "B": dmap.B_amp},
        "residual": {"kappa_formula": res.kappa_formula, "residual_formula": res.residual_formula,
                     "kappa_fit": res.kappa_fit, "residual_fit": res.residual_fit,
                     "kappa_fit_over_E": res.kappa_fit / E, "grid_points": res.grid_points,
                     "kappa_rescaled": dmap.kappa_rescaled},
        "dual_samples": len(dual),
        "dual_span": float(dual.clocks[-1] - dual.clocks[0]),
    })
    if spec.is_h_type:
        report["hooke_kepler"] = certificate_dict(certify_hooke_kepler(source, points_per_period))
    if with_round_trip:
        rt = round_trip(source, dmap, points_per_period)
        report["round_trip"] = {"position_mismatch": rt.position_mismatch, "clock_mismatch": rt.clock_mismatch,
                                "resampling_error": rt.resampling_error, "within_budget": rt.within_budget}
    table = Table(("sigma", "re_w", "im_w", "rho"), (dual.clocks, dual.z.real, dual.z.imag, dual.r))
    if cfg.output.sample_stride > 1:
        idx = np.arange(0, len(dual), cfg.output.sample_stride)
        if idx[-1] != len(dual) - 1:
            idx = np.append(idx, len(dual) - 1)
        table = Table(table.header, tuple(c[idx] for c in table.columns))
    return table, report, source, dual


def certificate_dict(cert) -> dict:
    out = {f: getattr(cert, f) for f in cert.__dataclass_fields__}
    out["kappa_fit_over_E"] = cert.kappa_fit / cert.E_source
    return {k: (float(v) if isinstance(v, np.floating) else v) for k, v in out.items()}


# -- verification --------------------------------------------------------------------


def random_bound_state(spec: EquationSpec, rng: random.Random, ratio=(0.2, 0.6), scale=(0.5, 2.0),
                       ) -> TrueState:
    """Random bound initial state with apsidal ratio a/b in ``ratio`` and outer radius in ``scale``."""
    b = rng.uniform(*scale)
    a = b * rng.uniform(*ratio)
    k = spec.k
    if spec.is_h_type:
        E, L = 0.5 * k * (a * a + b * b), math.sqrt(k) * a * b
    elif spec.is_k_type:
        E, L = -k / (a + b), math.sqrt(2.0 * k * a * b / (a + b))
    else:
        raise ConfigError("randomized scenarios support H and K types only")
    return state_on_orbit(spec, E, L, radius_fraction=rng.uniform(0.0, 1.0),
                          angle=rng.uniform(-math.pi, math.pi), outward=rng.random() < 0.5)


_VERIFY_KEYS = {"drift_tol", "closure", "period", "dual", "round_trip", "randomize"}


def _check(checks: list, name: str, value, tol: float, below: bool = True) -> None:
    if value is None:
        checks.append({"check": name, "value": None, "tol": tol, "passed": False})
        return
    ok = value < tol if below else value > tol
    checks.append({"check": name, "value": float(value), "tol": tol, "passed": bool(ok)})


def _verify_state(cfg: ScenarioConfig, spec: EquationSpec, state: TrueState, label: str) -> list:
    v = cfg.verify
    checks: list = []
    if not {"drift_tol", "closure", "period"} & set(v):
        return checks
    rel, ab = cfg.run.tolerances(*SIM_TOLERANCES)
    E, L = _constants(spec, state)
    bound = True
    try:
        quad = period_quadrature(spec, E, L)
    except Unbound:
        bound = False
    span = cfg.run.span if cfg.run.span is not None else (cfg.run.radial_periods * quad if bound else None)
    if span is None:
        raise ConfigError("run.span is required for unbound orbits")
    traj = integrate(spec, state, (0.0, span), IntegratorConfig(rel_tol=rel, abs_tol=ab))
    if "drift_tol" in v:
        for q in applicable_quantities(spec):
            _check(checks, f"{label}drift_{q}", drift(traj, q).rel_drift, float(v["drift_tol"]))
    if "closure" in v:
        c = v["closure"]
        n = int(c.get("radial_periods", revolution_radial_periods(spec)))
        tol = float(c.get("tol", 1e-6))
        rep = _closure(traj, n, tol)
        mismatch = None if rep is None else rep["mismatch"]
        if c.get("expect_closed", True):
            _check(checks, f"{label}closure_mismatch", mismatch, tol)
        else:
            _check(checks, f"{label}closure_mismatch_exceeds", mismatch, tol, below=False)
    if "period" in v:
        p = v["period"]
        routes = period_routes(spec, state, cfg.run.radial_periods, (rel, ab))
        per, diffs = routes["periods"], routes["relative_differences"]
        if "measured_tol" in p:
            ref = per["closed_form"] if per["closed_form"] is not None else per["quadrature"]
            _check(checks, f"{label}period_measured", _rel(per["measured"], ref), float(p["measured_tol"]))
        if "closed_form_tol" in p and per["closed_form"] is not None:
            _check(checks, f"{label}period_quadrature_vs_closed", diffs["quadrature_vs_closed_form"],
                   float(p["closed_form_tol"]))
        if "expected" in p:
            tol = float(p.get("expected_tol", 1e-6))
            for route in ("measured", "quadrature", "closed_form"):
                if per[route] is not None:
                    _check(checks, f"{label}period_{route}_vs_expected", _rel(per[route], float(p["expected"])), tol)
    return checks


def verify_scenario(cfg: ScenarioConfig, seed: int = 0) -> dict:
    """Run the checks listed in a scenario's ``verify`` section."""
    v = cfg.verify
    unknown = set(v) - _VERIFY_KEYS
    if unknown:
        raise ConfigError(f"unknown keys in 'verify': {', '.join(sorted(unknown))}")
    if not v:
        raise ConfigError(f"scenario {cfg.name} has no verify section")
    spec = cfg.equation_spec()
    checks: list = []
    rand = v.get("randomize")
    if rand:
        rng = random.Random(f"{seed}:{cfg.name}")
        count = int(rand.get("count", 5))
        for i in range(count):
            state = random_bound_state(spec, rng, tuple(rand.get("ratio", (0.2, 0.6))),
                                       tuple(rand.get("scale", (0.5, 2.0))))
            checks += _verify_state(cfg, spec, state, f"run{i}.")
    else:
        state = cfg.initial_state()
        checks += _verify_state(cfg, spec, state, "")
    if "dual" in v:
        d = v["dual"]
        if rand:
            rng = random.Random(f"{seed}:{cfg.name}:dual")
            states = [random_bound_state(spec, rng, tuple(rand.get("ratio", (0.2, 0.6))),
                                         tuple(rand.get("scale", (0.5, 2.0))))
                      for _ in range(int(rand.get("count", 5)))]
        else:
            states = [cfg.initial_state()]
        fitted = []
        for i, state in enumerate(states):
            sub = replace(cfg, z0=state.z, v0=state.v)
            table, rep, *_ = run_dualize(sub, with_round_trip=bool(v.get("round_trip", False)))
            label = f"run{i}." if rand else ""
            _check(checks, f"{label}dual_residual_fit", rep["residual"]["residual_fit"],
                   float(d.get("residual_tol", 1e-5)))
            fitted.append(rep["residual"]["kappa_fit_over_E"])
            cert = rep.get("hooke_kepler")
            if cert is not None and "ratio_tol" in d:
                _check(checks, f"{label}dual_ratio_variation", cert["ratio_variation"], float(d["ratio_tol"]))
            if "round_trip" in rep:
                rt = rep["round_trip"]
                _check(checks, f"{label}round_trip_over_budget",
                       max(rt["position_mismatch"], rt["clock_mismatch"]) / rt["resampling_error"], 10.0)
        if len(fitted) > 1 and "kappa_spread_tol" in d:
            mean = float(np.mean(fitted))
            _check(checks, "dual_kappa_over_E_spread", max(abs(f - mean) for f in fitted) / abs(mean),
                   float(d["kappa_spread_tol"]))
    return {"name": cfg.name, "passed": all(c["passed"] for c in checks), "checks": checks}
