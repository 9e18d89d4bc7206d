"""Right-hand sides for the true motion and the pseudomotion.

The integrators work on a real 5-vector ``(x, y, vx, vy, c)`` where ``c`` is
the clock of the frame that is *not* being integrated: pseudotime ``s`` when
integrating in true time and true time ``t`` when integrating in pseudotime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import DragKind, EquationSpec, PseudoState, TrueState, drag_eval
from .errors import DomainError

VectorField = Callable[[float, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Deriv4:
    dz: complex
    dv: complex
    dclock: float


def _check_radius(z: complex) -> float:
    r = abs(z)
    if not r > 0.0:
        raise DomainError("equation is singular at r = 0")
    return r


def true_rhs(spec: EquationSpec, state: TrueState) -> Deriv4:
    z, v = state.z, state.v
    r = _check_radius(z)
    h, dh = drag_eval(spec.drag, r)
    rdot = (z.conjugate() * v).real / r
    force = spec.k * r ** (spec.nu - 2.0) * math.exp(-2.0 * h)
    dv = -dh * rdot * v - force * z
    return Deriv4(dz=v, dv=dv, dclock=math.exp(-h))


def pseudo_rhs(spec: EquationSpec, state: PseudoState) -> Deriv4:
    z = state.z
    r = _check_radius(z)
    h, _ = drag_eval(spec.drag, r)
    dv = -spec.k * r ** (spec.nu - 2.0) * z
    return Deriv4(dz=state.v, dv=dv, dclock=math.exp(h))


def radial_potential(spec: EquationSpec, r: float) -> float:
    """Pseudomotion potential U(r) = (k / nu) r**nu."""
    if not r > 0.0:
        raise DomainError(f"potential needs r > 0, got {r!r}")
    return spec.k / spec.nu * r**spec.nu


def to_pseudo(spec: EquationSpec, state: TrueState) -> PseudoState:
    """Same physical point seen on the pseudotime clock: z' = exp(alpha) zdot."""
    h, _ = drag_eval(spec.drag, _check_radius(state.z))
    return PseudoState(s=state.s, z=state.z, v=state.v * math.exp(h), t=state.t)


def to_true(spec: EquationSpec, state: PseudoState) -> TrueState:
    h, _ = drag_eval(spec.drag, _check_radius(state.z))
    return TrueState(t=state.t, z=state.z, v=state.v * math.exp(-h), s=state.s)


# -- vector fields used by the integrator --------------------------------------


def _drag_callable(spec: EquationSpec) -> Callable[[float], tuple[float, float]]:
    drag = spec.drag
    if drag.kind is DragKind.NONE:
        return lambda r: (0.0, 0.0)
    if drag.kind is DragKind.LOG_RADIAL:
        half = 0.5 * drag.alpha_param
        return lambda r: (-half * math.log(r), -half / r)
    return lambda r: (float(drag.func(r)), float(drag.deriv(r)))


def true_vector_field(spec: EquationSpec) -> VectorField:
    k, p = spec.k, spec.nu - 2.0
    drag = _drag_callable(spec)
    exp, sqrt = math.exp, math.sqrt

    def f(_t: float, y: np.ndarray) -> np.ndarray:
        x, yy, vx, vy, _ = y
        r2 = x * x + yy * yy
        if r2 == 0.0:
            raise DomainError("equation is singular at r = 0")
        r = sqrt(r2)
        h, dh = drag(r)
        damp = dh * (x * vx + yy * vy) / r
        force = k * r**p * exp(-2.0 * h)
        return np.array((vx, vy, -damp * vx - force * x, -damp * vy - force * yy, exp(-h)))

    return f


def pseudo_vector_field(spec: EquationSpec) -> VectorField:
    k, p = spec.k, spec.nu - 2.0
    drag = _drag_callable(spec)
    exp, sqrt = math.exp, math.sqrt

    def f(_s: float, y: np.ndarray) -> np.ndarray:
        x, yy, vx, vy, _ = y
        r2 = x * x + yy * yy
        if r2 == 0.0:
            raise DomainError("equation is singular at r = 0")
        r = sqrt(r2)
        h, _ = drag(r)
        force = k * r**p
        return np.array((vx, vy, -force * x, -force * yy, exp(h)))

    return f
