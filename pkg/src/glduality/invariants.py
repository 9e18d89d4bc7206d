"""Conserved quantities of generalized Gorringe-Leach motions.

All quantities are evaluated on true-time states; the pseudovelocity is
``z' = exp(alpha(r)) * zdot``. The complex Laplace-Runge-Lenz form uses

    A = -i * L * z' / k - z / r

with ``L = Im(conj(z) z')``. This orientation gives A = 0 on circular
orbits, |A| equal to the eccentricity, and A pointing at the pericenter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .core import DragKind, EquationSpec, PseudoState, TrueState, drag_eval
from .errors import DomainError, WrongClass

QUANTITIES = ("L", "E", "T", "A")


@dataclass(frozen=True)
class InvariantSet:
    L_pseudo: float
    E_pseudo: float
    fjh: complex | None = None
    lrl: complex | None = None

    @property
    def fjh_tensor(self) -> tuple[float, float, float]:
        """``(T_xx, T_yy, T_xy)`` of the pseudo Fradkin-Jauch-Hill tensor."""
        if self.fjh is None:
            raise WrongClass("no FJH quantity on a non H-type equation")
        return (
            (self.E_pseudo + self.fjh).real,
            (self.E_pseudo - self.fjh).real,
            self.fjh.imag,
        )

    @property
    def lrl_vector(self) -> tuple[float, float]:
        if self.lrl is None:
            raise WrongClass("no LRL quantity on a non K-type equation")
        return self.lrl.real, self.lrl.imag


@dataclass(frozen=True)
class DriftReport:
    quantity: str
    initial: Union[float, complex]
    max_abs_deviation: float
    rel_drift: float


def _pseudo_velocity(spec: EquationSpec, state) -> tuple[float, complex]:
    r = abs(state.z)
    if not r > 0.0:
        raise DomainError("invariants need r > 0")
    if isinstance(state, PseudoState):
        return r, complex(state.v)
    h, _ = drag_eval(spec.drag, r)
    return r, math.exp(h) * complex(state.v)


def pseudo_angular_momentum(spec: EquationSpec, state: TrueState) -> float:
    _, vp = _pseudo_velocity(spec, state)
    return (complex(state.z).conjugate() * vp).imag


def pseudo_energy(spec: EquationSpec, state: TrueState) -> float:
    r, vp = _pseudo_velocity(spec, state)
    return 0.5 * abs(vp) ** 2 + spec.k / spec.nu * r**spec.nu


def fjh_complex(spec: EquationSpec, state: TrueState) -> complex:
    if not spec.is_h_type:
        raise WrongClass(f"FJH quantity needs an H-type equation (nu=2), got nu={spec.nu:g}")
    _, vp = _pseudo_velocity(spec, state)
    z = complex(state.z)
    return 0.5 * vp * vp + 0.5 * spec.k * z * z


def lrl_complex(spec: EquationSpec, state: TrueState) -> complex:
    if not spec.is_k_type:
        raise WrongClass(f"LRL quantity needs a K-type equation (nu=-1), got nu={spec.nu:g}")
    r, vp = _pseudo_velocity(spec, state)
    z = complex(state.z)
    L = (z.conjugate() * vp).imag
    return -1j * L * vp / spec.k - z / r


def invariant_set(spec: EquationSpec, state: TrueState) -> InvariantSet:
    return InvariantSet(
        L_pseudo=pseudo_angular_momentum(spec, state),
        E_pseudo=pseudo_energy(spec, state),
        fjh=fjh_complex(spec, state) if spec.is_h_type else None,
        lrl=lrl_complex(spec, state) if spec.is_k_type else None,
    )


# -- along trajectories ---------------------------------------------------------


def _pseudo_velocity_array(traj) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    from .integrate import Frame

    z, v, r = traj.z, traj.v, traj.r
    if traj.frame is Frame.PSEUDO:
        return z, v, r
    drag = traj.spec.drag
    if drag.kind is DragKind.NONE:
        return z, v, r
    h = np.array([drag_eval(drag, float(x))[0] for x in r])
    return z, v * np.exp(h), r


def series(traj, which: str) -> np.ndarray:
    """Values of quantity ``which`` (one of L, E, T, A) at every stored sample."""
    spec = traj.spec
    z, vp, r = _pseudo_velocity_array(traj)
    if which == "L":
        return (np.conj(z) * vp).imag
    if which == "E":
        return 0.5 * np.abs(vp) ** 2 + spec.k / spec.nu * r**spec.nu
    if which == "T":
        if not spec.is_h_type:
            raise WrongClass("FJH quantity needs an H-type equation")
        return 0.5 * vp * vp + 0.5 * spec.k * z * z
    if which == "A":
        if not spec.is_k_type:
            raise WrongClass("LRL quantity needs a K-type equation")
        L = (np.conj(z) * vp).imag
        return -1j * L * vp / spec.k - z / r
    raise ValueError(f"unknown quantity {which!r}; expected one of {QUANTITIES}")


def drift(traj, which: str) -> DriftReport:
    """Largest deviation of a conserved quantity from its initial value.

    Complex quantities are compared by modulus of the difference, so the
    relative drift is measured against |initial|, not per component.
    """
    values = series(traj, which)
    initial = values[0]
    dev = float(np.max(np.abs(values - initial)))
    rel = dev / max(abs(initial), 1e-12)
    init_out = complex(initial) if np.iscomplexobj(values) else float(initial)
    return DriftReport(quantity=which, initial=init_out, max_abs_deviation=dev, rel_drift=rel)


def applicable_quantities(spec: EquationSpec) -> tuple[str, ...]:
    extra = ("T",) if spec.is_h_type else ("A",) if spec.is_k_type else ()
    return ("L", "E") + extra
