"""Domain types for generalized Gorringe-Leach equations.

Planar positions and velocities are Python ``complex`` numbers. An equation of
class ``nu`` reads

    z'' + H'(r) r' z' + k r**(nu - 2) exp(-2 H(r)) z = 0

in true time, and becomes the conservative motion z'' + k r**(nu - 2) z = 0
in the pseudotime ``s`` defined by ds = exp(-H) dt. Mass is fixed to 1 and
every quantity is dimensionless.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from .errors import DegenerateClass, DomainError

ComplexVal = complex


@dataclass(frozen=True)
class TrueState:
    """State on the true-time clock; ``s`` is the pseudotime accumulated so far."""

    t: float
    z: complex
    v: complex
    s: float = 0.0

    @property
    def r(self) -> float:
        return abs(self.z)


@dataclass(frozen=True)
class PseudoState:
    """State on the pseudotime clock; ``v`` is dz/ds and ``t`` the accumulated true time."""

    s: float
    z: complex
    v: complex
    t: float = 0.0

    @property
    def r(self) -> float:
        return abs(self.z)


class DragKind(enum.Enum):
    NONE = "none"
    LOG_RADIAL = "log"
    CUSTOM_RADIAL = "custom"


@dataclass(frozen=True)
class DragProfile:
    """Radial drag potential H(z, zbar) = alpha(r).

    Use the constructors :meth:`none`, :meth:`log_radial` and :meth:`custom`
    rather than building instances by hand. For the logarithmic profile
    ``alpha(r) = -(alpha_param / 2) ln r``, which turns the H and K type
    equations into the original Gorringe-Leach pair.
    """

    kind: DragKind = DragKind.NONE
    alpha_param: float = 0.0
    func: Optional[Callable[[float], float]] = field(default=None, compare=False)
    deriv: Optional[Callable[[float], float]] = field(default=None, compare=False)

    @classmethod
    def none(cls) -> "DragProfile":
        return cls(DragKind.NONE)

    @classmethod
    def log_radial(cls, alpha_param: float) -> "DragProfile":
        return cls(DragKind.LOG_RADIAL, alpha_param=float(alpha_param))

    @classmethod
    def custom(cls, func: Callable[[float], float], deriv: Callable[[float], float]) -> "DragProfile":
        return cls(DragKind.CUSTOM_RADIAL, func=func, deriv=deriv)

    def __call__(self, r: float) -> tuple[float, float]:
        return drag_eval(self, r)

    def describe(self) -> str:
        if self.kind is DragKind.NONE:
            return "none"
        if self.kind is DragKind.LOG_RADIAL:
            return f"log(alpha={self.alpha_param:g})"
        return "custom"


def drag_eval(drag: DragProfile, r: float) -> tuple[float, float]:
    """Return ``(alpha(r), d alpha / dr)``."""
    if not r > 0.0:
        raise DomainError(f"drag profile needs r > 0, got r={r!r}")
    if drag.kind is DragKind.NONE:
        return 0.0, 0.0
    if drag.kind is DragKind.LOG_RADIAL:
        half = 0.5 * drag.alpha_param
        return -half * math.log(r), -half / r
    return float(drag.func(r)), float(drag.deriv(r))


@dataclass(frozen=True)
class EquationSpec:
    nu: float
    k: float
    drag: DragProfile = field(default_factory=DragProfile.none)

    @property
    def is_h_type(self) -> bool:
        return self.nu == 2.0

    @property
    def is_k_type(self) -> bool:
        return self.nu == -1.0

    @property
    def potential_amplitude(self) -> float:
        """Amplitude A of the pseudomotion potential U = A r**nu (k = nu A)."""
        return self.k / self.nu

    @property
    def singular_at_origin(self) -> bool:
        return self.nu < 2.0 or self.drag.kind is not DragKind.NONE

    @property
    def label(self) -> str:
        if self.is_h_type:
            name = "H"
        elif self.is_k_type:
            name = "K"
        else:
            name = f"class {self.nu:g}"
        return f"{name}, k={self.k:g}, drag={self.drag.describe()}"


def make_equation(nu: float, k: float, drag: Optional[DragProfile] = None) -> EquationSpec:
    """Build the class-``nu`` equation with coupling ``k``.

    ``nu = 2`` is the H (Hooke-like) type and ``nu = -1`` the K (Kepler-like)
    type. ``nu = 0`` (logarithmic potential) and ``nu = -2`` (where the dual
    exponent blows up) are rejected.
    """
    nu = float(nu)
    k = float(k)
    if nu == 0.0 or nu == -2.0:
        raise DegenerateClass(f"class exponent nu={nu:g} is degenerate")
    if not (math.isfinite(nu) and math.isfinite(k)):
        raise DomainError("nu and k must be finite")
    if k == 0.0:
        raise DomainError("coupling k must be non-zero")
    return EquationSpec(nu=nu, k=k, drag=drag if drag is not None else DragProfile.none())


def h_type(k: float = 1.0, drag: Optional[DragProfile] = None) -> EquationSpec:
    return make_equation(2.0, k, drag)


def k_type(k: float = 1.0, drag: Optional[DragProfile] = None) -> EquationSpec:
    return make_equation(-1.0, k, drag)
