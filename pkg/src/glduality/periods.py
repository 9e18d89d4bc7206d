"""Apsidal radii and radial periods of spherically symmetric equations.

Three independent routes give the true-time radial period:

* quadrature of Barrow's formula after the substitution that moves the
  inverse square-root endpoint singularities into a Chebyshev weight,
* closed forms in terms of 2F1 for the logarithmic drag alpha(r) = -(p/2) ln r,
* the same closed forms rewritten with Legendre functions.

The third (measured) route lives in :mod:`glduality.integrate`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .core import DragKind, DragProfile, EquationSpec, TrueState, drag_eval
from .errors import DomainError, NonConvergent, Unbound
from .specfun import hyp2f1, legendre_argument, legendre_p

MAX_NODES = 2**16


@dataclass(frozen=True)
class ApsidalData:
    """Pericentral/apocentral radii and ellipse axes.

    H type: ``A_minor = a`` and ``B_major = b`` (centred ellipse). K type:
    ``a, b = B -/+ sqrt(B^2 - A^2)`` (focal ellipse). Other classes have no
    ellipse; the axes are set to ``(a, b)`` as for the H type.
    """

    a: float
    b: float
    A_minor: float
    B_major: float


def effective_potential(spec: EquationSpec, L_pseudo: float, r: float) -> float:
    if not r > 0.0:
        raise DomainError(f"effective potential needs r > 0, got {r!r}")
    return spec.k / spec.nu * r**spec.nu + L_pseudo**2 / (2.0 * r * r)


def k_axes_from_apsides(a: float, b: float) -> tuple[float, float]:
    """``(A_minor, B_major)`` of a focal ellipse with apsides a, b."""
    return math.sqrt(a * b), 0.5 * (a + b)


def k_apsides_from_axes(A_minor: float, B_major: float) -> tuple[float, float]:
    if not 0.0 < A_minor <= B_major:
        raise DomainError("need 0 < A_minor <= B_major")
    b = B_major + math.sqrt((B_major - A_minor) * (B_major + A_minor))
    return A_minor * A_minor / b, b


def _ellipse_data(spec: EquationSpec, a: float, b: float) -> ApsidalData:
    if spec.is_k_type:
        A, B = k_axes_from_apsides(a, b)
        return ApsidalData(a, b, A, B)
    return ApsidalData(a, b, a, b)


def apsidal_radii(spec: EquationSpec, E_pseudo: float, L_pseudo: float) -> ApsidalData:
    """Positive roots a <= b of E = V_L(r)."""
    k, E, L = spec.k, float(E_pseudo), float(L_pseudo)
    if k <= 0.0 or L == 0.0:
        raise Unbound("bound orbits need k > 0 and non-zero angular momentum")
    if spec.is_h_type:
        disc = E * E - k * L * L
        if E <= 0.0 or disc < -1e-14 * E * E:
            raise Unbound(f"H type needs E >= sqrt(k)|L| > 0, got E={E!r}, L={L!r}")
        b2 = (E + math.sqrt(max(disc, 0.0))) / k
        a2 = L * L / (k * b2)
        return _ellipse_data(spec, math.sqrt(a2), math.sqrt(b2))
    if spec.is_k_type:
        disc = k * k + 2.0 * E * L * L
        if E >= 0.0 or disc < -1e-14 * k * k:
            raise Unbound(f"K type needs -k^2/(2L^2) <= E < 0, got E={E!r}, L={L!r}")
        b = (k + math.sqrt(max(disc, 0.0))) / (-2.0 * E)
        a = -L * L / (2.0 * E * b)
        return _ellipse_data(spec, min(a, b), max(a, b))
    a, b = _bracketed_apsides(spec, E, L)
    return _ellipse_data(spec, a, b)


def _bracketed_apsides(spec: EquationSpec, E: float, L: float) -> tuple[float, float]:
    nu = spec.nu
    if nu <= -2.0:
        raise Unbound("classes with nu <= -2 have no bound annulus")
    r_min = (L * L / spec.k) ** (1.0 / (nu + 2.0))

    def gap(r):
        return effective_potential(spec, L, r) - E

    g_min = gap(r_min)
    if g_min > 1e-14 * max(abs(E), 1.0):
        raise Unbound(f"E={E!r} lies below the minimum of the effective potential")
    if g_min >= 0.0:
        return r_min, r_min
    lo = r_min
    for _ in range(2000):
        lo *= 0.5
        if gap(lo) > 0.0:
            break
    else:
        raise Unbound("no inner turning point")
    hi = r_min
    for _ in range(2000):
        hi *= 2.0
        if not math.isfinite(hi):
            break
        if gap(hi) > 0.0:
            break
    else:
        raise Unbound("no outer turning point")
    if not (math.isfinite(hi) and gap(hi) > 0.0):
        raise Unbound("no outer turning point")
    a = brentq(gap, lo, r_min, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    b = brentq(gap, r_min, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    return a, b


# -- quadrature ------------------------------------------------------------------


def gauss_chebyshev(f: Callable[[np.ndarray], np.ndarray], tol: float = 1e-10, n0: int = 8,
                    max_nodes: int = MAX_NODES) -> tuple[float, int]:
    """Integrate f(x) / sqrt(x (1 - x)) over [0, 1] with first-kind Gauss-Chebyshev nodes.

    The node count doubles until two successive estimates agree to ``tol``
    relative. Returns ``(value, nodes_used)``.
    """
    previous = None
    n = n0
    while n <= max_nodes:
        j = np.arange(1, n + 1)
        x = np.cos((2 * j - 1) * np.pi / (4 * n)) ** 2
        value = math.pi / n * math.fsum(np.asarray(f(x), dtype=float))
        if previous is not None and abs(value - previous) <= tol * abs(value):
            return value, n
        previous = value
        n *= 2
    raise NonConvergent(f"Gauss-Chebyshev did not reach tol={tol:g} with {max_nodes} nodes")


def _alpha_array(drag: DragProfile, r: np.ndarray) -> np.ndarray:
    if drag.kind is DragKind.NONE:
        return np.zeros_like(r)
    if drag.kind is DragKind.LOG_RADIAL:
        return -0.5 * drag.alpha_param * np.log(r)
    return np.array([drag_eval(drag, float(x))[0] for x in r])


def period_quadrature(spec: EquationSpec, E_pseudo: float, L_pseudo: float, tol: float = 1e-10) -> float:
    """True-time radial period (pericenter to pericenter) by quadrature."""
    aps = apsidal_radii(spec, E_pseudo, L_pseudo)
    a, b = aps.a, aps.b
    drag = spec.drag
    E = float(E_pseudo)
    if spec.is_h_type:
        scale = 1.0 / math.sqrt(spec.k)

        def f(x):
            return np.exp(_alpha_array(drag, np.sqrt((b * b - a * a) * x + a * a)))

    elif spec.is_k_type:
        scale = math.sqrt(2.0) / math.sqrt(-E)

        def f(x):
            r = a + (b - a) * x
            return r * np.exp(_alpha_array(drag, r))

    else:
        if b - a <= 1e-12 * a:
            curvature = spec.k * (spec.nu - 1.0) * a ** (spec.nu - 2.0) + 3.0 * L_pseudo**2 / a**4
            return 2.0 * math.pi * math.exp(drag_eval(drag, a)[0]) / math.sqrt(curvature)
        scale = math.sqrt(2.0)
        L2 = float(L_pseudo) ** 2
        A_pot = spec.k / spec.nu

        def f(x):
            r = a + (b - a) * x
            gap = E - (A_pot * r**spec.nu + L2 / (2.0 * r * r))
            q = gap / ((r - a) * (b - r))
            return np.exp(_alpha_array(drag, r)) / np.sqrt(q)

    value, _ = gauss_chebyshev(f, tol=tol)
    return scale * value


# -- closed forms for the logarithmic drag ----------------------------------------


def _check_apsides(a: float, b: float):
    if not 0.0 < a <= b:
        raise DomainError(f"need 0 < a <= b, got a={a!r}, b={b!r}")


def period_closed_form_H(alpha_param: float, k: float, a: float, b: float) -> float:
    _check_apsides(a, b)
    if not k > 0.0:
        raise DomainError("H type closed form needs k > 0")
    z = (a * a - b * b) / (a * a)
    F = hyp2f1(alpha_param / 4.0, 0.5, 1.0, z).value
    return math.pi * a ** (-alpha_param / 2.0) / math.sqrt(k) * F


def period_closed_form_K(alpha_param: float, E_pseudo: float, a: float, b: float) -> float:
    _check_apsides(a, b)
    if not E_pseudo < 0.0:
        raise DomainError("K type closed form needs E < 0")
    z = (a - b) / a
    F = hyp2f1(alpha_param / 2.0 - 1.0, 0.5, 1.0, z).value
    return math.sqrt(2.0) * math.pi * a ** (1.0 - alpha_param / 2.0) / math.sqrt(-E_pseudo) * F


def legendre_form_H(alpha_param: float, k: float, a: float, b: float) -> float:
    _check_apsides(a, b)
    z = (a * a - b * b) / (a * a)
    P = legendre_p(alpha_param / 4.0 - 1.0, 0.0, legendre_argument(z)).value
    return math.pi * a ** (-alpha_param / 2.0) / math.sqrt(k) * (1.0 - z) ** (-alpha_param / 8.0) * P


def legendre_form_K(alpha_param: float, E_pseudo: float, a: float, b: float,
                    exponent_divisor: float = 4.0) -> float:
    """Legendre form of the K type period.

    The factor is ``(1 - z)**(-(alpha_param - 2) / exponent_divisor)``. The
    default divisor 4 is what the 2F1-Legendre identity produces; passing 2
    evaluates the variant with the larger exponent for comparison.
    """
    _check_apsides(a, b)
    z = (a - b) / a
    P = legendre_p(alpha_param / 2.0 - 2.0, 0.0, legendre_argument(z)).value
    pre = math.sqrt(2.0) * math.pi * a ** (1.0 - alpha_param / 2.0) / math.sqrt(-E_pseudo)
    return pre * (1.0 - z) ** (-(alpha_param - 2.0) / exponent_divisor) * P


def period_closed_form(spec: EquationSpec, E_pseudo: float, L_pseudo: float) -> float:
    """Closed-form period for H or K type equations with no or logarithmic drag."""
    if spec.drag.kind is DragKind.CUSTOM_RADIAL:
        raise DomainError("closed forms only exist for the logarithmic drag")
    p = spec.drag.alpha_param if spec.drag.kind is DragKind.LOG_RADIAL else 0.0
    aps = apsidal_radii(spec, E_pseudo, L_pseudo)
    if spec.is_h_type:
        return period_closed_form_H(p, spec.k, aps.a, aps.b)
    if spec.is_k_type:
        return period_closed_form_K(p, E_pseudo, aps.a, aps.b)
    raise DomainError(f"no closed form for class nu={spec.nu:g}")


def period_legendre_form(spec: EquationSpec, E_pseudo: float, L_pseudo: float) -> float:
    if spec.drag.kind is DragKind.CUSTOM_RADIAL:
        raise DomainError("closed forms only exist for the logarithmic drag")
    p = spec.drag.alpha_param if spec.drag.kind is DragKind.LOG_RADIAL else 0.0
    aps = apsidal_radii(spec, E_pseudo, L_pseudo)
    if spec.is_h_type:
        return legendre_form_H(p, spec.k, aps.a, aps.b)
    if spec.is_k_type:
        return legendre_form_K(p, E_pseudo, aps.a, aps.b)
    raise DomainError(f"no closed form for class nu={spec.nu:g}")


# -- initial conditions ------------------------------------------------------------


def state_on_orbit(spec: EquationSpec, E_pseudo: float, L_pseudo: float, radius_fraction: float = 0.0,
                   angle: float = 0.0, outward: bool = True) -> TrueState:
    """True-time state with the given pseudo-energy and pseudo-angular momentum.

    The radius is ``a + radius_fraction * (b - a)`` and the position angle is
    ``angle``; ``outward`` chooses the sign of the radial velocity.
    """
    aps = apsidal_radii(spec, E_pseudo, L_pseudo)
    if not 0.0 <= radius_fraction <= 1.0:
        raise DomainError("radius_fraction must lie in [0, 1]")
    r = aps.a + radius_fraction * (aps.b - aps.a)
    gap = E_pseudo - effective_potential(spec, L_pseudo, r)
    radial = math.sqrt(max(2.0 * gap, 0.0)) * (1.0 if outward else -1.0)
    direction = complex(math.cos(angle), math.sin(angle))
    v_pseudo = (radial + 1j * L_pseudo / r) * direction
    h, _ = drag_eval(spec.drag, r)
    return TrueState(t=0.0, z=r * direction, v=v_pseudo * math.exp(-h), s=0.0)
