"""Arnold-Vassiliev duality between power-law classes.

A pseudomotion of class ``nu`` (z'' + k r**(nu-2) z = 0) is carried to a
pseudomotion of class ``mu = -nu / (1 + nu/2)`` by a power map of the
position and a radial change of pseudotime. Writing m = 1 + nu/2:

    z = (1/m) w**(1/m)                 i.e.  w = (m z)**m
    ds = m**(-nu/m) rho**(-nu/m) dsigma        rho = |w|

For nu = 2 this is the Levi-Civita squaring map: centred Hooke ellipses go
to focal Kepler ellipses. The dual coupling predicted by
``kappa = mu * B`` with ``B = -E / (1 + mu/2)**2`` is reported next to a
coupling fitted from the transformed samples; the two are never assumed to
agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.integrate import cumulative_simpson

from .core import make_equation
from .errors import DegenerateClass, DomainError, WrongClass
from .integrate import Frame, Trajectory


def dual_exponent(nu: float) -> float:
    nu = float(nu)
    if nu == -2.0:
        raise DegenerateClass("nu = -2 has no dual class")
    return -nu / (1.0 + nu / 2.0)


def _real_power(base: float, exponent: float) -> float:
    if base > 0.0:
        return base**exponent
    if exponent == math.floor(exponent):
        return base ** int(exponent)
    raise DegenerateClass(f"{base:g}**{exponent:g} is not real")


@dataclass(frozen=True)
class DualMap:
    """Position and pseudotime maps from a source class ``nu`` to a target class ``mu``.

    ``w = prefactor * z**exponent`` (continuous branch) and
    ``d(source clock) = time_prefactor * rho**time_power * d(target clock)``
    with ``rho = |w|``. ``B_amp`` and ``kappa`` are the target potential
    amplitude and coupling assigned to the map.
    """

    nu: float
    mu: float
    exponent: float
    prefactor: float
    time_prefactor: float
    time_power: float
    E_source: float
    B_amp: float
    kappa: float

    @property
    def kappa_rescaled(self) -> float:
        """``kappa * (exponent * time_prefactor)**2``.

        The coupling the transformed motion actually carries under this
        time normalization. It equals ``kappa`` only when
        ``exponent * time_prefactor == 1``, which for the forward map holds
        at nu = 2 alone.
        """
        return self.kappa * (self.exponent * self.time_prefactor) ** 2

    def inverse(self, E_source: float = math.nan, kappa: float = math.nan) -> "DualMap":
        """Exact inverse transformation (target back to source).

        ``E_source`` is the pseudo-energy of the dual motion and ``kappa`` the
        coupling of the original source class, if known.
        """
        e, P, lam, tau = self.exponent, self.prefactor, self.time_prefactor, self.time_power
        return DualMap(
            nu=self.mu,
            mu=self.nu,
            exponent=1.0 / e,
            prefactor=P ** (-1.0 / e),
            time_prefactor=1.0 / lam * P ** (-tau),
            time_power=-e * tau,
            E_source=E_source,
            B_amp=kappa / self.nu if math.isfinite(kappa) else math.nan,
            kappa=kappa,
        )


def make_dual_map(nu: float, E_source: float) -> DualMap:
    nu = float(nu)
    if nu == 0.0:
        raise DegenerateClass("nu = 0 (logarithmic potential) is not dualizable")
    mu = dual_exponent(nu)
    m = 1.0 + nu / 2.0
    B = -float(E_source) / (1.0 + mu / 2.0) ** 2
    return DualMap(
        nu=nu,
        mu=mu,
        exponent=m,
        prefactor=_real_power(m, m),
        time_prefactor=_real_power(m, -nu / m),
        time_power=-nu / m,
        E_source=float(E_source),
        B_amp=B,
        kappa=mu * B,
    )


class BranchTracker:
    """Continuation context for the multivalued power map.

    Keeps the last unwrapped argument so that successive positions along a
    path never jump across the principal branch cut. The first call uses
    the principal argument in (-pi, pi].
    """

    def __init__(self, theta: Optional[float] = None):
        self.theta = theta

    def unwrap(self, z: complex) -> float:
        theta = math.atan2(z.imag, z.real)
        if self.theta is not None:
            theta += 2.0 * math.pi * round((self.theta - theta) / (2.0 * math.pi))
        self.theta = theta
        return theta


def map_position(dmap: DualMap, z: complex, branch: Optional[BranchTracker] = None) -> complex:
    z = complex(z)
    r = abs(z)
    if not r > 0.0:
        raise DomainError("the dual map is singular at z = 0")
    theta = branch.unwrap(z) if branch is not None else math.atan2(z.imag, z.real)
    e = dmap.exponent
    return dmap.prefactor * r**e * complex(math.cos(e * theta), math.sin(e * theta))


def map_positions(dmap: DualMap, z: np.ndarray, theta0: Optional[float] = None) -> np.ndarray:
    """Vectorised :func:`map_position` along an ordered path with continuous branch."""
    z = np.asarray(z, dtype=complex)
    r = np.abs(z)
    if np.any(r <= 0.0):
        raise DomainError("the dual map is singular at z = 0")
    theta = np.unwrap(np.angle(z))
    if theta0 is not None:
        theta = theta + 2.0 * math.pi * round((theta0 - theta[0]) / (2.0 * math.pi))
    e = dmap.exponent
    return dmap.prefactor * r**e * np.exp(1j * e * theta)


def map_pseudotime_increment(dmap: DualMap, rho: float, dsigma: float) -> float:
    if not rho > 0.0:
        raise DomainError("rho must be positive")
    return dmap.time_prefactor * rho**dmap.time_power * dsigma


# -- trajectories ------------------------------------------------------------------


def _sample_density(traj: Trajectory) -> float:
    """Shortest angular time scale 2 pi min(r / |v|) along the samples."""
    speed = np.abs(traj.v)
    r = traj.r
    ok = speed > 0.0
    if not np.any(ok):
        raise DomainError("trajectory never moves")
    return 2.0 * math.pi * float(np.min(r[ok] / speed[ok]))


def _grid_intervals(traj: Trajectory, points_per_period: int) -> int:
    s0, s1 = traj.span
    return max(64, int(math.ceil((s1 - s0) / _sample_density(traj) * points_per_period)))


def dualize_trajectory(traj: Trajectory, dmap: DualMap, points_per_period: int = 10_000,
                       intervals: Optional[int] = None, theta0: Optional[float] = None) -> Trajectory:
    """Transform a pseudomotion trajectory into the dual class.

    The source is resampled on a uniform pseudotime grid with
    ``points_per_period`` points per characteristic time; the dual clock is
    obtained by cumulative Simpson quadrature of d(sigma)/ds. The returned
    trajectory has clock sigma, columns ``(w, w', s)`` and cubic Hermite
    interpolation. ``intervals`` overrides the number of grid intervals and
    ``theta0`` fixes the branch through the unwrapped argument of the first
    source position (principal argument by default).
    """
    if traj.frame is not Frame.PSEUDO:
        raise WrongClass("dualization acts on pseudomotions; integrate a PseudoState")
    if traj.spec.nu != dmap.nu:
        raise WrongClass(f"trajectory has class {traj.spec.nu:g}, map expects {dmap.nu:g}")
    s0, s1 = traj.span
    n = intervals or _grid_intervals(traj, points_per_period)
    s = np.linspace(s0, s1, n + 1)
    y = traj(s)
    z = y[:, 0] + 1j * y[:, 1]
    zp = y[:, 2] + 1j * y[:, 3]
    if np.any(np.abs(z) <= 0.0):
        raise DomainError("source trajectory reaches r = 0")
    # only feeds the velocity interpolant; positions never depend on it
    zpp = -traj.spec.k * np.abs(z) ** (traj.spec.nu - 2.0) * z

    e, lam, tau = dmap.exponent, dmap.time_prefactor, dmap.time_power
    w = map_positions(dmap, z, theta0)
    rho = np.abs(w)
    g = lam * rho**tau  # ds/dsigma
    sigma = cumulative_simpson(1.0 / g, x=s, initial=0.0)
    wz = w / z  # prefactor * z**(e-1) on the tracked branch
    wp = e * wz * zp * g
    r = np.abs(z)
    rdot = (np.conj(z) * zp).real / r
    drho = dmap.prefactor * e * r ** (e - 1.0) * rdot
    dg = lam * tau * rho ** (tau - 1.0) * drho
    wpp = g * e * wz * ((e - 1.0) * zp * zp / z * g + zpp * g + zp * dg)

    ys = np.column_stack((w.real, w.imag, wp.real, wp.imag, s))
    dys = np.column_stack((wp.real, wp.imag, wpp.real, wpp.imag, g))
    k_dual = dmap.kappa if math.isfinite(dmap.kappa) and dmap.kappa != 0.0 else 1.0
    dual_spec = make_equation(dmap.mu, k_dual)
    return Trajectory.from_hermite(dual_spec, Frame.PSEUDO, sigma, ys, dys)


@dataclass(frozen=True)
class DualResidual:
    kappa_formula: float
    residual_formula: float
    kappa_fit: float
    residual_fit: float
    grid_points: int


def second_derivative_5pt(values: np.ndarray, h: float) -> np.ndarray:
    """Centred fourth-order stencil; drops two points at each end."""
    f = values
    return (-f[:-4] + 16.0 * f[1:-3] - 30.0 * f[2:-2] + 16.0 * f[3:-1] - f[4:]) / (12.0 * h * h)


def dual_residual(dual_traj: Trajectory, dmap: DualMap, points_per_period: int = 500) -> DualResidual:
    """Check w'' + kappa rho**(mu-2) w = 0 on a uniform sigma grid.

    w'' comes from a 5-point stencil on resampled positions only, never
    from the source equation. The residual is the worst per-sample ratio
    |w'' + kappa g| / max(|kappa g|, 1e-12) with g = rho**(mu-2) w.
    """
    s0, s1 = dual_traj.span
    n = _grid_intervals(dual_traj, points_per_period)
    sigma = np.linspace(s0, s1, n + 1)
    h = sigma[1] - sigma[0]
    y = dual_traj(sigma)
    w = y[:, 0] + 1j * y[:, 1]
    wpp = second_derivative_5pt(w, h)
    wc = w[2:-2]
    g = np.abs(wc) ** (dmap.mu - 2.0) * wc
    kappa_fit = -float(np.sum((np.conj(g) * wpp).real) / np.sum(np.abs(g) ** 2))

    def residual(kappa):
        scale = np.maximum(np.abs(kappa * g), 1e-12)
        return float(np.max(np.abs(wpp + kappa * g) / scale))

    return DualResidual(
        kappa_formula=dmap.kappa,
        residual_formula=residual(dmap.kappa),
        kappa_fit=kappa_fit,
        residual_fit=residual(kappa_fit),
        grid_points=n + 1,
    )


def with_coupling(traj: Trajectory, kappa: float) -> Trajectory:
    """Same samples, reinterpreted as a motion with coupling ``kappa``."""
    out = Trajectory(replace(traj.spec, k=float(kappa)), traj.frame, traj.clocks, traj.ys, traj.coeffs)
    return out


# -- round trip and certification ----------------------------------------------------


@dataclass(frozen=True)
class RoundTrip:
    position_mismatch: float
    clock_mismatch: float
    resampling_error: float

    @property
    def within_budget(self) -> bool:
        return max(self.position_mismatch, self.clock_mismatch) <= 10.0 * self.resampling_error


def resampling_error(traj: Trajectory, dmap: DualMap, points_per_period: int = 10_000) -> float:
    """Estimated relative error of a dualization at ``points_per_period``.

    Compares against a grid with half as many intervals whose nodes are the
    even nodes of the full grid: dual clocks at shared nodes and Hermite
    positions at the odd nodes. Both errors are fourth order, so the
    difference is divided by 15. Accumulated round-off of the cumulative
    quadrature, ``n * eps``, is the floor.
    """
    n = _grid_intervals(traj, points_per_period)
    n += n % 2
    fine = dualize_trajectory(traj, dmap, intervals=n)
    coarse = dualize_trajectory(traj, dmap, intervals=n // 2)
    span = fine.clocks[-1] - fine.clocks[0]
    clock = float(np.max(np.abs(fine.clocks[::2] - coarse.clocks))) / span
    wc = coarse(fine.clocks[1::2])
    wf = fine.ys[1::2]
    scale = float(np.max(np.abs(fine.z)))
    pos = float(np.max(np.hypot(wc[:, 0] - wf[:, 0], wc[:, 1] - wf[:, 1]))) / scale
    return max(pos, clock) / 15.0 + n * np.finfo(float).eps


def round_trip(traj: Trajectory, dmap: DualMap, points_per_period: int = 10_000) -> RoundTrip:
    """Dualize, map back with the inverse map, and compare with the source.

    Positions are compared at the round-trip clock values through the
    source's dense output; the final clock is compared to the source span.
    """
    dual = dualize_trajectory(traj, dmap, points_per_period)
    kappa = dual_residual(dual, dmap).kappa_fit
    inv = dmap.inverse(kappa=traj.spec.k)
    # the back map continues the branch the forward map started on
    theta_w = dmap.exponent * float(np.angle(traj.z[0]))
    back = dualize_trajectory(with_coupling(dual, kappa), inv, points_per_period, theta0=theta_w)
    span = traj.clocks[-1] - traj.clocks[0]
    s_back = np.clip(back.clocks + traj.clocks[0], traj.clocks[0], traj.clocks[-1])
    orig = traj(s_back)
    z_orig = orig[:, 0] + 1j * orig[:, 1]
    scale = float(np.max(np.abs(z_orig)))
    pos = float(np.max(np.abs(back.z - z_orig))) / scale
    clock = abs(back.clocks[-1] - span) / span
    return RoundTrip(pos, clock, resampling_error(traj, dmap, points_per_period))


@dataclass(frozen=True)
class DualityCertificate:
    """Numerical evidence for the Hooke (class 2) to Kepler (class -1) correspondence.

    ``kappa_match`` names which prediction the fitted coupling agrees with:
    ``"mu*B"`` (potential amplitude formula), ``"-E/2"`` (the alternative
    statement of the dual coupling), or ``"neither"``. ``ratio_mean`` is the
    average of A_dual / T_source, compared with 1/(2 k~) for both candidate
    couplings.
    """

    E_source: float
    kappa_formula: float
    kappa_text: float
    kappa_fit: float
    kappa_match: str
    residual_fit: float
    residual_formula: float
    dual_energy: float
    dual_energy_text: float
    lrl_modulus_drift: float
    ratio_mean: complex
    ratio_variation: float
    ratio_pred_formula: float
    ratio_pred_text: float


def _match(value: float, candidates: dict[str, float], rtol: float = 1e-6) -> str:
    for name, target in candidates.items():
        if abs(value - target) <= rtol * abs(target):
            return name
    return "neither"


def certify_hooke_kepler(source: Trajectory, points_per_period: int = 10_000) -> DualityCertificate:
    """Dualize a Hooke pseudomotion and measure everything the duality predicts."""
    spec = source.spec
    if not spec.is_h_type or source.frame is not Frame.PSEUDO:
        raise WrongClass("certification needs an H-type pseudomotion trajectory")
    z0, v0 = source.z[0], source.v[0]
    E = 0.5 * abs(v0) ** 2 + 0.5 * spec.k * abs(z0) ** 2
    dmap = make_dual_map(2.0, E)
    dual = dualize_trajectory(source, dmap, points_per_period)
    res = dual_residual(dual, dmap)
    kappa = res.kappa_fit

    w, wp = dual.z, dual.v
    rho = np.abs(w)
    L_dual = (np.conj(w) * wp).imag
    A = -1j * L_dual * wp / kappa - w / rho
    modulus = np.abs(A)
    lrl_drift = float(np.max(np.abs(modulus - modulus[0])) / max(modulus[0], 1e-12))
    dual_energy = float(np.mean(0.5 * np.abs(wp) ** 2 - kappa / rho))

    src = source(dual.ys[:, 4])
    z = src[:, 0] + 1j * src[:, 1]
    zp = src[:, 2] + 1j * src[:, 3]
    T = 0.5 * zp * zp + 0.5 * spec.k * z * z
    ratio = A / T
    mean = complex(np.mean(ratio))
    variation = float(np.max(np.abs(ratio - mean)) / abs(mean))

    kappa_text = -E / 2.0
    return DualityCertificate(
        E_source=E,
        kappa_formula=dmap.kappa,
        kappa_text=kappa_text,
        kappa_fit=kappa,
        kappa_match=_match(kappa, {"mu*B": dmap.kappa, "-E/2": kappa_text}),
        residual_fit=res.residual_fit,
        residual_formula=res.residual_formula,
        dual_energy=dual_energy,
        dual_energy_text=-spec.k / 2.0,
        lrl_modulus_drift=lrl_drift,
        ratio_mean=mean,
        ratio_variation=variation,
        ratio_pred_formula=1.0 / (2.0 * dmap.kappa),
        ratio_pred_text=1.0 / (2.0 * kappa_text),
    )
